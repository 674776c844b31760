// Copyright 2026 The klgame Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KLGAME_NUMERICS_H_
#define KLGAME_NUMERICS_H_

#include <Eigen/Dense>

namespace klgame {

// Absolute tolerance on the total mass of a probability vector.
inline constexpr double kSimplexSumTolerance = 1e-9;

// A probability vector over a finite index set. Entries are nonnegative and
// sum to one; every constructor enforces this.
class Simplex {
 public:
  // Validates `weights` (nonnegative, sum within `tol` of 1) and rescales it
  // to unit mass. Throws InvalidArgument otherwise.
  static Simplex FromWeights(Eigen::VectorXd weights,
                             double tol = kSimplexSumTolerance);
  // Normalizes arbitrary nonnegative mass. Throws DegenerateReference when the
  // total mass is zero.
  static Simplex Normalize(Eigen::VectorXd mass);
  static Simplex Uniform(int n);
  static Simplex PointMass(int n, int index);

  int size() const { return static_cast<int>(weights_.size()); }
  double operator[](int i) const { return weights_[i]; }
  const Eigen::VectorXd& weights() const { return weights_; }

  double L1Distance(const Simplex& other) const;
  bool StrictlyPositive() const { return (weights_.array() > 0.0).all(); }

 private:
  explicit Simplex(Eigen::VectorXd weights) : weights_(std::move(weights)) {}
  Eigen::VectorXd weights_;
};

// KL(p || q) with the 0 log 0 = 0 convention.
double KlDivergence(const Simplex& p, const Simplex& q);

// beta * log sum_i ref_i exp(scores_i / beta), the KL-regularized maximum of
// <mu, scores> - beta KL(mu || ref). At beta == 0 this is the hard maximum over
// the support of `ref`.
double SoftValue(const Simplex& ref, const Eigen::Ref<const Eigen::VectorXd>& scores,
                 double beta);

// The maximizer of <mu, scores> - beta KL(mu || ref): ref_i exp(scores_i/beta)
// normalized. At beta == 0, a point mass on the lowest-index maximizer within
// the support of `ref`.
Simplex GibbsTilt(const Simplex& ref, const Eigen::Ref<const Eigen::VectorXd>& scores,
                  double beta);

}  // namespace klgame

#endif  // KLGAME_NUMERICS_H_
