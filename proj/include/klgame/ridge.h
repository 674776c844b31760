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

#ifndef KLGAME_RIDGE_H_
#define KLGAME_RIDGE_H_

#include <cstdint>

#include <Eigen/Dense>

namespace klgame {

// Online ridge regression. Keeps the regularized design matrix
//   sigma = lambda I + sum_k phi_k phi_k^T,
// its inverse (rank-one updates, re-derived by Cholesky every
// `refactor_period` absorptions), and the response accumulator sum_k phi_k y_k.
class RidgeRegression {
 public:
  static constexpr int kDefaultRefactorPeriod = 256;

  RidgeRegression(int dim, double lambda,
                  int refactor_period = kDefaultRefactorPeriod);

  void Absorb(const Eigen::Ref<const Eigen::VectorXd>& phi, double y);

  // The ridge minimizer sigma^{-1} xty.
  Eigen::VectorXd Solve() const { return sigma_inverse_ * xty_; }
  // sigma^{-1} rhs, for callers that keep their own response statistics.
  Eigen::VectorXd Solve(const Eigen::Ref<const Eigen::VectorXd>& rhs) const;

  // ||phi||_{sigma^{-1}}.
  double Mahalanobis(const Eigen::Ref<const Eigen::VectorXd>& phi) const;
  // ||v||_{sigma}.
  double SigmaNorm(const Eigen::Ref<const Eigen::VectorXd>& v) const;

  int dim() const { return static_cast<int>(xty_.size()); }
  double lambda() const { return lambda_; }
  std::int64_t count() const { return count_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  const Eigen::MatrixXd& sigma_inverse() const { return sigma_inverse_; }
  const Eigen::VectorXd& xty() const { return xty_; }

 private:
  void Refactor();

  double lambda_;
  int refactor_period_;
  std::int64_t count_ = 0;
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd sigma_inverse_;
  Eigen::VectorXd xty_;
};

}  // namespace klgame

#endif  // KLGAME_RIDGE_H_
