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

#include "klgame/numerics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "klgame/errors.h"

namespace klgame {
namespace {

void CheckSameSize(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": sizes " + std::to_string(a) +
                            " and " + std::to_string(b));
  }
}

// Largest score over the support of `ref`, and its lowest index.
std::pair<double, int> SupportMax(const Simplex& ref,
                                  const Eigen::Ref<const Eigen::VectorXd>& scores) {
  double best = -std::numeric_limits<double>::infinity();
  int arg = -1;
  for (int i = 0; i < ref.size(); ++i) {
    if (ref[i] > 0.0 && scores[i] > best) {
      best = scores[i];
      arg = i;
    }
  }
  if (arg < 0) throw DegenerateReference("reference has no support");
  return {best, arg};
}

}  // namespace

Simplex Simplex::FromWeights(Eigen::VectorXd weights, double tol) {
  if (weights.size() == 0) throw InvalidArgument("empty probability vector");
  for (int i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
      throw InvalidArgument("probability entry " + std::to_string(i) +
                            " is negative or not finite");
    }
  }
  const double total = weights.sum();
  if (std::abs(total - 1.0) > tol) {
    throw InvalidArgument("probability vector sums to " + std::to_string(total));
  }
  weights /= total;
  return Simplex(std::move(weights));
}

Simplex Simplex::Normalize(Eigen::VectorXd mass) {
  if (mass.size() == 0) throw InvalidArgument("empty probability vector");
  if ((mass.array() < 0.0).any() || !mass.allFinite()) {
    throw InvalidArgument("mass must be finite and nonnegative");
  }
  const double total = mass.sum();
  if (!(total > 0.0)) throw DegenerateReference("zero total mass");
  mass /= total;
  return Simplex(std::move(mass));
}

Simplex Simplex::Uniform(int n) {
  if (n <= 0) throw InvalidArgument("simplex dimension must be positive");
  return Simplex(Eigen::VectorXd::Constant(n, 1.0 / n));
}

Simplex Simplex::PointMass(int n, int index) {
  if (n <= 0 || index < 0 || index >= n) {
    throw InvalidArgument("point mass index out of range");
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  w[index] = 1.0;
  return Simplex(std::move(w));
}

double Simplex::L1Distance(const Simplex& other) const {
  CheckSameSize(size(), other.size(), "L1Distance");
  return (weights_ - other.weights_).lpNorm<1>();
}

double KlDivergence(const Simplex& p, const Simplex& q) {
  CheckSameSize(p.size(), q.size(), "KlDivergence");
  double kl = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) {
      throw SupportMismatch("KL divergence is infinite: index " +
                            std::to_string(i) + " has mass outside the reference");
    }
    kl += p[i] * (std::log(p[i]) - std::log(q[i]));
  }
  return std::max(kl, 0.0);
}

double SoftValue(const Simplex& ref, const Eigen::Ref<const Eigen::VectorXd>& scores,
                 double beta) {
  CheckSameSize(ref.size(), static_cast<int>(scores.size()), "SoftValue");
  if (beta < 0.0) throw InvalidArgument("beta must be nonnegative");
  const auto [top, arg] = SupportMax(ref, scores);
  if (beta == 0.0) return top;
  // mass = sum ref_i exp((s_i - top)/beta) lies in [ref_arg, 1]. When it is
  // close to one (large beta) the expm1/log1p route keeps relative accuracy.
  double mass = 0.0;
  double mass_minus_one = 0.0;
  for (int i = 0; i < ref.size(); ++i) {
    if (ref[i] <= 0.0) continue;
    const double x = (scores[i] - top) / beta;
    mass += ref[i] * std::exp(x);
    mass_minus_one += ref[i] * std::expm1(x);
  }
  const double log_mass = mass > 0.5 ? std::log1p(mass_minus_one) : std::log(mass);
  return top + beta * log_mass;
}

Simplex GibbsTilt(const Simplex& ref, const Eigen::Ref<const Eigen::VectorXd>& scores,
                  double beta) {
  CheckSameSize(ref.size(), static_cast<int>(scores.size()), "GibbsTilt");
  if (beta < 0.0) throw InvalidArgument("beta must be nonnegative");
  const auto [top, arg] = SupportMax(ref, scores);
  if (beta == 0.0) return Simplex::PointMass(ref.size(), arg);
  Eigen::VectorXd w(ref.size());
  for (int i = 0; i < ref.size(); ++i) {
    w[i] = ref[i] > 0.0 ? ref[i] * std::exp((scores[i] - top) / beta) : 0.0;
  }
  return Simplex::Normalize(std::move(w));
}

}  // namespace klgame
