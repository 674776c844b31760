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

#include "klgame/ridge.h"

#include <algorithm>
#include <cmath>

#include "klgame/errors.h"

namespace klgame {

RidgeRegression::RidgeRegression(int dim, double lambda, int refactor_period)
    : lambda_(lambda), refactor_period_(refactor_period) {
  if (dim <= 0) throw InvalidArgument("ridge dimension must be positive");
  if (!(lambda > 0.0)) throw InvalidArgument("ridge lambda must be positive");
  if (refactor_period <= 0) throw InvalidArgument("refactor period must be positive");
  sigma_ = lambda * Eigen::MatrixXd::Identity(dim, dim);
  sigma_inverse_ = Eigen::MatrixXd::Identity(dim, dim) / lambda;
  xty_ = Eigen::VectorXd::Zero(dim);
}

void RidgeRegression::Absorb(const Eigen::Ref<const Eigen::VectorXd>& phi, double y) {
  if (phi.size() != dim()) throw DimensionMismatch("ridge feature dimension");
  ++count_;
  if (!phi.isZero(0.0)) {
    sigma_.noalias() += phi * phi.transpose();
    xty_.noalias() += y * phi;
    // Sherman-Morrison: (S + pp^T)^{-1} = S^{-1} - (S^{-1}p)(S^{-1}p)^T / (1 + p^T S^{-1} p).
    const Eigen::VectorXd u = sigma_inverse_ * phi;
    sigma_inverse_.noalias() -= (u * u.transpose()) / (1.0 + phi.dot(u));
  }
  if (count_ % refactor_period_ == 0) Refactor();
}

void RidgeRegression::Refactor() {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma_);
  sigma_inverse_ = llt.solve(Eigen::MatrixXd::Identity(dim(), dim()));
}

Eigen::VectorXd RidgeRegression::Solve(const Eigen::Ref<const Eigen::VectorXd>& rhs) const {
  if (rhs.size() != dim()) throw DimensionMismatch("ridge right-hand side dimension");
  return sigma_inverse_ * rhs;
}

double RidgeRegression::Mahalanobis(const Eigen::Ref<const Eigen::VectorXd>& phi) const {
  if (phi.size() != dim()) throw DimensionMismatch("ridge feature dimension");
  return std::sqrt(std::max(0.0, phi.dot(sigma_inverse_ * phi)));
}

double RidgeRegression::SigmaNorm(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  if (v.size() != dim()) throw DimensionMismatch("ridge vector dimension");
  return std::sqrt(std::max(0.0, v.dot(sigma_ * v)));
}

}  // namespace klgame
