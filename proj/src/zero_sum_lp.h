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

#ifndef KLGAME_SRC_ZERO_SUM_LP_H_
#define KLGAME_SRC_ZERO_SUM_LP_H_

#include <Eigen/Dense>

namespace klgame::internal {

struct LpEquilibrium {
  Eigen::VectorXd mu;  // unnormalized-safe: nonnegative, sums to 1
  Eigen::VectorXd nu;
  int pivots = 0;
};

// Exact maximin strategies of the unregularized zero-sum game `payoff` (row
// player maximizes) by the dense tableau simplex method with Bland's rule.
LpEquilibrium SolveZeroSumLp(const Eigen::MatrixXd& payoff);

}  // namespace klgame::internal

#endif  // KLGAME_SRC_ZERO_SUM_LP_H_
