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

#include "zero_sum_lp.h"

#include <vector>

#include "klgame/errors.h"

namespace klgame::internal {
namespace {

constexpr double kPivotEps = 1e-12;

Eigen::VectorXd CleanDistribution(Eigen::VectorXd v) {
  v = v.cwiseMax(0.0);
  const double total = v.sum();
  if (!(total > 0.0)) throw Error("linear program produced an empty strategy");
  return v / total;
}

}  // namespace

// Shift the payoff so every entry is >= 1, then solve the column player's
// program  max 1^T y  s.t.  A' y <= 1, y >= 0.  The optimum is 1/v' and the
// slack reduced costs are the row player's dual variables.
LpEquilibrium SolveZeroSumLp(const Eigen::MatrixXd& payoff) {
  const int m = static_cast<int>(payoff.rows());
  const int n = static_cast<int>(payoff.cols());
  const Eigen::MatrixXd shifted =
      payoff.array() - payoff.minCoeff() + 1.0;

  const int rhs = n + m;
  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  tab.topLeftCorner(m, n) = shifted;
  tab.block(0, n, m, m).setIdentity();
  tab.col(rhs).head(m).setOnes();
  tab.row(m).head(n).setConstant(-1.0);
  std::vector<int> basis(m);
  for (int r = 0; r < m; ++r) basis[r] = n + r;

  const int max_pivots = 1000 * (m + n);
  int pivots = 0;
  for (; pivots < max_pivots; ++pivots) {
    int enter = -1;
    for (int j = 0; j < n + m; ++j) {
      if (tab(m, j) < -kPivotEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    int leave = -1;
    double best_ratio = 0.0;
    for (int r = 0; r < m; ++r) {
      if (tab(r, enter) <= kPivotEps) continue;
      const double ratio = tab(r, rhs) / tab(r, enter);
      if (leave < 0 || ratio < best_ratio - kPivotEps ||
          (ratio <= best_ratio + kPivotEps && basis[r] < basis[leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    // Bounded: A' > 0 caps every y_j.
    if (leave < 0) throw Error("zero-sum linear program is unbounded");
    tab.row(leave) /= tab(leave, enter);
    for (int r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double factor = tab(r, enter);
      if (factor != 0.0) tab.row(r) -= factor * tab.row(leave);
    }
    basis[leave] = enter;
  }
  if (pivots == max_pivots) throw Error("zero-sum linear program cycled");

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (int r = 0; r < m; ++r) {
    if (basis[r] < n) y[basis[r]] = tab(r, rhs);
  }
  Eigen::VectorXd x = tab.row(m).segment(n, m).transpose();
  LpEquilibrium out;
  out.mu = CleanDistribution(std::move(x));
  out.nu = CleanDistribution(std::move(y));
  out.pivots = pivots;
  return out;
}

}  // namespace klgame::internal
