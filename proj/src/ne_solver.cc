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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "klgame/matrix_game.h"
#include "zero_sum_lp.h"

namespace klgame {
namespace {

// Logits below this are treated as "almost zero" rather than -inf so that a
// point-mass warm start can still move.
constexpr double kLogFloor = -700.0;

void NormalizeLogits(Eigen::VectorXd& logits) {
  const double top = logits.maxCoeff();
  logits.array() -= top + std::log((logits.array() - top).exp().sum());
}

Simplex FromLogits(const Eigen::VectorXd& logits) {
  return Simplex::Normalize(logits.array().exp().matrix());
}

Eigen::VectorXd InitialLogits(const Simplex& start, const Simplex& ref, bool floor) {
  Eigen::VectorXd logits(start.size());
  for (int i = 0; i < start.size(); ++i) {
    if (ref[i] <= 0.0) {
      logits[i] = -std::numeric_limits<double>::infinity();
    } else if (start[i] > 0.0) {
      logits[i] = std::max(std::log(start[i]), kLogFloor);
    } else {
      logits[i] = floor ? kLogFloor : -std::numeric_limits<double>::infinity();
    }
  }
  NormalizeLogits(logits);
  return logits;
}

Eigen::VectorXd LogOf(const Simplex& p) { return p.weights().array().log().matrix(); }

PolicyPair StartingPair(const KLMatrixGame& game, const NeOptions& options) {
  if (!options.init) return {game.mu_ref(), game.nu_ref()};
  if (options.init->mu.size() != game.num_rows() ||
      options.init->nu.size() != game.num_cols()) {
    throw DimensionMismatch("initial policy pair does not match the game");
  }
  return *options.init;
}

// Tracks the lowest-gap pair seen so far so that a failed run can still report
// its best iterate.
class BestIterate {
 public:
  explicit BestIterate(const KLMatrixGame& game) : game_(game) {}

  // Returns the certified gap of `pair`.
  double Offer(PolicyPair pair, int iteration) {
    NESolution candidate = NESolution::Certify(game_, std::move(pair), iteration);
    const double gap = candidate.certified_gap();
    if (!best_ || gap < best_->certified_gap()) best_.emplace(std::move(candidate));
    return gap;
  }
  NESolution Take() { return std::move(*best_); }

 private:
  const KLMatrixGame& game_;
  std::optional<NESolution> best_;
};

// Entropy-geometry extragradient on logits. Each half step is
//   log mu' = (1 - eta beta) log mu + eta beta log mu_ref + eta A nu  (+ const)
//   log nu' = (1 - eta beta) log nu + eta beta log nu_ref - eta A^T mu (+ const)
// taken first to a midpoint and then from the current point using the
// midpoint's gradients. The last iterate converges linearly for beta > 0.
NESolution SolveExtragradient(const KLMatrixGame& game, const NeOptions& options) {
  if (!(game.beta() > 0.0)) throw InvalidArgument("extragradient solver needs beta > 0");
  const Eigen::MatrixXd& a = game.payoff();
  const double beta = game.beta();
  const double eta = 1.0 / (2.0 * (game.magnitude_bound() + beta));
  const double keep = 1.0 - eta * beta;
  const Eigen::VectorXd anchor_mu = eta * beta * LogOf(game.mu_ref());
  const Eigen::VectorXd anchor_nu = eta * beta * LogOf(game.nu_ref());

  const PolicyPair start = StartingPair(game, options);
  Eigen::VectorXd log_mu = InitialLogits(start.mu, game.mu_ref(), true);
  Eigen::VectorXd log_nu = InitialLogits(start.nu, game.nu_ref(), true);

  BestIterate best(game);
  for (int iter = 0;; ++iter) {
    Simplex mu = FromLogits(log_mu);
    Simplex nu = FromLogits(log_nu);
    const double gap = best.Offer({mu, nu}, iter);
    if (gap <= options.tol &&
        BestResponseResidual(game, {mu, nu}) <= options.residual_tol) {
      return NESolution::Certify(game, {std::move(mu), std::move(nu)}, iter);
    }
    if (iter >= options.max_iters) break;

    Eigen::VectorXd mid_mu = keep * log_mu + anchor_mu + eta * (a * nu.weights());
    Eigen::VectorXd mid_nu =
        keep * log_nu + anchor_nu - eta * (a.transpose() * mu.weights());
    NormalizeLogits(mid_mu);
    NormalizeLogits(mid_nu);
    const Eigen::VectorXd p_mid_mu = mid_mu.array().exp();
    const Eigen::VectorXd p_mid_nu = mid_nu.array().exp();

    log_mu = keep * log_mu + anchor_mu + eta * (a * p_mid_nu);
    log_nu = keep * log_nu + anchor_nu - eta * (a.transpose() * p_mid_mu);
    NormalizeLogits(log_mu);
    NormalizeLogits(log_nu);
  }
  throw NoConvergence(best.Take());
}

// Simultaneous multiplicative weights with uniformly averaged iterates and step
// sqrt(8 log(max(m, n)) / k) in units of the payoff magnitude.
NESolution SolveMultiplicativeWeights(const KLMatrixGame& game, const NeOptions& options) {
  const Eigen::MatrixXd& a = game.payoff();
  const double beta = game.beta();
  const int m = game.num_rows();
  const int n = game.num_cols();
  const double scale = std::max(game.magnitude_bound() + beta, 1e-300);
  const double log_actions = std::log(static_cast<double>(std::max(m, n)));

  const PolicyPair start = StartingPair(game, options);
  Eigen::VectorXd log_mu = InitialLogits(start.mu, game.mu_ref(), beta > 0.0);
  Eigen::VectorXd log_nu = InitialLogits(start.nu, game.nu_ref(), beta > 0.0);
  // Regularization gradients only involve supported entries.
  const Eigen::VectorXd log_ref_mu =
      game.mu_ref().weights().array().max(1e-300).log().matrix();
  const Eigen::VectorXd log_ref_nu =
      game.nu_ref().weights().array().max(1e-300).log().matrix();

  Eigen::VectorXd sum_mu = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd sum_nu = Eigen::VectorXd::Zero(n);
  BestIterate best(game);
  for (int k = 1;; ++k) {
    const Eigen::VectorXd mu = log_mu.array().exp();
    const Eigen::VectorXd nu = log_nu.array().exp();
    sum_mu += mu;
    sum_nu += nu;
    const double gap =
        best.Offer({Simplex::Normalize(sum_mu), Simplex::Normalize(sum_nu)}, k);
    if (gap <= options.tol) return best.Take();
    if (k >= options.max_iters) break;

    const double step = std::sqrt(8.0 * log_actions / k) / scale;
    Eigen::VectorXd grad_mu = a * nu;
    Eigen::VectorXd grad_nu = a.transpose() * mu;
    if (beta > 0.0) {
      grad_mu -= beta * (log_mu - log_ref_mu);
      grad_nu += beta * (log_nu - log_ref_nu);
    }
    log_mu += step * grad_mu;
    log_nu -= step * grad_nu;
    NormalizeLogits(log_mu);
    NormalizeLogits(log_nu);
  }
  throw NoConvergence(best.Take());
}

std::vector<int> Support(const Simplex& p) {
  std::vector<int> idx;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) idx.push_back(i);
  }
  return idx;
}

// Exact unregularized equilibrium restricted to the reference supports.
NESolution SolveLinearProgram(const KLMatrixGame& game, const NeOptions& options) {
  if (game.beta() != 0.0) throw InvalidArgument("linear program solver needs beta == 0");
  const std::vector<int> rows = Support(game.mu_ref());
  const std::vector<int> cols = Support(game.nu_ref());
  Eigen::MatrixXd sub(rows.size(), cols.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < cols.size(); ++c) sub(r, c) = game.payoff()(rows[r], cols[c]);
  }
  const internal::LpEquilibrium lp = internal::SolveZeroSumLp(sub);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(game.num_rows());
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(game.num_cols());
  for (size_t r = 0; r < rows.size(); ++r) mu[rows[r]] = lp.mu[r];
  for (size_t c = 0; c < cols.size(); ++c) nu[cols[c]] = lp.nu[c];
  NESolution solution = NESolution::Certify(
      game, {Simplex::Normalize(std::move(mu)), Simplex::Normalize(std::move(nu))},
      lp.pivots);
  if (solution.certified_gap() > options.tol) throw NoConvergence(std::move(solution));
  return solution;
}

}  // namespace

double BestResponseResidual(const KLMatrixGame& game, const PolicyPair& pair) {
  return pair.mu.L1Distance(BestResponseMax(game, pair.nu)) +
         pair.nu.L1Distance(BestResponseMin(game, pair.mu));
}

NESolution SolveNE(const KLMatrixGame& game, const NeOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  if (!(options.residual_tol > 0.0)) throw InvalidArgument("residual tolerance must be positive");
  switch (options.method) {
    case NeMethod::kAuto:
      return game.beta() > 0.0 ? SolveExtragradient(game, options)
                               : SolveLinearProgram(game, options);
    case NeMethod::kExtragradient:
      return SolveExtragradient(game, options);
    case NeMethod::kMultiplicativeWeights:
      return SolveMultiplicativeWeights(game, options);
    case NeMethod::kLinearProgram:
      return SolveLinearProgram(game, options);
  }
  throw InvalidArgument("unknown solver method");
}

}  // namespace klgame
