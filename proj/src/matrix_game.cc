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

#include "klgame/matrix_game.h"

#include <cmath>
#include <string>

namespace klgame {
namespace {

double RegularizationTerm(double beta, const Simplex& p, const Simplex& ref) {
  return beta > 0.0 ? beta * KlDivergence(p, ref) : 0.0;
}

void CheckPolicySize(const Simplex& p, int expected, const char* who) {
  if (p.size() != expected) {
    throw DimensionMismatch(std::string(who) + " policy has size " +
                            std::to_string(p.size()) + ", expected " +
                            std::to_string(expected));
  }
}

}  // namespace

KLMatrixGame::KLMatrixGame(Eigen::MatrixXd payoff, double beta, Simplex mu_ref,
                           Simplex nu_ref)
    : payoff_(std::move(payoff)),
      beta_(beta),
      mu_ref_(std::move(mu_ref)),
      nu_ref_(std::move(nu_ref)) {
  if (payoff_.size() == 0) throw InvalidArgument("empty payoff matrix");
  if (!payoff_.allFinite()) throw InvalidArgument("payoff entries must be finite");
  if (!(beta_ >= 0.0) || !std::isfinite(beta_)) {
    throw InvalidArgument("beta must be finite and nonnegative");
  }
  CheckPolicySize(mu_ref_, num_rows(), "max reference");
  CheckPolicySize(nu_ref_, num_cols(), "min reference");
  if (beta_ > 0.0 && !(mu_ref_.StrictlyPositive() && nu_ref_.StrictlyPositive())) {
    throw InvalidArgument("references must be strictly positive when beta > 0");
  }
  magnitude_bound_ = payoff_.cwiseAbs().maxCoeff();
}

KLMatrixGame KLMatrixGame::WithUniformReferences(Eigen::MatrixXd payoff, double beta) {
  const int m = static_cast<int>(payoff.rows());
  const int n = static_cast<int>(payoff.cols());
  return KLMatrixGame(std::move(payoff), beta, Simplex::Uniform(m), Simplex::Uniform(n));
}

KLMatrixGame KLMatrixGame::WithPayoff(Eigen::MatrixXd payoff) const {
  return KLMatrixGame(std::move(payoff), beta_, mu_ref_, nu_ref_);
}

double PayoffValue(const KLMatrixGame& game, const PolicyPair& pair) {
  CheckPolicySize(pair.mu, game.num_rows(), "max");
  CheckPolicySize(pair.nu, game.num_cols(), "min");
  return pair.mu.weights().dot(game.payoff() * pair.nu.weights()) -
         RegularizationTerm(game.beta(), pair.mu, game.mu_ref()) +
         RegularizationTerm(game.beta(), pair.nu, game.nu_ref());
}

Simplex BestResponseMax(const KLMatrixGame& game, const Simplex& nu) {
  CheckPolicySize(nu, game.num_cols(), "min");
  return GibbsTilt(game.mu_ref(), game.payoff() * nu.weights(), game.beta());
}

Simplex BestResponseMin(const KLMatrixGame& game, const Simplex& mu) {
  CheckPolicySize(mu, game.num_rows(), "max");
  return GibbsTilt(game.nu_ref(), -(game.payoff().transpose() * mu.weights()),
                   game.beta());
}

double BestResponseValueMax(const KLMatrixGame& game, const Simplex& nu) {
  CheckPolicySize(nu, game.num_cols(), "min");
  return SoftValue(game.mu_ref(), game.payoff() * nu.weights(), game.beta()) +
         RegularizationTerm(game.beta(), nu, game.nu_ref());
}

double BestResponseValueMin(const KLMatrixGame& game, const Simplex& mu) {
  CheckPolicySize(mu, game.num_rows(), "max");
  return -SoftValue(game.nu_ref(), -(game.payoff().transpose() * mu.weights()),
                    game.beta()) -
         RegularizationTerm(game.beta(), mu, game.mu_ref());
}

double DualGap(const KLMatrixGame& game, const PolicyPair& pair) {
  return BestResponseValueMax(game, pair.nu) - BestResponseValueMin(game, pair.mu);
}

NESolution NESolution::Certify(const KLMatrixGame& game, PolicyPair pair,
                               int iterations) {
  const double value = PayoffValue(game, pair);
  const double gap = DualGap(game, pair);
  return NESolution(std::move(pair), value, gap, iterations);
}

NoConvergence::NoConvergence(NESolution best)
    : Error("equilibrium solver did not converge; best dual gap " +
            std::to_string(best.certified_gap())),
      best_(std::move(best)) {}

}  // namespace klgame
