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

// Exact backward-induction oracles for KL-regularized Markov games.

#ifndef KLGAME_MARKOV_ORACLES_H_
#define KLGAME_MARKOV_ORACLES_H_

#include <vector>

#include <Eigen/Dense>

#include "klgame/linear_mdp.h"
#include "klgame/matrix_game.h"

namespace klgame {

// Regularization strength and per-(h, s) reference policies.
struct MarkovRegularization {
  double beta = 0.0;
  MarkovPolicy mu_ref;
  MarkovPolicy nu_ref;

  // Uniform references over both action sets.
  static MarkovRegularization Uniform(const LinearMDP& mdp, double beta);
};

// v[h] is indexed by state for h = 0 .. H (v[H] == 0); q[h] by cell.
struct MarkovValues {
  std::vector<Eigen::VectorXd> v;
  std::vector<Eigen::VectorXd> q;
  // Expected v[0] under the initial distribution.
  double initial = 0.0;
};

// Q_h = r_h + P_h V_{h+1};
// V_h(s) = E_{mu, nu} Q_h - beta KL(mu_h || mu_ref) + beta KL(nu_h || nu_ref).
// Throws SupportMismatch when beta > 0 and a policy leaves its reference's
// support.
MarkovValues EvaluatePair(const LinearMDP& mdp, const MarkovRegularization& reg,
                          const MarkovPolicy& mu, const MarkovPolicy& nu);

enum class Side { kMax, kMin };

struct MarkovBestResponse {
  MarkovPolicy policy;
  // Values of the responder's policy against the fixed opponent.
  MarkovValues values;
};

// Exact best response of `side` to the fixed `opponent`, stage by stage in
// Gibbs closed form.
MarkovBestResponse BestResponseMarkov(const LinearMDP& mdp, const MarkovRegularization& reg,
                                      const MarkovPolicy& opponent, Side side);

struct MarkovEquilibrium {
  MarkovPolicy mu;
  MarkovPolicy nu;
  MarkovValues values;
  int max_stage_iterations = 0;
};

// Stagewise equilibrium by backward induction; every stage game is solved to
// tol / (H |S|) so the whole-game dual gap is certified below tol.
MarkovEquilibrium SolveTrueNeMarkov(const LinearMDP& mdp, const MarkovRegularization& reg,
                                    double tol, const NeOptions& stage_options = {});

// V^{*, nu}(rho) - V^{mu, *}(rho).
double DualGapMarkov(const LinearMDP& mdp, const MarkovRegularization& reg,
                     const MarkovPolicy& mu, const MarkovPolicy& nu);

// Stage matrix game at (h, s) for a cell-indexed Q table.
KLMatrixGame StageGame(const LinearMDP& mdp, const MarkovRegularization& reg,
                       const Eigen::VectorXd& q, int h, int s);

}  // namespace klgame

#endif  // KLGAME_MARKOV_ORACLES_H_
