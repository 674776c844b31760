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

#include "klgame/markov_oracles.h"

#include <algorithm>

#include "klgame/errors.h"

namespace klgame {
namespace {

void CheckShapes(const LinearMDP& mdp, const MarkovRegularization& reg) {
  if (!(reg.beta >= 0.0)) throw InvalidArgument("beta must be nonnegative");
  const auto check = [&](const MarkovPolicy& p, int actions, const char* what) {
    if (p.horizon() != mdp.horizon() || p.num_states() != mdp.num_states() ||
        p.num_actions() != actions) {
      throw DimensionMismatch(std::string(what) + " does not match the Markov game");
    }
  };
  check(reg.mu_ref, mdp.num_max_actions(), "max-player reference");
  check(reg.nu_ref, mdp.num_min_actions(), "min-player reference");
}

void CheckPolicy(const LinearMDP& mdp, const MarkovPolicy& p, int actions) {
  if (p.horizon() != mdp.horizon() || p.num_states() != mdp.num_states() ||
      p.num_actions() != actions) {
    throw DimensionMismatch("policy does not match the Markov game");
  }
}

MarkovValues EmptyValues(const LinearMDP& mdp) {
  MarkovValues out;
  out.v.assign(mdp.horizon() + 1, Eigen::VectorXd::Zero(mdp.num_states()));
  out.q.assign(mdp.horizon(), Eigen::VectorXd::Zero(mdp.num_cells()));
  return out;
}

double Regularizer(double beta, const Simplex& p, const Simplex& ref) {
  return beta > 0.0 ? beta * KlDivergence(p, ref) : 0.0;
}

}  // namespace

MarkovRegularization MarkovRegularization::Uniform(const LinearMDP& mdp, double beta) {
  return {beta, MarkovPolicy::Uniform(mdp.horizon(), mdp.num_states(), mdp.num_max_actions()),
          MarkovPolicy::Uniform(mdp.horizon(), mdp.num_states(), mdp.num_min_actions())};
}

KLMatrixGame StageGame(const LinearMDP& mdp, const MarkovRegularization& reg,
                       const Eigen::VectorXd& q, int h, int s) {
  return KLMatrixGame(mdp.StageBlock(q, s), reg.beta, reg.mu_ref.at(h, s),
                      reg.nu_ref.at(h, s));
}

MarkovValues EvaluatePair(const LinearMDP& mdp, const MarkovRegularization& reg,
                          const MarkovPolicy& mu, const MarkovPolicy& nu) {
  CheckShapes(mdp, reg);
  CheckPolicy(mdp, mu, mdp.num_max_actions());
  CheckPolicy(mdp, nu, mdp.num_min_actions());
  MarkovValues out = EmptyValues(mdp);
  for (int h = mdp.horizon() - 1; h >= 0; --h) {
    out.q[h] = mdp.rewards(h) + mdp.transitions(h) * out.v[h + 1];
    for (int s = 0; s < mdp.num_states(); ++s) {
      const Simplex& m = mu.at(h, s);
      const Simplex& n = nu.at(h, s);
      out.v[h][s] = m.weights().dot(mdp.StageBlock(out.q[h], s) * n.weights()) -
                    Regularizer(reg.beta, m, reg.mu_ref.at(h, s)) +
                    Regularizer(reg.beta, n, reg.nu_ref.at(h, s));
    }
  }
  out.initial = mdp.rho().weights().dot(out.v[0]);
  return out;
}

MarkovBestResponse BestResponseMarkov(const LinearMDP& mdp, const MarkovRegularization& reg,
                                      const MarkovPolicy& opponent, Side side) {
  CheckShapes(mdp, reg);
  const bool max_side = side == Side::kMax;
  CheckPolicy(mdp, opponent, max_side ? mdp.num_min_actions() : mdp.num_max_actions());
  MarkovPolicy policy = max_side ? reg.mu_ref : reg.nu_ref;
  MarkovValues out = EmptyValues(mdp);
  for (int h = mdp.horizon() - 1; h >= 0; --h) {
    out.q[h] = mdp.rewards(h) + mdp.transitions(h) * out.v[h + 1];
    for (int s = 0; s < mdp.num_states(); ++s) {
      const KLMatrixGame stage = StageGame(mdp, reg, out.q[h], h, s);
      const Simplex& fixed = opponent.at(h, s);
      if (max_side) {
        policy.Set(h, s, BestResponseMax(stage, fixed));
        out.v[h][s] = BestResponseValueMax(stage, fixed);
      } else {
        policy.Set(h, s, BestResponseMin(stage, fixed));
        out.v[h][s] = BestResponseValueMin(stage, fixed);
      }
    }
  }
  out.initial = mdp.rho().weights().dot(out.v[0]);
  return {std::move(policy), std::move(out)};
}

MarkovEquilibrium SolveTrueNeMarkov(const LinearMDP& mdp, const MarkovRegularization& reg,
                                    double tol, const NeOptions& stage_options) {
  CheckShapes(mdp, reg);
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  NeOptions options = stage_options;
  options.tol = tol / (static_cast<double>(mdp.horizon()) * mdp.num_states());
  MarkovPolicy mu = reg.mu_ref;
  MarkovPolicy nu = reg.nu_ref;
  MarkovValues out = EmptyValues(mdp);
  int max_iters = 0;
  for (int h = mdp.horizon() - 1; h >= 0; --h) {
    out.q[h] = mdp.rewards(h) + mdp.transitions(h) * out.v[h + 1];
    for (int s = 0; s < mdp.num_states(); ++s) {
      const NESolution ne = SolveNE(StageGame(mdp, reg, out.q[h], h, s), options);
      mu.Set(h, s, ne.pair().mu);
      nu.Set(h, s, ne.pair().nu);
      out.v[h][s] = ne.value();
      max_iters = std::max(max_iters, ne.iterations());
    }
  }
  out.initial = mdp.rho().weights().dot(out.v[0]);
  return {std::move(mu), std::move(nu), std::move(out), max_iters};
}

double DualGapMarkov(const LinearMDP& mdp, const MarkovRegularization& reg,
                     const MarkovPolicy& mu, const MarkovPolicy& nu) {
  const double upper = BestResponseMarkov(mdp, reg, nu, Side::kMax).values.initial;
  const double lower = BestResponseMarkov(mdp, reg, mu, Side::kMin).values.initial;
  return upper - lower;
}

}  // namespace klgame
