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

// Super-optimistic best-response sampling for KL-regularized zero-sum Markov
// games with linear function approximation.

#ifndef KLGAME_SOMG_H_
#define KLGAME_SOMG_H_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "klgame/linear_mdp.h"
#include "klgame/markov_oracles.h"
#include "klgame/matrix_game.h"
#include "klgame/regret_trace.h"
#include "klgame/ridge.h"

namespace klgame {

enum class Regime { kRegularized, kUnregularized };

inline Regime RegimeFor(double beta) {
  return beta > 0.0 ? Regime::kRegularized : Regime::kUnregularized;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double Clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
  bool Contains(double x, double slack = 0.0) const {
    return x >= lo - slack && x <= hi + slack;
  }
};

// Per-step clamp intervals for the MSE, plus and minus Q estimates. With
// 0-based step h and n = H - h:
//   regularized:    mse [0, n], plus [0, 3n^2], minus [-3n^2, n]
//   unregularized:  mse [0, n], plus [0, 2n],   minus [-2n, n]
class ProjectionSpec {
 public:
  static ProjectionSpec ForRegime(Regime regime, int horizon);

  // Spec for the role-swapped game with negated rewards: every interval
  // [lo, hi] becomes [-hi, -lo] and plus and minus trade places.
  ProjectionSpec Mirrored() const;

  int horizon() const { return static_cast<int>(mse_.size()); }
  const Interval& mse(int h) const { return mse_[h]; }
  const Interval& plus(int h) const { return plus_[h]; }
  const Interval& minus(int h) const { return minus_[h]; }

 private:
  std::vector<Interval> mse_;
  std::vector<Interval> plus_;
  std::vector<Interval> minus_;
};

struct BonusParameters {
  double mse = 0.0;
  double opt = 0.0;
};

// eta_mse = s_mse sqrt(d) H sqrt(log(16 T / delta));
// eta_opt = s_opt d H^2 sqrt(log(16 d T / delta)), with H in place of H^2 when
// unregularized.
BonusParameters ComputeBonusParameters(int dim, int horizon, std::int64_t episodes,
                                       double delta, Regime regime, double scale_mse,
                                       double scale_opt);

struct SuperoptimisticBonus {
  double mse = 0.0;
  double opt = 0.0;
  double sup = 0.0;  // opt + 2 mse
};

// Known features over (s, i, j).
class FeatureMap {
 public:
  FeatureMap(int states, int max_actions, int min_actions, Eigen::MatrixXd table);
  static FeatureMap FromMdp(const LinearMDP& mdp);

  int num_states() const { return states_; }
  int num_max_actions() const { return max_actions_; }
  int num_min_actions() const { return min_actions_; }
  int num_cells() const { return static_cast<int>(table_.rows()); }
  int dim() const { return static_cast<int>(table_.cols()); }
  int Cell(int s, int i, int j) const { return (s * max_actions_ + i) * min_actions_ + j; }
  const Eigen::MatrixXd& table() const { return table_; }
  Eigen::VectorXd feature(int cell) const { return table_.row(cell).transpose(); }
  // U x V block of a cell-indexed vector at state s.
  Eigen::MatrixXd StageBlock(const Eigen::VectorXd& by_cell, int s) const;

  // Features of the game with the two players' roles exchanged.
  FeatureMap Swapped() const;

 private:
  int states_;
  int max_actions_;
  int min_actions_;
  Eigen::MatrixXd table_;
};

struct SomgKnobs {
  double lambda = 1.0;
  double delta = 0.05;
  double scale_mse = 1.0;
  double scale_opt = 1.0;
  // Planned number of episodes T entering the bonus parameters.
  std::int64_t episodes = 1;
  NeOptions stage_ne;
  // Defaults to ForRegime(RegimeFor(beta), H).
  std::optional<ProjectionSpec> projection;
};

// Output of one backward sweep. Steps are 0-based; Q and bonus tables are
// cell-indexed, value tables state-indexed with v[H] == 0.
struct SomgSweep {
  std::vector<Eigen::VectorXd> theta_bar{}, theta_plus{}, theta_minus{};
  std::vector<Eigen::VectorXd> q_bar{}, q_plus{}, q_minus{};
  std::vector<Eigen::VectorXd> b_mse{}, b_opt{}, b_sup{};
  std::vector<Eigen::VectorXd> v_bar{}, v_plus{}, v_minus{};
  // beta KL(mu_h || mu_ref) and beta KL(nu_h || nu_ref) per state.
  std::vector<Eigen::VectorXd> kl_mu{}, kl_nu{};
  MarkovPolicy mu, nu, mu_tilde, nu_tilde;
  int max_stage_iterations = 0;
};

class SomgLearner {
 public:
  SomgLearner(FeatureMap features, int horizon, MarkovRegularization reg,
              const SomgKnobs& knobs);

  SuperoptimisticBonus Bonus(int h, const Eigen::Ref<const Eigen::VectorXd>& phi) const;

  // Sigma_h^{-1} sum phi (r + V_{h+1}(s')) over every absorbed step-h tuple.
  Eigen::VectorXd BellmanRegress(int h, const Eigen::VectorXd& next_values) const;

  // Throws NoConvergence when a stage solve fails.
  SomgSweep BackwardSweep();

  // Adds the step-h tuple of `tau` to step h's statistics, for every h.
  void Absorb(const Trajectory& tau);
  // Records an episode's two trajectories and absorbs both.
  void AbsorbEpisode(Trajectory plus, Trajectory minus);

  int horizon() const { return horizon_; }
  const FeatureMap& features() const { return features_; }
  const MarkovRegularization& regularization() const { return reg_; }
  const ProjectionSpec& projection() const { return projection_; }
  const BonusParameters& bonus_parameters() const { return eta_; }
  const RidgeRegression& ridge(int h) const { return ridge_[h]; }
  std::int64_t dataset_count(int h) const { return ridge_[h].count(); }
  const std::vector<Trajectory>& dataset_plus() const { return plus_; }
  const std::vector<Trajectory>& dataset_minus() const { return minus_; }

 private:
  FeatureMap features_;
  int horizon_;
  MarkovRegularization reg_;
  SomgKnobs knobs_;
  ProjectionSpec projection_;
  BonusParameters eta_;
  std::vector<RidgeRegression> ridge_;
  // Per step, sum of phi e_{s'}^T so regression targets need no data rescan.
  std::vector<Eigen::MatrixXd> next_state_moments_;
  std::vector<Trajectory> plus_;
  std::vector<Trajectory> minus_;
  std::vector<std::optional<PolicyPair>> warm_start_;
};

struct SomgRunConfig {
  TabularMdpSpec environment;
  // Overrides `environment` when set.
  std::optional<LinearMDP> mdp;
  double beta = 1.0;
  std::int64_t episodes = 1000;
  double lambda = 1.0;
  double delta = 0.05;
  double scale_mse = 1.0;
  double scale_opt = 1.0;
  int eval_stride = 1;
  NeOptions stage_ne;
  std::uint64_t seed = 0;
};

// Runs the learner for `episodes` episodes. Evaluated episodes record the exact
// dual gap of (mu_t, nu_t). Diagnostics count, over every (t, h, s, i, j):
// Q+ < Qbar, Q+ < Q^{mu', nu_t} for mu' in {mu_t, mu~_t, mu-dagger_t}, and
// 2|Q+ - Qbar| < |Q+ - Q^{mu_t, nu_t}|; plus hard structural violations of the
// value ranges, bonus identity, and dataset size. Throws RunAborted with the
// partial trace when a stage solve fails.
RegretTrace RunSomg(const LinearMDP& mdp, double beta, const SomgKnobs& knobs,
                    std::int64_t episodes, int eval_stride, std::uint64_t seed);

RegretTrace RunSomg(const SomgRunConfig& config);

}  // namespace klgame

#endif  // KLGAME_SOMG_H_
