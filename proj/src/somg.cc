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

#include "klgame/somg.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "klgame/errors.h"
#include "klgame/random.h"

namespace klgame {
namespace {

constexpr double kOptimismSlack = 1e-9;
constexpr double kRangeSlack = 1e-6;

double Regularizer(double beta, const Simplex& p, const Simplex& ref) {
  return beta > 0.0 ? beta * KlDivergence(p, ref) : 0.0;
}

double StageValue(const Eigen::MatrixXd& q, const Simplex& mu, const Simplex& nu,
                  double beta, const Simplex& mu_ref, const Simplex& nu_ref) {
  return mu.weights().dot(q * nu.weights()) - Regularizer(beta, mu, mu_ref) +
         Regularizer(beta, nu, nu_ref);
}

}  // namespace

ProjectionSpec ProjectionSpec::ForRegime(Regime regime, int horizon) {
  if (horizon < 1) throw InvalidArgument("horizon must be >= 1");
  ProjectionSpec spec;
  for (int h = 0; h < horizon; ++h) {
    const double n = horizon - h;
    const double ceiling = regime == Regime::kRegularized ? 3.0 * n * n : 2.0 * n;
    spec.mse_.push_back({0.0, n});
    spec.plus_.push_back({0.0, ceiling});
    spec.minus_.push_back({-ceiling, n});
  }
  return spec;
}

ProjectionSpec ProjectionSpec::Mirrored() const {
  const auto flip = [](const Interval& x) { return Interval{-x.hi, -x.lo}; };
  ProjectionSpec out;
  for (int h = 0; h < horizon(); ++h) {
    out.mse_.push_back(flip(mse_[h]));
    out.plus_.push_back(flip(minus_[h]));
    out.minus_.push_back(flip(plus_[h]));
  }
  return out;
}

BonusParameters ComputeBonusParameters(int dim, int horizon, std::int64_t episodes,
                                       double delta, Regime regime, double scale_mse,
                                       double scale_opt) {
  if (dim < 1 || horizon < 1) throw InvalidArgument("dimension and horizon must be >= 1");
  if (episodes < 1) throw InvalidArgument("episode count must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  if (!(scale_mse >= 0.0) || !(scale_opt >= 0.0)) {
    throw InvalidArgument("bonus scales must be nonnegative");
  }
  const double d = dim;
  const double h = horizon;
  const double t = static_cast<double>(episodes);
  BonusParameters out;
  out.mse = scale_mse * std::sqrt(d) * h * std::sqrt(std::log(16.0 * t / delta));
  const double h_power = regime == Regime::kRegularized ? h * h : h;
  out.opt = scale_opt * d * h_power * std::sqrt(std::log(16.0 * d * t / delta));
  return out;
}

FeatureMap::FeatureMap(int states, int max_actions, int min_actions, Eigen::MatrixXd table)
    : states_(states),
      max_actions_(max_actions),
      min_actions_(min_actions),
      table_(std::move(table)) {
  if (states < 1 || max_actions < 1 || min_actions < 1) {
    throw InvalidArgument("feature map sizes must be >= 1");
  }
  if (table_.rows() != states * max_actions * min_actions || table_.cols() == 0) {
    throw DimensionMismatch("feature table must have one row per (s, i, j)");
  }
}

FeatureMap FeatureMap::FromMdp(const LinearMDP& mdp) {
  return FeatureMap(mdp.num_states(), mdp.num_max_actions(), mdp.num_min_actions(),
                    mdp.features());
}

Eigen::MatrixXd FeatureMap::StageBlock(const Eigen::VectorXd& by_cell, int s) const {
  const int block = max_actions_ * min_actions_;
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(by_cell.data() + s * block,
                                                          max_actions_, min_actions_);
}

FeatureMap FeatureMap::Swapped() const {
  Eigen::MatrixXd table(table_.rows(), table_.cols());
  for (int s = 0; s < states_; ++s) {
    for (int i = 0; i < max_actions_; ++i) {
      for (int j = 0; j < min_actions_; ++j) {
        table.row((s * min_actions_ + j) * max_actions_ + i) = table_.row(Cell(s, i, j));
      }
    }
  }
  return FeatureMap(states_, min_actions_, max_actions_, std::move(table));
}

SomgLearner::SomgLearner(FeatureMap features, int horizon, MarkovRegularization reg,
                         const SomgKnobs& knobs)
    : features_(std::move(features)),
      horizon_(horizon),
      reg_(std::move(reg)),
      knobs_(knobs),
      projection_(knobs.projection.value_or(
          ProjectionSpec::ForRegime(RegimeFor(reg_.beta), horizon))),
      eta_(ComputeBonusParameters(features_.dim(), horizon, knobs.episodes, knobs.delta,
                                  RegimeFor(reg_.beta), knobs.scale_mse, knobs.scale_opt)) {
  if (!(reg_.beta >= 0.0)) throw InvalidArgument("beta must be nonnegative");
  if (projection_.horizon() != horizon) throw DimensionMismatch("projection horizon");
  const auto check = [&](const MarkovPolicy& p, int actions) {
    if (p.horizon() != horizon || p.num_states() != features_.num_states() ||
        p.num_actions() != actions) {
      throw DimensionMismatch("reference policy does not match the feature map");
    }
  };
  check(reg_.mu_ref, features_.num_max_actions());
  check(reg_.nu_ref, features_.num_min_actions());
  for (int h = 0; h < horizon; ++h) {
    ridge_.emplace_back(features_.dim(), knobs.lambda);
    next_state_moments_.push_back(
        Eigen::MatrixXd::Zero(features_.dim(), features_.num_states()));
  }
  warm_start_.assign(static_cast<size_t>(horizon) * features_.num_states(), std::nullopt);
}

SuperoptimisticBonus SomgLearner::Bonus(int h,
                                        const Eigen::Ref<const Eigen::VectorXd>& phi) const {
  const double width = ridge_[h].Mahalanobis(phi);
  SuperoptimisticBonus out;
  out.mse = eta_.mse * width;
  out.opt = eta_.opt * width;
  out.sup = out.opt + 2.0 * out.mse;
  return out;
}

Eigen::VectorXd SomgLearner::BellmanRegress(int h, const Eigen::VectorXd& next_values) const {
  if (next_values.size() != features_.num_states()) {
    throw DimensionMismatch("next-step values must be indexed by state");
  }
  return ridge_[h].Solve(ridge_[h].xty() + next_state_moments_[h] * next_values);
}

SomgSweep SomgLearner::BackwardSweep() {
  const int num_states = features_.num_states();
  const int cells = features_.num_cells();
  const double beta = reg_.beta;
  SomgSweep out{.mu = reg_.mu_ref,
                .nu = reg_.nu_ref,
                .mu_tilde = reg_.mu_ref,
                .nu_tilde = reg_.nu_ref};
  const auto per_step = [&](int size, int count) {
    return std::vector<Eigen::VectorXd>(count, Eigen::VectorXd::Zero(size));
  };
  out.theta_bar = out.theta_plus = out.theta_minus = per_step(features_.dim(), horizon_);
  out.q_bar = out.q_plus = out.q_minus = per_step(cells, horizon_);
  out.b_mse = out.b_opt = out.b_sup = per_step(cells, horizon_);
  out.v_bar = out.v_plus = out.v_minus = per_step(num_states, horizon_ + 1);
  out.kl_mu = out.kl_nu = per_step(num_states, horizon_);

  for (int h = horizon_ - 1; h >= 0; --h) {
    out.theta_bar[h] = BellmanRegress(h, out.v_bar[h + 1]);
    out.theta_plus[h] = BellmanRegress(h, out.v_plus[h + 1]);
    out.theta_minus[h] = BellmanRegress(h, out.v_minus[h + 1]);
    const Eigen::VectorXd raw_bar = features_.table() * out.theta_bar[h];
    const Eigen::VectorXd raw_plus = features_.table() * out.theta_plus[h];
    const Eigen::VectorXd raw_minus = features_.table() * out.theta_minus[h];
    for (int c = 0; c < cells; ++c) {
      const SuperoptimisticBonus b = Bonus(h, features_.table().row(c).transpose());
      out.b_mse[h][c] = b.mse;
      out.b_opt[h][c] = b.opt;
      out.b_sup[h][c] = b.sup;
      out.q_bar[h][c] = projection_.mse(h).Clamp(raw_bar[c]);
      out.q_plus[h][c] = projection_.plus(h).Clamp(raw_plus[c] + b.sup);
      out.q_minus[h][c] = projection_.minus(h).Clamp(raw_minus[c] - b.sup);
    }

    for (int s = 0; s < num_states; ++s) {
      const Simplex& mu_ref = reg_.mu_ref.at(h, s);
      const Simplex& nu_ref = reg_.nu_ref.at(h, s);
      const KLMatrixGame stage(features_.StageBlock(out.q_bar[h], s), beta, mu_ref, nu_ref);
      NeOptions options = knobs_.stage_ne;
      std::optional<PolicyPair>& warm = warm_start_[h * num_states + s];
      if (warm) options.init = warm;
      const NESolution ne = SolveNE(stage, options);
      warm = ne.pair();
      out.max_stage_iterations = std::max(out.max_stage_iterations, ne.iterations());
      const Simplex& mu = ne.pair().mu;
      const Simplex& nu = ne.pair().nu;

      const Eigen::MatrixXd q_plus = features_.StageBlock(out.q_plus[h], s);
      const Eigen::MatrixXd q_minus = features_.StageBlock(out.q_minus[h], s);
      Simplex mu_tilde = GibbsTilt(mu_ref, q_plus * nu.weights(), beta);
      Simplex nu_tilde = GibbsTilt(nu_ref, -(q_minus.transpose() * mu.weights()), beta);

      out.kl_mu[h][s] = Regularizer(beta, mu, mu_ref);
      out.kl_nu[h][s] = Regularizer(beta, nu, nu_ref);
      out.v_bar[h][s] = StageValue(stage.payoff(), mu, nu, beta, mu_ref, nu_ref);
      out.v_plus[h][s] = StageValue(q_plus, mu_tilde, nu, beta, mu_ref, nu_ref);
      out.v_minus[h][s] = StageValue(q_minus, mu, nu_tilde, beta, mu_ref, nu_ref);
      out.mu.Set(h, s, mu);
      out.nu.Set(h, s, nu);
      out.mu_tilde.Set(h, s, std::move(mu_tilde));
      out.nu_tilde.Set(h, s, std::move(nu_tilde));
    }
  }
  return out;
}

void SomgLearner::Absorb(const Trajectory& tau) {
  if (static_cast<int>(tau.size()) != horizon_) {
    throw DimensionMismatch("trajectory length must equal the horizon");
  }
  for (int h = 0; h < horizon_; ++h) {
    const TransitionRecord& rec = tau[h];
    if (rec.s < 0 || rec.s >= features_.num_states() || rec.next < 0 ||
        rec.next >= features_.num_states() || rec.i < 0 ||
        rec.i >= features_.num_max_actions() || rec.j < 0 ||
        rec.j >= features_.num_min_actions()) {
      throw InvalidArgument("trajectory record outside the game");
    }
    const Eigen::VectorXd phi = features_.feature(features_.Cell(rec.s, rec.i, rec.j));
    ridge_[h].Absorb(phi, rec.r);
    next_state_moments_[h].col(rec.next) += phi;
  }
}

void SomgLearner::AbsorbEpisode(Trajectory plus, Trajectory minus) {
  Absorb(plus);
  Absorb(minus);
  plus_.push_back(std::move(plus));
  minus_.push_back(std::move(minus));
}

RegretTrace RunSomg(const LinearMDP& mdp, double beta, const SomgKnobs& knobs,
                    std::int64_t episodes, int eval_stride, std::uint64_t seed) {
  if (episodes < 1) throw InvalidArgument("episodes must be >= 1");
  if (eval_stride < 1) throw InvalidArgument("evaluation stride must be >= 1");
  const MarkovRegularization reg = MarkovRegularization::Uniform(mdp, beta);
  SomgKnobs run_knobs = knobs;
  run_knobs.episodes = episodes;
  SomgLearner learner(FeatureMap::FromMdp(mdp), mdp.horizon(), reg, run_knobs);
  Rng plus_rng = MakeStream(seed, StreamId::kPlusSampling);
  Rng minus_rng = MakeStream(seed, StreamId::kMinusSampling);

  const int horizon = mdp.horizon();
  const int states = mdp.num_states();
  const int cells = mdp.num_cells();
  const Regime regime = RegimeFor(beta);

  RegretTrace trace;
  std::int64_t mse_violations = 0;
  std::int64_t mu_violations = 0;
  std::int64_t mu_tilde_violations = 0;
  std::int64_t mu_dagger_violations = 0;
  std::int64_t gap_violations = 0;
  std::int64_t structural_violations = 0;
  std::int64_t episodes_with_violation = 0;
  for (std::int64_t t = 1; t <= episodes; ++t) {
    SomgSweep sweep = [&] {
      try {
        return learner.BackwardSweep();
      } catch (const NoConvergence& e) {
        throw RunAborted("episode " + std::to_string(t) + ": " + e.what(), trace);
      }
    }();

    const MarkovValues on_policy = EvaluatePair(mdp, reg, sweep.mu, sweep.nu);
    const MarkovValues tilted = EvaluatePair(mdp, reg, sweep.mu_tilde, sweep.nu);
    const MarkovBestResponse dagger = BestResponseMarkov(mdp, reg, sweep.nu, Side::kMax);

    bool violated = false;
    double max_bonus = 0.0;
    for (int h = 0; h < horizon; ++h) {
      const double n = horizon - h;
      for (int c = 0; c < cells; ++c) {
        const double qp = sweep.q_plus[h][c];
        const double qb = sweep.q_bar[h][c];
        const bool below_mse = qp < qb - kOptimismSlack;
        const bool below_mu = qp < on_policy.q[h][c] - kOptimismSlack;
        const bool below_tilde = qp < tilted.q[h][c] - kOptimismSlack;
        const bool below_dagger = qp < dagger.values.q[h][c] - kOptimismSlack;
        const bool gap_broken =
            2.0 * std::abs(qp - qb) < std::abs(qp - on_policy.q[h][c]) - kOptimismSlack;
        mse_violations += below_mse;
        mu_violations += below_mu;
        mu_tilde_violations += below_tilde;
        mu_dagger_violations += below_dagger;
        gap_violations += gap_broken;
        violated = violated || below_mse || below_dagger || gap_broken;

        const double bs = sweep.b_sup[h][c];
        const double identity_error = std::abs((bs - sweep.b_opt[h][c]) - 2.0 * sweep.b_mse[h][c]);
        const bool bad_bonus = identity_error > 4.0 * std::numeric_limits<double>::epsilon() * bs ||
                               sweep.b_mse[h][c] < 0.0 || sweep.b_opt[h][c] < 0.0;
        const bool bad_q = !Interval{0.0, n}.Contains(qb, kRangeSlack);
        structural_violations += bad_bonus + bad_q;
        max_bonus = std::max(max_bonus, bs);
      }
      const double plus_ceiling = regime == Regime::kRegularized ? 3.0 * n * n + n : 2.0 * n;
      for (int s = 0; s < states; ++s) {
        structural_violations += !Interval{0.0, n}.Contains(sweep.v_bar[h][s], kRangeSlack);
        structural_violations += !Interval{0.0, n}.Contains(sweep.kl_mu[h][s], kRangeSlack);
        structural_violations += !Interval{0.0, n}.Contains(sweep.kl_nu[h][s], kRangeSlack);
        structural_violations +=
            !Interval{0.0, plus_ceiling}.Contains(sweep.v_plus[h][s], kRangeSlack);
      }
      structural_violations += learner.dataset_count(h) != 2 * (t - 1);
    }
    episodes_with_violation += violated;

    if (t == 1 || t % eval_stride == 0 || t == episodes) {
      const double gap = DualGapMarkov(mdp, reg, sweep.mu, sweep.nu);
      trace.Append(t, gap, violated, max_bonus, sweep.max_stage_iterations);
    }

    Trajectory plus = SampleTrajectory(mdp, sweep.mu_tilde, sweep.nu, plus_rng);
    Trajectory minus = SampleTrajectory(mdp, sweep.mu, sweep.nu_tilde, minus_rng);
    learner.AbsorbEpisode(std::move(plus), std::move(minus));
  }
  for (int h = 0; h < horizon; ++h) {
    structural_violations += learner.dataset_count(h) != 2 * episodes;
  }

  const double checks =
      static_cast<double>(episodes) * static_cast<double>(horizon) * static_cast<double>(cells);
  trace.SetDiagnostic("eta_mse", learner.bonus_parameters().mse);
  trace.SetDiagnostic("eta_opt", learner.bonus_parameters().opt);
  trace.SetDiagnostic("optimism_mse_violation_rate", mse_violations / checks);
  trace.SetDiagnostic("optimism_mu_violation_rate", mu_violations / checks);
  trace.SetDiagnostic("optimism_mu_tilde_violation_rate", mu_tilde_violations / checks);
  trace.SetDiagnostic("optimism_best_response_violation_rate", mu_dagger_violations / checks);
  trace.SetDiagnostic("superoptimistic_gap_violation_rate", gap_violations / checks);
  trace.SetDiagnostic("optimism_violation_rate",
                      episodes_with_violation / static_cast<double>(episodes));
  trace.SetDiagnostic("structural_violations", static_cast<double>(structural_violations));
  trace.SetDiagnostic("samples_per_step", static_cast<double>(learner.dataset_count(0)));
  return trace;
}

RegretTrace RunSomg(const SomgRunConfig& config) {
  const LinearMDP mdp = config.mdp ? *config.mdp : MakeTabularMdp(config.environment);
  SomgKnobs knobs;
  knobs.lambda = config.lambda;
  knobs.delta = config.delta;
  knobs.scale_mse = config.scale_mse;
  knobs.scale_opt = config.scale_opt;
  knobs.stage_ne = config.stage_ne;
  return RunSomg(mdp, config.beta, knobs, config.episodes, config.eval_stride, config.seed);
}

}  // namespace klgame
