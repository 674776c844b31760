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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "klgame/errors.h"
#include "klgame/omg.h"
#include "klgame/random.h"
#include "test_support.h"

namespace klgame {
namespace {

FeatureMap OneHot(int states, int max_actions, int min_actions) {
  const int cells = states * max_actions * min_actions;
  return FeatureMap(states, max_actions, min_actions, Eigen::MatrixXd::Identity(cells, cells));
}

MarkovRegularization UniformReg(int horizon, int states, int max_actions, int min_actions,
                                double beta) {
  return {beta, MarkovPolicy::Uniform(horizon, states, max_actions),
          MarkovPolicy::Uniform(horizon, states, min_actions)};
}

TEST(ProjectionSpecTest, RegimeIntervals) {
  const ProjectionSpec reg = ProjectionSpec::ForRegime(Regime::kRegularized, 3);
  EXPECT_EQ(reg.mse(0).hi, 3.0);
  EXPECT_EQ(reg.plus(0).hi, 27.0);
  EXPECT_EQ(reg.minus(0).lo, -27.0);
  EXPECT_EQ(reg.minus(0).hi, 3.0);
  EXPECT_EQ(reg.plus(2).hi, 3.0);
  const ProjectionSpec hard = ProjectionSpec::ForRegime(Regime::kUnregularized, 3);
  EXPECT_EQ(hard.plus(1).hi, 4.0);
  EXPECT_EQ(hard.minus(1).lo, -4.0);
  EXPECT_EQ(hard.minus(1).hi, 2.0);
  EXPECT_EQ(hard.minus(1).Clamp(5.0), 2.0);
  EXPECT_EQ(hard.minus(1).Clamp(-9.0), -4.0);

  const ProjectionSpec mirrored = reg.Mirrored();
  EXPECT_EQ(mirrored.mse(0).lo, -3.0);
  EXPECT_EQ(mirrored.mse(0).hi, 0.0);
  EXPECT_EQ(mirrored.plus(0).lo, -3.0);
  EXPECT_EQ(mirrored.plus(0).hi, 27.0);
  EXPECT_EQ(mirrored.minus(0).lo, -27.0);
  EXPECT_EQ(mirrored.minus(0).hi, 0.0);
}

TEST(BonusParametersTest, Examples) {
  const BonusParameters r = ComputeBonusParameters(4, 3, 1000, 0.1, Regime::kRegularized, 1, 1);
  EXPECT_NEAR(r.mse, 2.0 * 3.0 * std::sqrt(std::log(160000.0)), 1e-12);
  EXPECT_NEAR(r.mse, 20.7698, 1e-4);
  const BonusParameters u = ComputeBonusParameters(4, 3, 1000, 0.1, Regime::kUnregularized, 1, 1);
  EXPECT_DOUBLE_EQ(r.opt / u.opt, 3.0);
  EXPECT_EQ(r.mse, u.mse);
  const BonusParameters a = ComputeBonusParameters(1, 1, 500, 0.05, Regime::kRegularized, 1, 1);
  const BonusParameters b = ComputeBonusParameters(1, 1, 500, 0.05, Regime::kUnregularized, 1, 1);
  EXPECT_EQ(a.mse, b.mse);
  EXPECT_EQ(a.opt, b.opt);
  const BonusParameters scaled =
      ComputeBonusParameters(4, 3, 1000, 0.1, Regime::kRegularized, 0.5, 2.0);
  EXPECT_DOUBLE_EQ(scaled.mse, 0.5 * r.mse);
  EXPECT_DOUBLE_EQ(scaled.opt, 2.0 * r.opt);
  EXPECT_THROW(ComputeBonusParameters(4, 3, 1000, 0.1, Regime::kRegularized, -1, 1),
               InvalidArgument);
}

TEST(SuperoptimisticBonusTest, PriorAndRankOneShrinkage) {
  SomgKnobs knobs;
  knobs.episodes = 100;
  SomgLearner learner(OneHot(2, 2, 2), 2, UniformReg(2, 2, 2, 2, 1.0), knobs);
  const BonusParameters eta = learner.bonus_parameters();
  const Eigen::VectorXd phi = Eigen::VectorXd::Unit(8, 3);
  const SuperoptimisticBonus b0 = learner.Bonus(0, phi);
  EXPECT_DOUBLE_EQ(b0.mse, eta.mse);
  EXPECT_DOUBLE_EQ(b0.opt, eta.opt);
  EXPECT_DOUBLE_EQ(b0.sup, eta.opt + 2.0 * eta.mse);
  // Cell 3 is (s = 0, i = 1, j = 1).
  const Trajectory tau{{0, 1, 1, 0.5, 1}, {1, 0, 0, 0.25, 0}};
  for (int k = 1; k <= 20; ++k) {
    learner.Absorb(tau);
    const SuperoptimisticBonus bk = learner.Bonus(0, phi);
    EXPECT_NEAR(bk.sup, b0.sup / std::sqrt(1.0 + k), 1e-12 * b0.sup);
    EXPECT_NEAR(bk.sup - bk.opt, 2.0 * bk.mse, 1e-12 * bk.sup);
  }
  EXPECT_DOUBLE_EQ(learner.Bonus(1, Eigen::VectorXd::Unit(8, 3)).sup, b0.sup);
}

TEST(BellmanRegressTest, EmptyAndSingleVisit) {
  SomgKnobs knobs;
  knobs.lambda = 0.5;
  SomgLearner learner(OneHot(2, 2, 1), 2, UniformReg(2, 2, 2, 1, 1.0), knobs);
  const Eigen::Vector2d next_values(0.3, 0.9);
  EXPECT_TRUE(learner.BellmanRegress(0, next_values).isZero(0.0));
  EXPECT_TRUE(learner.BellmanRegress(1, next_values).isZero(0.0));
  // Step 0 visits cell (s=1, i=0, j=0) -> state 0; step 1 visits (0, 1, 0) -> state 1.
  learner.Absorb({{1, 0, 0, 0.4, 0}, {0, 1, 0, 0.8, 1}});
  const Eigen::VectorXd theta0 = learner.BellmanRegress(0, next_values);
  const Eigen::VectorXd theta1 = learner.BellmanRegress(1, next_values);
  EXPECT_NEAR(theta0[2], (0.4 + 0.3) / 1.5, 1e-15);
  EXPECT_NEAR(theta1[1], (0.8 + 0.9) / 1.5, 1e-15);
  EXPECT_EQ(theta0[0], 0.0);
  EXPECT_EQ(learner.BellmanRegress(0, next_values), theta0);
  EXPECT_THROW(learner.BellmanRegress(0, Eigen::Vector3d::Zero()), DimensionMismatch);
}

TEST(BackwardSweepTest, FirstEpisodeUsesPriorBonusAndReferences) {
  const int horizon = 3;
  SomgKnobs knobs;
  knobs.episodes = 50;
  std::mt19937_64 rng(1);
  const MarkovRegularization reg{0.5, testing::RandomPolicy(rng, horizon, 3, 2),
                                 testing::RandomPolicy(rng, horizon, 3, 2)};
  SomgLearner learner(OneHot(3, 2, 2), horizon, reg, knobs);
  const SomgSweep sweep = learner.BackwardSweep();
  const double b_sup = learner.bonus_parameters().opt + 2.0 * learner.bonus_parameters().mse;
  for (int h = 0; h < horizon; ++h) {
    EXPECT_TRUE(sweep.q_bar[h].isZero(0.0));
    const Interval plus = learner.projection().plus(h);
    for (int c = 0; c < 12; ++c) {
      EXPECT_DOUBLE_EQ(sweep.b_sup[h][c], b_sup);
      EXPECT_EQ(sweep.q_plus[h][c], plus.Clamp(b_sup));
    }
    for (int s = 0; s < 3; ++s) {
      EXPECT_LT(sweep.mu.at(h, s).L1Distance(reg.mu_ref.at(h, s)), 1e-9);
      EXPECT_LT(sweep.nu.at(h, s).L1Distance(reg.nu_ref.at(h, s)), 1e-9);
    }
  }
}

TEST(BackwardSweepTest, OneStepSweepMatchesOmgRound) {
  const int rows = 3;
  const int cols = 2;
  const int d = rows * cols;
  const double beta = 1.0;
  Eigen::MatrixXd payoff(rows, cols);
  payoff << 0.9, 0.1, 0.3, 0.6, 0.5, 0.45;
  const CellFeatures omg_features(rows, cols, Eigen::MatrixXd::Identity(d, d));
  OmgKnobs omg_knobs;
  omg_knobs.horizon = 1000;
  omg_knobs.bonus_scale = 0.3;
  OmgLearner omg(omg_features, beta, Simplex::Uniform(rows), Simplex::Uniform(cols), omg_knobs, 4);

  // Bonus scales chosen so that eta_opt + 2 eta_mse equals the OMG width.
  const BonusParameters base =
      ComputeBonusParameters(d, 1, 1000, 0.05, Regime::kRegularized, 1.0, 1.0);
  SomgKnobs knobs;
  knobs.episodes = 1000;
  knobs.scale_mse = 0.25 * omg.eta() / base.mse;
  knobs.scale_opt = 0.5 * omg.eta() / base.opt;
  SomgLearner somg(OneHot(1, rows, cols), 1, UniformReg(1, 1, rows, cols, beta), knobs);

  const auto query = [&](int i, int j) { return payoff(i, j); };
  for (int t = 0; t < 300; ++t) {
    const OmgRound round = omg.Step(query);
    somg.AbsorbEpisode({{0, round.plus.i, round.plus.j, round.plus.value, 0}},
                       {{0, round.minus.i, round.minus.j, round.minus.value, 0}});
  }
  const OmgRound round = omg.Step(query);
  const SomgSweep sweep = somg.BackwardSweep();
  ASSERT_LE(round.bonus.maxCoeff(), 1.0);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const int c = i * cols + j;
      EXPECT_NEAR(sweep.q_bar[0][c], round.estimate(i, j), 1e-12);
      EXPECT_NEAR(sweep.b_sup[0][c], round.bonus(i, j), 1e-12);
      EXPECT_NEAR(sweep.q_plus[0][c], round.estimate(i, j) + round.bonus(i, j), 1e-12);
      EXPECT_NEAR(sweep.q_minus[0][c], round.estimate(i, j) - round.bonus(i, j), 1e-12);
    }
  }
  EXPECT_LT(sweep.mu.at(0, 0).L1Distance(round.equilibrium.pair().mu), 1e-6);
  EXPECT_LT(sweep.nu.at(0, 0).L1Distance(round.equilibrium.pair().nu), 1e-6);
  EXPECT_LT(sweep.mu_tilde.at(0, 0).L1Distance(round.mu_tilde), 1e-6);
  EXPECT_LT(sweep.nu_tilde.at(0, 0).L1Distance(round.nu_tilde), 1e-6);
}

TEST(BackwardSweepTest, MirroredGameMirrorsEveryTable) {
  const int horizon = 2;
  const int states = 2;
  const int u = 3;
  const int v = 2;
  std::mt19937_64 rng(7);
  const MarkovRegularization reg{0.8, testing::RandomPolicy(rng, horizon, states, u),
                                 testing::RandomPolicy(rng, horizon, states, v)};
  const MarkovRegularization swapped{0.8, reg.nu_ref, reg.mu_ref};
  SomgKnobs knobs;
  knobs.episodes = 200;
  knobs.scale_mse = 0.05;
  knobs.scale_opt = 0.05;
  knobs.stage_ne.tol = 1e-13;
  knobs.stage_ne.residual_tol = 1e-11;
  SomgKnobs mirror_knobs = knobs;
  mirror_knobs.projection = ProjectionSpec::ForRegime(Regime::kRegularized, horizon).Mirrored();

  const FeatureMap features = OneHot(states, u, v);
  SomgLearner original(features, horizon, reg, knobs);
  SomgLearner mirror(features.Swapped(), horizon, swapped, mirror_knobs);

  const LinearMDP mdp = testing::RandomTabular(3, horizon, states, u, v);
  Rng sampler = MakeStream(2, StreamId::kPlusSampling);
  for (int t = 0; t < 40; ++t) {
    const Trajectory tau = SampleTrajectory(mdp, reg.mu_ref, reg.nu_ref, sampler);
    Trajectory flipped = tau;
    for (TransitionRecord& rec : flipped) {
      std::swap(rec.i, rec.j);
      rec.r = -rec.r;
    }
    original.AbsorbEpisode(tau, tau);
    mirror.AbsorbEpisode(flipped, flipped);
  }
  const SomgSweep a = original.BackwardSweep();
  const SomgSweep b = mirror.BackwardSweep();
  const FeatureMap& fb = mirror.features();
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < states; ++s) {
      EXPECT_NEAR(b.v_bar[h][s], -a.v_bar[h][s], 1e-9);
      EXPECT_NEAR(b.v_plus[h][s], -a.v_minus[h][s], 1e-9);
      EXPECT_NEAR(b.v_minus[h][s], -a.v_plus[h][s], 1e-9);
      EXPECT_LT(b.mu.at(h, s).L1Distance(a.nu.at(h, s)), 1e-8);
      EXPECT_LT(b.nu.at(h, s).L1Distance(a.mu.at(h, s)), 1e-8);
      EXPECT_LT(b.mu_tilde.at(h, s).L1Distance(a.nu_tilde.at(h, s)), 1e-8);
      EXPECT_LT(b.nu_tilde.at(h, s).L1Distance(a.mu_tilde.at(h, s)), 1e-8);
      for (int i = 0; i < u; ++i) {
        for (int j = 0; j < v; ++j) {
          const int ca = features.Cell(s, i, j);
          const int cb = fb.Cell(s, j, i);
          EXPECT_NEAR(b.q_bar[h][cb], -a.q_bar[h][ca], 1e-9);
          EXPECT_NEAR(b.q_plus[h][cb], -a.q_minus[h][ca], 1e-9);
          EXPECT_NEAR(b.q_minus[h][cb], -a.q_plus[h][ca], 1e-9);
        }
      }
    }
  }
}

TEST(SomgLearnerTest, DatasetCountsTrackEpisodes) {
  SomgKnobs knobs;
  SomgLearner learner(OneHot(2, 2, 2), 2, UniformReg(2, 2, 2, 2, 1.0), knobs);
  const Trajectory tau{{0, 0, 1, 0.5, 1}, {1, 1, 0, 0.2, 0}};
  for (int t = 1; t <= 5; ++t) {
    learner.AbsorbEpisode(tau, tau);
    EXPECT_EQ(learner.dataset_count(0), 2 * t);
    EXPECT_EQ(learner.dataset_count(1), 2 * t);
  }
  EXPECT_EQ(learner.dataset_plus().size(), 5u);
  EXPECT_THROW(learner.Absorb({{0, 0, 0, 0.0, 0}}), DimensionMismatch);
  EXPECT_THROW(learner.Absorb({{0, 2, 0, 0.0, 0}, {0, 0, 0, 0.0, 0}}), InvalidArgument);
}

TEST(RunSomgTest, StructuralInvariantsHold) {
  for (double beta : {0.0, 1.0}) {
    SomgRunConfig config;
    config.environment.seed = 2;
    config.beta = beta;
    config.episodes = 300;
    config.seed = 5;
    const RegretTrace trace = RunSomg(config);
    EXPECT_EQ(trace.diagnostic("structural_violations"), 0.0) << beta;
    EXPECT_EQ(trace.diagnostic("samples_per_step"), 600.0);
    ASSERT_EQ(trace.rows.size(), 300u);
    for (const TraceRow& row : trace.rows) EXPECT_GE(row.instant_gap, -1e-9);
  }
}

TEST(RunSomgTest, SingleMinActionReducesToSingleAgent) {
  SomgRunConfig config;
  config.environment.min_actions = 1;
  config.environment.seed = 4;
  config.episodes = 200;
  const RegretTrace trace = RunSomg(config);
  EXPECT_EQ(trace.rows.size(), 200u);
  EXPECT_EQ(trace.diagnostic("structural_violations"), 0.0);

  const LinearMDP mdp = MakeTabularMdp(config.environment);
  SomgLearner learner(FeatureMap::FromMdp(mdp), mdp.horizon(),
                      MarkovRegularization::Uniform(mdp, 1.0), SomgKnobs{});
  const SomgSweep sweep = learner.BackwardSweep();
  for (int h = 0; h < mdp.horizon(); ++h) {
    EXPECT_TRUE(sweep.kl_nu[h].isZero(0.0));
    for (int s = 0; s < mdp.num_states(); ++s) EXPECT_EQ(sweep.nu_tilde.at(h, s)[0], 1.0);
  }
}

TEST(RunSomgTest, BitIdenticalOnRepeat) {
  SomgRunConfig config;
  config.environment.seed = 6;
  config.episodes = 150;
  config.seed = 3;
  const RegretTrace a = RunSomg(config);
  const RegretTrace b = RunSomg(config);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (size_t k = 0; k < a.rows.size(); ++k) {
    EXPECT_EQ(a.rows[k].instant_gap, b.rows[k].instant_gap);
    EXPECT_EQ(a.rows[k].max_bonus, b.rows[k].max_bonus);
  }
}

TEST(RunSomgTest, DeterministicInstancePlateaus) {
  // Deterministic transitions: state s under (i, j) moves to (s + i + j) mod S.
  const int states = 2;
  const int horizon = 2;
  std::vector<Eigen::MatrixXd> kernels;
  std::vector<Eigen::VectorXd> rewards;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int h = 0; h < horizon; ++h) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(states * 4, states);
    Eigen::VectorXd r(states * 4);
    for (int s = 0; s < states; ++s) {
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          p((s * 2 + i) * 2 + j, (s + i + j) % states) = 1.0;
          r[(s * 2 + i) * 2 + j] = unit(rng);
        }
      }
    }
    kernels.push_back(p);
    rewards.push_back(r);
  }
  const LinearMDP mdp =
      MakeTabularMdpFromTables(states, 2, 2, kernels, rewards, Simplex::PointMass(states, 0));
  SomgKnobs knobs;
  const RegretTrace trace = RunSomg(mdp, 1.0, knobs, 10000, 1, 1);
  const double at_1e3 = trace.rows[999].cumulative_regret;
  const double at_1e4 = trace.rows.back().cumulative_regret;
  EXPECT_LE(at_1e4, 2.0 * at_1e3) << at_1e3 << " " << at_1e4;
  EXPECT_EQ(trace.diagnostic("structural_violations"), 0.0);
}

TEST(RunSomgTest, StageSolverFailureAborts) {
  SomgRunConfig config;
  config.episodes = 50;
  config.beta = 0.01;
  config.stage_ne.max_iters = 1;
  config.stage_ne.tol = 1e-15;
  EXPECT_THROW(RunSomg(config), RunAborted);
}

}  // namespace
}  // namespace klgame
