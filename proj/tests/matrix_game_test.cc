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
#include <random>

#include <gtest/gtest.h>

#include "klgame/errors.h"
#include "test_support.h"

namespace klgame {
namespace {

using testing::RandomMatrix;
using testing::RandomSimplex;

Eigen::MatrixXd Pennies() {
  Eigen::MatrixXd a(2, 2);
  a << 1, -1, -1, 1;
  return a;
}

Eigen::MatrixXd Corner() {
  Eigen::MatrixXd a(2, 2);
  a << 1, 0, 0, 0;
  return a;
}

KLMatrixGame RandomGame(std::mt19937_64& rng, int m, int n, double beta) {
  return KLMatrixGame(RandomMatrix(rng, m, n), beta, RandomSimplex(rng, m), RandomSimplex(rng, n));
}

TEST(KLMatrixGameTest, Validation) {
  const Simplex u2 = Simplex::Uniform(2);
  EXPECT_THROW(KLMatrixGame(Pennies(), -1.0, u2, u2), InvalidArgument);
  EXPECT_THROW(KLMatrixGame(Pennies(), 1.0, Simplex::PointMass(2, 0), u2), InvalidArgument);
  EXPECT_NO_THROW(KLMatrixGame(Pennies(), 0.0, Simplex::PointMass(2, 0), u2));
  EXPECT_THROW(KLMatrixGame(Pennies(), 1.0, Simplex::Uniform(3), u2), DimensionMismatch);
  Eigen::MatrixXd bad = Pennies();
  bad(0, 0) = std::nan("");
  EXPECT_THROW(KLMatrixGame(bad, 1.0, u2, u2), InvalidArgument);
}

TEST(PayoffValueTest, Examples) {
  const Simplex u2 = Simplex::Uniform(2);
  for (double beta : {0.0, 0.3, 2.0}) {
    const auto zero = KLMatrixGame::WithUniformReferences(Eigen::MatrixXd::Zero(2, 3), beta);
    EXPECT_EQ(PayoffValue(zero, {zero.mu_ref(), zero.nu_ref()}), 0.0);
  }
  const auto pennies = KLMatrixGame::WithUniformReferences(Pennies(), 1.0);
  EXPECT_NEAR(PayoffValue(pennies, {u2, u2}), 0.0, 1e-15);
  const auto corner = KLMatrixGame::WithUniformReferences(Corner(), 1.0);
  const Simplex e0 = Simplex::PointMass(2, 0);
  EXPECT_NEAR(PayoffValue(corner, {e0, e0}), 1.0, 1e-15);
}

TEST(BestResponseTest, Examples) {
  const auto zero = KLMatrixGame::WithUniformReferences(Eigen::MatrixXd::Zero(3, 2), 1.0);
  EXPECT_NEAR(BestResponseMax(zero, Simplex::Uniform(2)).L1Distance(zero.mu_ref()), 0.0, 1e-15);
  EXPECT_NEAR(BestResponseMin(zero, Simplex::Uniform(3)).L1Distance(zero.nu_ref()), 0.0, 1e-15);
  EXPECT_NEAR(BestResponseValueMax(zero, zero.nu_ref()), 0.0, 1e-15);

  const auto corner = KLMatrixGame::WithUniformReferences(Corner(), 1.0);
  const Simplex e0 = Simplex::PointMass(2, 0);
  const Simplex br = BestResponseMax(corner, e0);
  EXPECT_NEAR(br[0], 0.731059, 1e-6);
  EXPECT_NEAR(br[1], 0.268941, 1e-6);
  const double e = std::exp(1.0);
  EXPECT_NEAR(BestResponseValueMax(corner, e0), std::log((e + 1.0) / 2.0) + std::log(2.0), 1e-12);
  EXPECT_NEAR(BestResponseValueMax(corner, e0), 1.313262, 1e-6);

  const auto hard = KLMatrixGame::WithUniformReferences(Corner(), 0.0);
  EXPECT_EQ(BestResponseMax(hard, e0)[0], 1.0);
}

TEST(BestResponseTest, AntisymmetricGameValuesNegate) {
  Eigen::MatrixXd a(3, 3);
  a << 0, 1, -2, -1, 0, 0.5, 2, -0.5, 0;
  const auto game = KLMatrixGame::WithUniformReferences(a, 0.7);
  EXPECT_NEAR(BestResponseValueMin(game, Simplex::Uniform(3)),
              -BestResponseValueMax(game, Simplex::Uniform(3)), 1e-12);
}

TEST(BestResponseTest, DominatesRandomPoliciesAndIsExact) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto game = RandomGame(rng, 2 + trial % 4, 2 + trial % 3, 0.1 * (trial % 5));
    const Simplex nu = RandomSimplex(rng, game.num_cols());
    const Simplex mu = RandomSimplex(rng, game.num_rows());
    const double vmax = BestResponseValueMax(game, nu);
    const double vmin = BestResponseValueMin(game, mu);
    EXPECT_NEAR(PayoffValue(game, {BestResponseMax(game, nu), nu}), vmax, 1e-9);
    EXPECT_NEAR(PayoffValue(game, {mu, BestResponseMin(game, mu)}), vmin, 1e-9);
    for (int k = 0; k < 100; ++k) {
      EXPECT_GE(vmax, PayoffValue(game, {RandomSimplex(rng, game.num_rows()), nu}) - 1e-12);
      EXPECT_LE(vmin, PayoffValue(game, {mu, RandomSimplex(rng, game.num_cols())}) + 1e-12);
    }
  }
}

TEST(BestResponseTest, MinValueMatchesGridOn2x2) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto game = RandomGame(rng, 2, 2, 0.5);
    const Simplex mu = RandomSimplex(rng, 2);
    const double grid = -testing::GridMaximize(2, [&](const Eigen::VectorXd& nu) {
      return -(mu.weights().dot(game.payoff() * nu) -
               game.beta() * testing::DirectKl(mu.weights(), game.mu_ref().weights()) +
               game.beta() * testing::DirectKl(nu, game.nu_ref().weights()));
    });
    EXPECT_NEAR(BestResponseValueMin(game, mu), grid, 1e-5);
  }
}

TEST(DualGapTest, Examples) {
  const Simplex u2 = Simplex::Uniform(2);
  for (double beta : {0.0, 0.5, 3.0}) {
    const auto game = KLMatrixGame::WithUniformReferences(Pennies(), beta);
    EXPECT_NEAR(DualGap(game, {u2, u2}), 0.0, 1e-12);
  }
  const auto hard = KLMatrixGame::WithUniformReferences(Pennies(), 0.0);
  const Simplex e0 = Simplex::PointMass(2, 0);
  EXPECT_NEAR(DualGap(hard, {e0, e0}), 2.0, 1e-15);
}

TEST(DualGapTest, DecomposesIntoNonnegativeExploitabilities) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto game = RandomGame(rng, 1 + trial % 5, 1 + trial % 4, 0.25 * (trial % 4));
    const PolicyPair pair{RandomSimplex(rng, game.num_rows()), RandomSimplex(rng, game.num_cols())};
    const double value = PayoffValue(game, pair);
    const double max_side = BestResponseValueMax(game, pair.nu) - value;
    const double min_side = value - BestResponseValueMin(game, pair.mu);
    EXPECT_GE(max_side, -1e-9);
    EXPECT_GE(min_side, -1e-9);
    EXPECT_NEAR(DualGap(game, pair), max_side + min_side, 1e-9);
  }
}

TEST(SolveNETest, MatchingPennies) {
  for (double beta : {0.0, 0.1, 1.0, 10.0}) {
    const auto game = KLMatrixGame::WithUniformReferences(Pennies(), beta);
    const NESolution ne = SolveNE(game);
    EXPECT_LE(ne.certified_gap(), 1e-8);
    EXPECT_NEAR(ne.pair().mu[0], 0.5, 1e-6) << beta;
    EXPECT_NEAR(ne.pair().nu[0], 0.5, 1e-6) << beta;
    EXPECT_NEAR(ne.value(), 0.0, 1e-8);
  }
}

TEST(SolveNETest, LargeBetaPinsReferences) {
  std::mt19937_64 rng(31);
  const Eigen::MatrixXd a = RandomMatrix(rng, 4, 3);
  const auto game = KLMatrixGame::WithUniformReferences(a, 1e6);
  const NESolution ne = SolveNE(game);
  EXPECT_LT(ne.pair().mu.L1Distance(game.mu_ref()), 1e-4);
  EXPECT_LT(ne.pair().nu.L1Distance(game.nu_ref()), 1e-4);
  EXPECT_LE(ne.certified_gap(), 1e-8);
}

TEST(SolveNETest, FixedPointOfBestResponses) {
  std::mt19937_64 rng(6);
  const auto game = RandomGame(rng, 3, 3, 0.5);
  const NESolution ne = SolveNE(game);
  EXPECT_LE(BestResponseResidual(game, ne.pair()), 1e-7);
  EXPECT_LT(ne.pair().mu.L1Distance(BestResponseMax(game, ne.pair().nu)), 1e-6);
  EXPECT_LT(ne.pair().nu.L1Distance(BestResponseMin(game, ne.pair().mu)), 1e-6);
}

TEST(SolveNETest, CertificateIsRecomputed) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto game = RandomGame(rng, 1 + trial % 8, 1 + (trial * 3) % 8, 0.1 * (trial % 3) * 5);
    const NESolution ne = SolveNE(game);
    EXPECT_NEAR(ne.certified_gap(), DualGap(game, ne.pair()), 1e-9);
    EXPECT_LE(ne.certified_gap(), 1e-8);
    EXPECT_NEAR(ne.value(), PayoffValue(game, ne.pair()), 1e-12);
  }
}

TEST(SolveNETest, DualityChainAtEquilibrium) {
  std::mt19937_64 rng(14);
  for (double beta : {0.0, 0.2, 1.0}) {
    const auto game = RandomGame(rng, 5, 4, beta);
    const NESolution ne = SolveNE(game);
    const double tol = 1e-8;
    for (int k = 0; k < 100; ++k) {
      const Simplex mu = RandomSimplex(rng, 5);
      const Simplex nu = RandomSimplex(rng, 4);
      EXPECT_LE(PayoffValue(game, {mu, ne.pair().nu}), ne.value() + tol);
      EXPECT_GE(PayoffValue(game, {ne.pair().mu, nu}), ne.value() - tol);
    }
  }
}

TEST(SolveNETest, JointScalingLeavesEquilibriumUnchanged) {
  std::mt19937_64 rng(15);
  NeOptions options;
  options.tol = 1e-12;
  for (int trial = 0; trial < 5; ++trial) {
    const auto game = RandomGame(rng, 4, 3, 0.3);
    const double c = 0.5 + trial;
    const KLMatrixGame scaled(c * game.payoff(), c * game.beta(), game.mu_ref(), game.nu_ref());
    const NESolution a = SolveNE(game, options);
    const NESolution b = SolveNE(scaled, options);
    EXPECT_LT(a.pair().mu.L1Distance(b.pair().mu), 1e-5);
    EXPECT_LT(a.pair().nu.L1Distance(b.pair().nu), 1e-5);
    EXPECT_NEAR(b.value(), c * a.value(), 1e-8 * c);
  }
}

TEST(SolveNETest, UniqueForPositiveBetaFromDistinctStarts) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const auto game = RandomGame(rng, 2 + trial % 6, 2 + (trial * 5) % 6, 0.1);
    NeOptions first;
    first.init = PolicyPair{Simplex::PointMass(game.num_rows(), 0),
                            Simplex::PointMass(game.num_cols(), game.num_cols() - 1)};
    NeOptions second;
    second.init = PolicyPair{RandomSimplex(rng, game.num_rows()), RandomSimplex(rng, game.num_cols())};
    const NESolution a = SolveNE(game, first);
    const NESolution b = SolveNE(game, second);
    EXPECT_LT(a.pair().mu.L1Distance(b.pair().mu) + a.pair().nu.L1Distance(b.pair().nu), 1e-5);
  }
}

TEST(SolveNETest, AllMethodsAgreeWhereApplicable) {
  std::mt19937_64 rng(18);
  const auto game = RandomGame(rng, 3, 4, 0.0);
  NeOptions lp;
  lp.method = NeMethod::kLinearProgram;
  NeOptions mwu;
  mwu.method = NeMethod::kMultiplicativeWeights;
  mwu.tol = 1e-2;
  mwu.max_iters = 1000000;
  const NESolution exact = SolveNE(game, lp);
  const NESolution averaged = SolveNE(game, mwu);
  EXPECT_LE(exact.certified_gap(), 1e-8);
  EXPECT_LE(averaged.certified_gap(), 1e-2);
  EXPECT_NEAR(exact.value(), averaged.value(), 1e-2);

  NeOptions eg;
  eg.method = NeMethod::kExtragradient;
  EXPECT_THROW(SolveNE(game, eg), InvalidArgument);
  const auto regularized = RandomGame(rng, 3, 4, 1.0);
  EXPECT_THROW(SolveNE(regularized, lp), InvalidArgument);
}

TEST(SolveNETest, BudgetExhaustionReportsBestIterate) {
  std::mt19937_64 rng(19);
  const auto game = RandomGame(rng, 6, 6, 0.01);
  NeOptions options;
  options.max_iters = 2;
  options.tol = 1e-14;
  try {
    SolveNE(game, options);
    FAIL() << "expected NoConvergence";
  } catch (const NoConvergence& e) {
    EXPECT_GT(e.best_gap(), 1e-14);
    EXPECT_NEAR(e.best_gap(), DualGap(game, e.best().pair()), 1e-9);
  }
}

TEST(SolveNETest, OneByOneGame) {
  const auto game = KLMatrixGame::WithUniformReferences(Eigen::MatrixXd::Constant(1, 1, 0.4), 1.0);
  const NESolution ne = SolveNE(game);
  EXPECT_EQ(ne.certified_gap(), 0.0);
  EXPECT_DOUBLE_EQ(ne.value(), 0.4);
}

}  // namespace
}  // namespace klgame
