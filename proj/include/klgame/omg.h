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

// Optimistic learning of a KL-regularized matrix-game equilibrium from noisy
// bandit feedback on a linearly parameterized payoff.

#ifndef KLGAME_OMG_H_
#define KLGAME_OMG_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "klgame/matrix_game.h"
#include "klgame/random.h"
#include "klgame/regret_trace.h"
#include "klgame/ridge.h"

namespace klgame {

// Confidence width
//   sigma sqrt(d log(3 (1 + 2T/lambda) / delta)) + sqrt(lambda d).
double EtaConfidence(double sigma, int dim, std::int64_t horizon, double lambda,
                     double delta);

// Known feature vector phi(i, j) of every payoff cell, each with norm <= 1.
class CellFeatures {
 public:
  // `table` has one row per cell in row-major (i, j) order.
  CellFeatures(int rows, int cols, Eigen::MatrixXd table);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int dim() const { return static_cast<int>(table_.cols()); }
  Eigen::VectorXd feature(int i, int j) const {
    return table_.row(i * cols_ + j).transpose();
  }
  const Eigen::MatrixXd& table() const { return table_; }
  // The m x n matrix <omega, phi(i, j)>.
  Eigen::MatrixXd Evaluate(const Eigen::VectorXd& omega) const;

 private:
  int rows_;
  int cols_;
  Eigen::MatrixXd table_;
};

// Harness-side payoff oracle. Holds the true parameter and answers queries with
// the true payoff plus N(0, sigma^2) noise. Learners only see Query().
class LinearPayoffOracle {
 public:
  LinearPayoffOracle(CellFeatures features, Eigen::VectorXd omega_star, double sigma,
                     std::uint64_t noise_seed);

  double Query(int i, int j);

  const CellFeatures& features() const { return features_; }
  const Eigen::VectorXd& omega_star() const { return omega_star_; }
  const Eigen::MatrixXd& payoff() const { return payoff_; }
  double sigma() const { return sigma_; }

 private:
  CellFeatures features_;
  Eigen::VectorXd omega_star_;
  Eigen::MatrixXd payoff_;
  double sigma_;
  Rng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct MatrixInstanceSpec {
  int rows = 8;
  int cols = 8;
  int dim = 5;
  double sigma = 0.1;
  std::uint64_t seed = 0;
};

// Random instance: feature directions uniform on the sphere with norms in
// [0.5, 1], omega_star uniform on [-1, 1]^d (so ||omega_star|| <= sqrt(d)).
LinearPayoffOracle MakeLinearPayoffOracle(const MatrixInstanceSpec& spec,
                                          std::uint64_t noise_seed);

struct OmgKnobs {
  double lambda = 1.0;
  double delta = 0.05;
  double bonus_scale = 1.0;
  // Noise scale assumed by the confidence width.
  double sigma = 0.1;
  // Planned number of rounds T entering the confidence width.
  std::int64_t horizon = 1;
  NeOptions ne;
};

struct Observation {
  int i = 0;
  int j = 0;
  double value = 0.0;
};

// Everything one round computed, before absorbing its two observations.
struct OmgRound {
  std::int64_t t = 0;
  Eigen::VectorXd omega_hat;
  Eigen::MatrixXd estimate;  // LMSE payoff
  Eigen::MatrixXd bonus;
  NESolution equilibrium;    // of the LMSE game
  Simplex mu_tilde;          // best response to nu under estimate + bonus
  Simplex nu_tilde;          // best response to mu under estimate - bonus
  Observation plus;          // sampled from (mu_tilde, nu)
  Observation minus;         // sampled from (mu, nu_tilde)
};

class OmgLearner {
 public:
  using QueryFn = std::function<double(int, int)>;

  OmgLearner(CellFeatures features, double beta, Simplex mu_ref, Simplex nu_ref,
             const OmgKnobs& knobs, std::uint64_t sampling_seed);

  // Runs one round; throws NoConvergence when the equilibrium solve fails.
  OmgRound Step(const QueryFn& query);

  // Index of the next round, starting at 1.
  std::int64_t round() const { return t_; }
  double eta() const { return eta_; }
  const RidgeRegression& ridge() const { return ridge_; }
  const std::vector<Observation>& dataset_plus() const { return plus_; }
  const std::vector<Observation>& dataset_minus() const { return minus_; }

 private:
  CellFeatures features_;
  KLMatrixGame template_game_;
  OmgKnobs knobs_;
  double eta_;
  RidgeRegression ridge_;
  std::vector<Observation> plus_;
  std::vector<Observation> minus_;
  Rng plus_rng_;
  Rng minus_rng_;
  std::optional<PolicyPair> warm_start_;
  std::int64_t t_ = 1;
};

struct OmgRunConfig {
  MatrixInstanceSpec instance;
  double beta = 1.0;
  // Uniform when unset.
  std::optional<Simplex> mu_ref;
  std::optional<Simplex> nu_ref;
  std::int64_t rounds = 1000;
  double lambda = 1.0;
  double delta = 0.05;
  double bonus_scale = 1.0;
  int eval_stride = 1;
  NeOptions ne;
  std::uint64_t seed = 0;
};

// Runs the learner against `oracle` for `rounds` rounds. Every round checks the
// optimistic envelope estimate - bonus <= A <= estimate + bonus and the
// concentration event ||omega_hat - omega_star||_Sigma <= eta; evaluated rounds
// record the true dual gap of the LMSE equilibrium. Throws RunAborted with the
// partial trace when an equilibrium solve fails.
RegretTrace RunOmg(LinearPayoffOracle& oracle, double beta, const Simplex& mu_ref,
                   const Simplex& nu_ref, const OmgKnobs& knobs, std::int64_t rounds,
                   int eval_stride, std::uint64_t seed);

// Builds the instance from `config` and runs it.
RegretTrace RunOmg(const OmgRunConfig& config);

}  // namespace klgame

#endif  // KLGAME_OMG_H_
