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

#include "klgame/omg.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace klgame {

double EtaConfidence(double sigma, int dim, std::int64_t horizon, double lambda,
                     double delta) {
  if (horizon < 1) throw InvalidArgument("horizon must be >= 1");
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  const double t = static_cast<double>(horizon);
  return sigma * std::sqrt(dim * std::log(3.0 * (1.0 + 2.0 * t / lambda) / delta)) +
         std::sqrt(lambda * dim);
}

CellFeatures::CellFeatures(int rows, int cols, Eigen::MatrixXd table)
    : rows_(rows), cols_(cols), table_(std::move(table)) {
  if (rows <= 0 || cols <= 0) throw InvalidArgument("feature table needs cells");
  if (table_.rows() != static_cast<Eigen::Index>(rows) * cols || table_.cols() == 0) {
    throw DimensionMismatch("feature table must have rows*cols rows");
  }
  for (Eigen::Index c = 0; c < table_.rows(); ++c) {
    if (!table_.row(c).allFinite() || table_.row(c).norm() > 1.0 + 1e-12) {
      throw EnvironmentInvalid("feature of cell " + std::to_string(c) +
                               " has norm above 1");
    }
  }
}

Eigen::MatrixXd CellFeatures::Evaluate(const Eigen::VectorXd& omega) const {
  if (omega.size() != dim()) throw DimensionMismatch("parameter dimension");
  const Eigen::VectorXd flat = table_ * omega;
  // Row-major cell order.
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(flat.data(), rows_, cols_);
}

LinearPayoffOracle::LinearPayoffOracle(CellFeatures features, Eigen::VectorXd omega_star,
                                       double sigma, std::uint64_t noise_seed)
    : features_(std::move(features)),
      omega_star_(std::move(omega_star)),
      sigma_(sigma),
      rng_(MakeStream(noise_seed, StreamId::kFeedbackNoise)) {
  if (!(sigma >= 0.0)) throw InvalidArgument("noise scale must be nonnegative");
  if (omega_star_.norm() > std::sqrt(static_cast<double>(features_.dim())) + 1e-12) {
    throw EnvironmentInvalid("true parameter norm exceeds sqrt(d)");
  }
  payoff_ = features_.Evaluate(omega_star_);
}

double LinearPayoffOracle::Query(int i, int j) {
  if (i < 0 || i >= features_.rows() || j < 0 || j >= features_.cols()) {
    throw InvalidArgument("query outside the payoff matrix");
  }
  const double noise = sigma_ > 0.0 ? sigma_ * normal_(rng_) : 0.0;
  return payoff_(i, j) + noise;
}

LinearPayoffOracle MakeLinearPayoffOracle(const MatrixInstanceSpec& spec,
                                          std::uint64_t noise_seed) {
  if (spec.rows <= 0 || spec.cols <= 0 || spec.dim <= 0) {
    throw InvalidArgument("matrix instance sizes must be positive");
  }
  Rng rng = MakeStream(spec.seed, StreamId::kEnvironment);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd table(spec.rows * spec.cols, spec.dim);
  for (Eigen::Index c = 0; c < table.rows(); ++c) {
    Eigen::VectorXd v(spec.dim);
    do {
      for (int k = 0; k < spec.dim; ++k) v[k] = normal(rng);
    } while (v.norm() < 1e-8);
    table.row(c) = (0.5 + 0.5 * UniformUnit(rng)) * v.normalized().transpose();
  }
  Eigen::VectorXd omega(spec.dim);
  for (int k = 0; k < spec.dim; ++k) omega[k] = 2.0 * UniformUnit(rng) - 1.0;
  return LinearPayoffOracle(CellFeatures(spec.rows, spec.cols, std::move(table)),
                            std::move(omega), spec.sigma, noise_seed);
}

OmgLearner::OmgLearner(CellFeatures features, double beta, Simplex mu_ref,
                       Simplex nu_ref, const OmgKnobs& knobs, std::uint64_t sampling_seed)
    : features_(std::move(features)),
      template_game_(Eigen::MatrixXd::Zero(features_.rows(), features_.cols()), beta,
                     std::move(mu_ref), std::move(nu_ref)),
      knobs_(knobs),
      eta_(knobs.bonus_scale * EtaConfidence(knobs.sigma, features_.dim(), knobs.horizon,
                                             knobs.lambda, knobs.delta)),
      ridge_(features_.dim(), knobs.lambda),
      plus_rng_(MakeStream(sampling_seed, StreamId::kPlusSampling)),
      minus_rng_(MakeStream(sampling_seed, StreamId::kMinusSampling)) {
  if (!(knobs.bonus_scale >= 0.0)) throw InvalidArgument("bonus scale must be nonnegative");
}

OmgRound OmgLearner::Step(const QueryFn& query) {
  const int m = features_.rows();
  const int n = features_.cols();

  Eigen::VectorXd omega_hat = ridge_.Solve();
  Eigen::MatrixXd estimate = features_.Evaluate(omega_hat);
  const KLMatrixGame lmse_game = template_game_.WithPayoff(estimate);

  NeOptions ne = knobs_.ne;
  if (warm_start_) ne.init = warm_start_;
  NESolution equilibrium = SolveNE(lmse_game, ne);
  warm_start_ = equilibrium.pair();

  Eigen::MatrixXd bonus(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) bonus(i, j) = eta_ * ridge_.Mahalanobis(features_.feature(i, j));
  }
  const KLMatrixGame plus_game = template_game_.WithPayoff(estimate + bonus);
  const KLMatrixGame minus_game = template_game_.WithPayoff(estimate - bonus);
  const Simplex& mu = equilibrium.pair().mu;
  const Simplex& nu = equilibrium.pair().nu;
  Simplex mu_tilde = BestResponseMax(plus_game, nu);
  Simplex nu_tilde = BestResponseMin(minus_game, mu);

  Observation plus;
  plus.i = SampleIndex(mu_tilde, plus_rng_);
  plus.j = SampleIndex(nu, plus_rng_);
  Observation minus;
  minus.i = SampleIndex(mu, minus_rng_);
  minus.j = SampleIndex(nu_tilde, minus_rng_);
  plus.value = query(plus.i, plus.j);
  minus.value = query(minus.i, minus.j);

  ridge_.Absorb(features_.feature(plus.i, plus.j), plus.value);
  ridge_.Absorb(features_.feature(minus.i, minus.j), minus.value);
  plus_.push_back(plus);
  minus_.push_back(minus);

  OmgRound round{t_,
                 std::move(omega_hat),
                 std::move(estimate),
                 std::move(bonus),
                 std::move(equilibrium),
                 std::move(mu_tilde),
                 std::move(nu_tilde),
                 plus,
                 minus};
  ++t_;
  return round;
}

RegretTrace RunOmg(LinearPayoffOracle& oracle, double beta, const Simplex& mu_ref,
                   const Simplex& nu_ref, const OmgKnobs& knobs, std::int64_t rounds,
                   int eval_stride, std::uint64_t seed) {
  if (rounds < 1) throw InvalidArgument("rounds must be >= 1");
  if (eval_stride < 1) throw InvalidArgument("evaluation stride must be >= 1");
  const KLMatrixGame truth(oracle.payoff(), beta, mu_ref, nu_ref);
  OmgKnobs run_knobs = knobs;
  run_knobs.horizon = rounds;
  OmgLearner learner(oracle.features(), beta, mu_ref, nu_ref, run_knobs, seed);
  const auto query = [&oracle](int i, int j) { return oracle.Query(i, j); };

  RegretTrace trace;
  std::int64_t envelope_violations = 0;
  std::int64_t concentration_held = 0;
  std::int64_t envelope_failures_under_concentration = 0;
  double bonus_mass_sum = 0.0;
  int max_ne_iters = 0;
  for (std::int64_t t = 1; t <= rounds; ++t) {
    const Eigen::VectorXd error = learner.ridge().Solve() - oracle.omega_star();
    const bool concentrated = learner.ridge().SigmaNorm(error) <= learner.eta();

    OmgRound round = [&] {
      try {
        return learner.Step(query);
      } catch (const NoConvergence& e) {
        throw RunAborted("round " + std::to_string(t) + ": " + e.what(), trace);
      }
    }();

    const Eigen::ArrayXXd lower = (round.estimate - round.bonus).array();
    const Eigen::ArrayXXd upper = (round.estimate + round.bonus).array();
    const Eigen::ArrayXXd a = oracle.payoff().array();
    const bool violated = (a > upper).any() || (a < lower).any();
    envelope_violations += violated;
    concentration_held += concentrated;
    envelope_failures_under_concentration += concentrated && violated;
    const Simplex& mu = round.equilibrium.pair().mu;
    const Simplex& nu = round.equilibrium.pair().nu;
    bonus_mass_sum += round.mu_tilde.weights().dot(round.bonus * nu.weights()) +
                      mu.weights().dot(round.bonus * round.nu_tilde.weights());
    max_ne_iters = std::max(max_ne_iters, round.equilibrium.iterations());

    if (t == 1 || t % eval_stride == 0 || t == rounds) {
      const double gap = DualGap(truth, round.equilibrium.pair());
      trace.Append(t, gap, violated, round.bonus.maxCoeff(),
                   round.equilibrium.iterations());
    }
  }
  const double total = static_cast<double>(rounds);
  trace.SetDiagnostic("eta", learner.eta());
  trace.SetDiagnostic("optimism_violation_rate", envelope_violations / total);
  trace.SetDiagnostic("concentration_rate", concentration_held / total);
  trace.SetDiagnostic("envelope_failures_under_concentration",
                      static_cast<double>(envelope_failures_under_concentration));
  trace.SetDiagnostic("mean_bonus_mass", bonus_mass_sum / total);
  trace.SetDiagnostic("max_ne_iters", max_ne_iters);
  trace.SetDiagnostic("samples_absorbed", static_cast<double>(learner.ridge().count()));
  return trace;
}

RegretTrace RunOmg(const OmgRunConfig& config) {
  LinearPayoffOracle oracle = MakeLinearPayoffOracle(config.instance, config.seed);
  const Simplex mu_ref = config.mu_ref.value_or(Simplex::Uniform(config.instance.rows));
  const Simplex nu_ref = config.nu_ref.value_or(Simplex::Uniform(config.instance.cols));
  OmgKnobs knobs;
  knobs.lambda = config.lambda;
  knobs.delta = config.delta;
  knobs.bonus_scale = config.bonus_scale;
  knobs.sigma = config.instance.sigma;
  knobs.ne = config.ne;
  return RunOmg(oracle, config.beta, mu_ref, nu_ref, knobs, config.rounds,
                config.eval_stride, config.seed);
}

}  // namespace klgame
