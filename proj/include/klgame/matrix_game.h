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

#ifndef KLGAME_MATRIX_GAME_H_
#define KLGAME_MATRIX_GAME_H_

#include <optional>

#include <Eigen/Dense>

#include "klgame/errors.h"
#include "klgame/numerics.h"

namespace klgame {

// Two-player zero-sum matrix game with KL regularization toward reference
// policies. The row player maximizes
//   f(mu, nu) = mu^T A nu - beta KL(mu || mu_ref) + beta KL(nu || nu_ref)
// and the column player minimizes it.
class KLMatrixGame {
 public:
  // Throws InvalidArgument on non-finite payoffs, negative beta, or (for
  // beta > 0) references that are not strictly positive; DimensionMismatch
  // when the references do not match the payoff shape.
  KLMatrixGame(Eigen::MatrixXd payoff, double beta, Simplex mu_ref, Simplex nu_ref);

  static KLMatrixGame WithUniformReferences(Eigen::MatrixXd payoff, double beta);

  // Same regularization and references, different payoff.
  KLMatrixGame WithPayoff(Eigen::MatrixXd payoff) const;

  const Eigen::MatrixXd& payoff() const { return payoff_; }
  double beta() const { return beta_; }
  const Simplex& mu_ref() const { return mu_ref_; }
  const Simplex& nu_ref() const { return nu_ref_; }
  int num_rows() const { return static_cast<int>(payoff_.rows()); }
  int num_cols() const { return static_cast<int>(payoff_.cols()); }
  // max_{i,j} |A(i,j)|.
  double magnitude_bound() const { return magnitude_bound_; }

 private:
  Eigen::MatrixXd payoff_;
  double beta_;
  Simplex mu_ref_;
  Simplex nu_ref_;
  double magnitude_bound_;
};

struct PolicyPair {
  Simplex mu;
  Simplex nu;
};

double PayoffValue(const KLMatrixGame& game, const PolicyPair& pair);

// Closed-form best responses: Gibbs tilts of the references.
Simplex BestResponseMax(const KLMatrixGame& game, const Simplex& nu);
Simplex BestResponseMin(const KLMatrixGame& game, const Simplex& mu);
// max_mu f(mu, nu) and min_nu f(mu, nu).
double BestResponseValueMax(const KLMatrixGame& game, const Simplex& nu);
double BestResponseValueMin(const KLMatrixGame& game, const Simplex& mu);

// max_mu f(mu, nu) - min_nu f(mu, nu); zero exactly at the equilibrium.
double DualGap(const KLMatrixGame& game, const PolicyPair& pair);

enum class NeMethod {
  kAuto,                   // extragradient for beta > 0, linear program at 0
  kExtragradient,          // last-iterate, requires beta > 0
  kMultiplicativeWeights,  // averaged iterates, any beta
  kLinearProgram,          // exact, beta == 0 only
};

struct NeOptions {
  double tol = 1e-8;
  // Extragradient also requires the fixed-point residual
  //   ||mu - BR_max(nu)||_1 + ||nu - BR_min(mu)||_1
  // to fall below this, which pins the unique equilibrium far tighter than the
  // gap alone.
  double residual_tol = 1e-7;
  int max_iters = 100000;
  NeMethod method = NeMethod::kAuto;
  // Starting point for the iterative methods; references when unset.
  std::optional<PolicyPair> init;
};

// An equilibrium candidate whose dual gap has been recomputed from scratch.
class NESolution {
 public:
  static NESolution Certify(const KLMatrixGame& game, PolicyPair pair, int iterations);

  const PolicyPair& pair() const { return pair_; }
  double value() const { return value_; }
  double certified_gap() const { return certified_gap_; }
  int iterations() const { return iterations_; }

 private:
  NESolution(PolicyPair pair, double value, double gap, int iterations)
      : pair_(std::move(pair)), value_(value), certified_gap_(gap), iterations_(iterations) {}

  PolicyPair pair_;
  double value_;
  double certified_gap_;
  int iterations_;
};

// The iteration budget ran out; carries the best iterate found.
class NoConvergence : public Error {
 public:
  explicit NoConvergence(NESolution best);
  const NESolution& best() const { return best_; }
  double best_gap() const { return best_.certified_gap(); }

 private:
  NESolution best_;
};

// L1 distance from (mu, nu) to its pair of best responses.
double BestResponseResidual(const KLMatrixGame& game, const PolicyPair& pair);

// Returns a pair with certified dual gap <= options.tol, or throws
// NoConvergence.
NESolution SolveNE(const KLMatrixGame& game, const NeOptions& options = {});

}  // namespace klgame

#endif  // KLGAME_MATRIX_GAME_H_
