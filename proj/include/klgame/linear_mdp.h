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

// Finite-horizon two-player zero-sum Markov games whose transitions and
// rewards are linear in known features of (state, max action, min action).

#ifndef KLGAME_LINEAR_MDP_H_
#define KLGAME_LINEAR_MDP_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "klgame/numerics.h"
#include "klgame/random.h"

namespace klgame {

// Where an instance came from. `rescale` is the factor applied to the reward
// parameters to restore their norm bound (1 when none was needed).
struct MdpProvenance {
  std::string generator = "explicit";
  std::uint64_t seed = 0;
  double rescale = 1.0;
};

// Steps are 0-based: h = 0 .. H-1, with V_H == 0. Cells are flattened as
// (s * U + i) * V + j.
class LinearMDP {
 public:
  // `features` is cells x d; `psi[h]` is d x S; `omega[h]` is a d-vector.
  // Throws EnvironmentInvalid when rewards leave [0, 1], a transition row is
  // not a distribution, or a norm bound is broken; DimensionMismatch on shape
  // errors.
  LinearMDP(int horizon, int states, int max_actions, int min_actions,
            Eigen::MatrixXd features, std::vector<Eigen::MatrixXd> psi,
            std::vector<Eigen::VectorXd> omega, Simplex rho, MdpProvenance provenance = {});

  int horizon() const { return horizon_; }
  int num_states() const { return states_; }
  int num_max_actions() const { return max_actions_; }
  int num_min_actions() const { return min_actions_; }
  int num_cells() const { return states_ * max_actions_ * min_actions_; }
  int dim() const { return static_cast<int>(features_.cols()); }
  int Cell(int s, int i, int j) const { return (s * max_actions_ + i) * min_actions_ + j; }

  const Eigen::MatrixXd& features() const { return features_; }
  Eigen::VectorXd feature(int s, int i, int j) const {
    return features_.row(Cell(s, i, j)).transpose();
  }
  const Eigen::MatrixXd& psi(int h) const { return psi_[h]; }
  const Eigen::VectorXd& omega(int h) const { return omega_[h]; }
  const Simplex& rho() const { return rho_; }
  const MdpProvenance& provenance() const { return provenance_; }

  // cells x S kernel of step h.
  const Eigen::MatrixXd& transitions(int h) const { return transitions_[h]; }
  // Rewards of step h indexed by cell.
  const Eigen::VectorXd& rewards(int h) const { return rewards_[h]; }
  double reward(int h, int s, int i, int j) const { return rewards_[h][Cell(s, i, j)]; }
  // The U x V block of a cell-indexed vector at state s.
  Eigen::MatrixXd StageBlock(const Eigen::VectorXd& by_cell, int s) const;

 private:
  int horizon_;
  int states_;
  int max_actions_;
  int min_actions_;
  Eigen::MatrixXd features_;
  std::vector<Eigen::MatrixXd> psi_;
  std::vector<Eigen::VectorXd> omega_;
  Simplex rho_;
  MdpProvenance provenance_;
  std::vector<Eigen::MatrixXd> transitions_;
  std::vector<Eigen::VectorXd> rewards_;
};

struct TabularMdpSpec {
  int horizon = 3;
  int states = 3;
  int max_actions = 2;
  int min_actions = 2;
  std::uint64_t seed = 0;
};

// One-hot features (d = S U V), Dirichlet(1) transition rows, Uniform[0, 1]
// rewards, uniform initial distribution.
LinearMDP MakeTabularMdp(const TabularMdpSpec& spec);

// Tabular instance from explicit tables: `transitions[h]` is cells x S and
// `rewards[h]` is indexed by cell.
LinearMDP MakeTabularMdpFromTables(int states, int max_actions, int min_actions,
                                   std::vector<Eigen::MatrixXd> transitions,
                                   std::vector<Eigen::VectorXd> rewards, Simplex rho);

struct LowRankMdpSpec {
  int horizon = 3;
  int states = 3;
  int max_actions = 2;
  int min_actions = 2;
  int dim = 4;
  std::uint64_t seed = 0;
};

// Features are Dirichlet(1) mixture weights over d latent factors; every
// factor owns a Dirichlet(1) next-state distribution per step, and rewards are
// Uniform[0, 1] per factor.
LinearMDP MakeLowRankMdp(const LowRankMdpSpec& spec);

// Self-describing JSON document; doubles round-trip bit-exactly.
std::string SerializeMdp(const LinearMDP& mdp);
// Throws ParseError on malformed text and EnvironmentInvalid on bad content.
LinearMDP ParseMdp(const std::string& text);

// One conditional distribution per (h, s).
class MarkovPolicy {
 public:
  MarkovPolicy(int horizon, int states, std::vector<Simplex> table);
  static MarkovPolicy Uniform(int horizon, int states, int actions);

  int horizon() const { return horizon_; }
  int num_states() const { return states_; }
  int num_actions() const { return table_.front().size(); }
  const Simplex& at(int h, int s) const { return table_[h * states_ + s]; }
  void Set(int h, int s, Simplex p);

 private:
  int horizon_;
  int states_;
  std::vector<Simplex> table_;
};

struct TransitionRecord {
  int s = 0;
  int i = 0;
  int j = 0;
  double r = 0.0;
  int next = 0;
};

// One record per step, h = 0 .. H-1.
using Trajectory = std::vector<TransitionRecord>;

Trajectory SampleTrajectory(const LinearMDP& mdp, const MarkovPolicy& mu,
                            const MarkovPolicy& nu, Rng& rng);

}  // namespace klgame

#endif  // KLGAME_LINEAR_MDP_H_
