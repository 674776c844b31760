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

#include "klgame/linear_mdp.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "klgame/errors.h"
#include "text_position.h"

namespace klgame {
namespace {

constexpr double kRangeSlack = 1e-12;
constexpr double kRowSumTolerance = 1e-9;

using Json = nlohmann::json;

std::string At(int h, int cell) {
  return "step " + std::to_string(h) + ", cell " + std::to_string(cell);
}

// Dirichlet(1) via normalized unit exponentials.
Eigen::VectorXd SampleDirichlet(int n, Rng& rng) {
  Eigen::VectorXd g(n);
  for (int k = 0; k < n; ++k) g[k] = -std::log1p(-UniformUnit(rng));
  if (!(g.sum() > 0.0)) g.setOnes();
  return g / g.sum();
}

Json ToJson(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json ToJson(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

Eigen::VectorXd VectorFromJson(const Json& j, const std::string& what) {
  if (!j.is_array()) throw EnvironmentInvalid(what + " must be an array");
  Eigen::VectorXd v(j.size());
  for (size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) throw EnvironmentInvalid(what + " has a non-numeric entry");
    v[k] = j[k].get<double>();
  }
  return v;
}

Eigen::MatrixXd MatrixFromJson(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw EnvironmentInvalid(what + " must be a nonempty array");
  const size_t cols = j[0].is_array() ? j[0].size() : 0;
  Eigen::MatrixXd m(j.size(), cols);
  for (size_t r = 0; r < j.size(); ++r) {
    const Eigen::VectorXd row = VectorFromJson(j[r], what);
    if (static_cast<size_t>(row.size()) != cols) throw EnvironmentInvalid(what + " is ragged");
    m.row(r) = row.transpose();
  }
  return m;
}

}  // namespace

LinearMDP::LinearMDP(int horizon, int states, int max_actions, int min_actions,
                     Eigen::MatrixXd features, std::vector<Eigen::MatrixXd> psi,
                     std::vector<Eigen::VectorXd> omega, Simplex rho,
                     MdpProvenance provenance)
    : horizon_(horizon),
      states_(states),
      max_actions_(max_actions),
      min_actions_(min_actions),
      features_(std::move(features)),
      psi_(std::move(psi)),
      omega_(std::move(omega)),
      rho_(std::move(rho)),
      provenance_(std::move(provenance)) {
  if (horizon < 1 || states < 1 || max_actions < 1 || min_actions < 1) {
    throw InvalidArgument("Markov game sizes must be >= 1");
  }
  const int d = dim();
  if (features_.rows() != num_cells() || d == 0) {
    throw DimensionMismatch("features must have one row per (s, i, j)");
  }
  if (static_cast<int>(psi_.size()) != horizon || static_cast<int>(omega_.size()) != horizon) {
    throw DimensionMismatch("need one transition measure and reward vector per step");
  }
  if (rho_.size() != states) throw DimensionMismatch("initial distribution size");
  const double root_d = std::sqrt(static_cast<double>(d));
  for (int c = 0; c < num_cells(); ++c) {
    if (!features_.row(c).allFinite() || features_.row(c).norm() > 1.0 + kRangeSlack) {
      throw EnvironmentInvalid("feature of cell " + std::to_string(c) + " has norm above 1");
    }
  }
  transitions_.reserve(horizon);
  rewards_.reserve(horizon);
  for (int h = 0; h < horizon; ++h) {
    if (psi_[h].rows() != d || psi_[h].cols() != states) {
      throw DimensionMismatch("transition measure of step " + std::to_string(h));
    }
    if (omega_[h].size() != d) {
      throw DimensionMismatch("reward vector of step " + std::to_string(h));
    }
    if (!psi_[h].allFinite() || !omega_[h].allFinite()) {
      throw EnvironmentInvalid("non-finite parameter at step " + std::to_string(h));
    }
    if (omega_[h].norm() > root_d + kRangeSlack) {
      throw EnvironmentInvalid("reward parameter norm above sqrt(d) at step " +
                               std::to_string(h));
    }
    if (psi_[h].rowwise().sum().norm() > root_d + kRangeSlack) {
      throw EnvironmentInvalid("transition measure norm above sqrt(d) at step " +
                               std::to_string(h));
    }
    Eigen::MatrixXd p = features_ * psi_[h];
    Eigen::VectorXd r = features_ * omega_[h];
    for (int c = 0; c < num_cells(); ++c) {
      if (r[c] < -kRangeSlack || r[c] > 1.0 + kRangeSlack) {
        throw EnvironmentInvalid("reward outside [0, 1] at " + At(h, c));
      }
      if (p.row(c).minCoeff() < -kRangeSlack ||
          std::abs(p.row(c).sum() - 1.0) > kRowSumTolerance) {
        throw EnvironmentInvalid("transition row is not a distribution at " + At(h, c));
      }
    }
    transitions_.push_back(std::move(p));
    rewards_.push_back(std::move(r));
  }
}

Eigen::MatrixXd LinearMDP::StageBlock(const Eigen::VectorXd& by_cell, int s) const {
  const int block = max_actions_ * min_actions_;
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(by_cell.data() + s * block,
                                                          max_actions_, min_actions_);
}

LinearMDP MakeTabularMdpFromTables(int states, int max_actions, int min_actions,
                                   std::vector<Eigen::MatrixXd> transitions,
                                   std::vector<Eigen::VectorXd> rewards, Simplex rho) {
  const int cells = states * max_actions * min_actions;
  if (transitions.size() != rewards.size() || transitions.empty()) {
    throw DimensionMismatch("need matching nonempty transition and reward tables");
  }
  for (const auto& p : transitions) {
    if (p.rows() != cells || p.cols() != states) {
      throw DimensionMismatch("transition table must be cells x states");
    }
  }
  for (const auto& r : rewards) {
    if (r.size() != cells) throw DimensionMismatch("reward table must have one entry per cell");
  }
  const int horizon = static_cast<int>(transitions.size());
  return LinearMDP(horizon, states, max_actions, min_actions,
                   Eigen::MatrixXd::Identity(cells, cells), std::move(transitions),
                   std::move(rewards), std::move(rho), {"tabular-tables", 0, 1.0});
}

LinearMDP MakeTabularMdp(const TabularMdpSpec& spec) {
  if (spec.horizon < 1 || spec.states < 1 || spec.max_actions < 1 || spec.min_actions < 1) {
    throw InvalidArgument("tabular sizes must be >= 1");
  }
  Rng rng = MakeStream(spec.seed, StreamId::kEnvironment);
  const int cells = spec.states * spec.max_actions * spec.min_actions;
  std::vector<Eigen::MatrixXd> psi;
  std::vector<Eigen::VectorXd> omega;
  for (int h = 0; h < spec.horizon; ++h) {
    Eigen::MatrixXd p(cells, spec.states);
    for (int c = 0; c < cells; ++c) p.row(c) = SampleDirichlet(spec.states, rng).transpose();
    Eigen::VectorXd r(cells);
    for (int c = 0; c < cells; ++c) r[c] = UniformUnit(rng);
    psi.push_back(std::move(p));
    omega.push_back(std::move(r));
  }
  return LinearMDP(spec.horizon, spec.states, spec.max_actions, spec.min_actions,
                   Eigen::MatrixXd::Identity(cells, cells), std::move(psi), std::move(omega),
                   Simplex::Uniform(spec.states), {"tabular", spec.seed, 1.0});
}

LinearMDP MakeLowRankMdp(const LowRankMdpSpec& spec) {
  if (spec.horizon < 1 || spec.states < 1 || spec.max_actions < 1 || spec.min_actions < 1 ||
      spec.dim < 1) {
    throw InvalidArgument("low-rank sizes must be >= 1");
  }
  Rng rng = MakeStream(spec.seed, StreamId::kEnvironment);
  const int cells = spec.states * spec.max_actions * spec.min_actions;
  Eigen::MatrixXd features(cells, spec.dim);
  for (int c = 0; c < cells; ++c) features.row(c) = SampleDirichlet(spec.dim, rng).transpose();
  const double root_d = std::sqrt(static_cast<double>(spec.dim));
  std::vector<Eigen::MatrixXd> psi;
  std::vector<Eigen::VectorXd> omega;
  double rescale = 1.0;
  for (int h = 0; h < spec.horizon; ++h) {
    Eigen::MatrixXd p(spec.dim, spec.states);
    for (int k = 0; k < spec.dim; ++k) p.row(k) = SampleDirichlet(spec.states, rng).transpose();
    Eigen::VectorXd w(spec.dim);
    for (int k = 0; k < spec.dim; ++k) w[k] = UniformUnit(rng);
    psi.push_back(std::move(p));
    omega.push_back(std::move(w));
    rescale = std::min(rescale, root_d / std::max(omega.back().norm(), 1e-300));
  }
  if (rescale < 1.0) {
    for (auto& w : omega) w *= rescale;
  }
  return LinearMDP(spec.horizon, spec.states, spec.max_actions, spec.min_actions,
                   std::move(features), std::move(psi), std::move(omega),
                   Simplex::Uniform(spec.states), {"low-rank", spec.seed, rescale});
}

std::string SerializeMdp(const LinearMDP& mdp) {
  Json doc;
  doc["format"] = "klgame-linear-mdp";
  doc["version"] = 1;
  doc["horizon"] = mdp.horizon();
  doc["states"] = mdp.num_states();
  doc["max_actions"] = mdp.num_max_actions();
  doc["min_actions"] = mdp.num_min_actions();
  doc["dim"] = mdp.dim();
  doc["features"] = ToJson(mdp.features());
  Json psi = Json::array();
  Json omega = Json::array();
  for (int h = 0; h < mdp.horizon(); ++h) {
    psi.push_back(ToJson(mdp.psi(h)));
    omega.push_back(ToJson(mdp.omega(h)));
  }
  doc["psi"] = std::move(psi);
  doc["omega"] = std::move(omega);
  doc["rho"] = ToJson(mdp.rho().weights());
  doc["provenance"] = {{"generator", mdp.provenance().generator},
                       {"seed", mdp.provenance().seed},
                       {"rescale", mdp.provenance().rescale}};
  return doc.dump(2) + "\n";
}

LinearMDP ParseMdp(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, column] = internal::JsonErrorPosition(text, e.byte);
    throw ParseError(line, column, "malformed JSON");
  }
  try {
    if (doc.value("format", std::string()) != "klgame-linear-mdp") {
      throw EnvironmentInvalid("not a serialized linear Markov game");
    }
    const int horizon = doc.at("horizon").get<int>();
    const int states = doc.at("states").get<int>();
    const int max_actions = doc.at("max_actions").get<int>();
    const int min_actions = doc.at("min_actions").get<int>();
    Eigen::MatrixXd features = MatrixFromJson(doc.at("features"), "features");
    std::vector<Eigen::MatrixXd> psi;
    std::vector<Eigen::VectorXd> omega;
    for (const auto& p : doc.at("psi")) psi.push_back(MatrixFromJson(p, "psi"));
    for (const auto& w : doc.at("omega")) omega.push_back(VectorFromJson(w, "omega"));
    Simplex rho = Simplex::FromWeights(VectorFromJson(doc.at("rho"), "rho"));
    MdpProvenance provenance;
    if (doc.contains("provenance")) {
      const Json& p = doc.at("provenance");
      provenance.generator = p.value("generator", provenance.generator);
      provenance.seed = p.value("seed", provenance.seed);
      provenance.rescale = p.value("rescale", provenance.rescale);
    }
    return LinearMDP(horizon, states, max_actions, min_actions, std::move(features),
                     std::move(psi), std::move(omega), std::move(rho), std::move(provenance));
  } catch (const Json::exception& e) {
    throw EnvironmentInvalid(std::string("bad Markov game document: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw EnvironmentInvalid(std::string("bad Markov game document: ") + e.what());
  }
}

MarkovPolicy::MarkovPolicy(int horizon, int states, std::vector<Simplex> table)
    : horizon_(horizon), states_(states), table_(std::move(table)) {
  if (horizon < 1 || states < 1) throw InvalidArgument("policy sizes must be >= 1");
  if (static_cast<int>(table_.size()) != horizon * states) {
    throw DimensionMismatch("policy needs one distribution per (h, s)");
  }
  for (const auto& p : table_) {
    if (p.size() != table_.front().size()) {
      throw DimensionMismatch("policy action counts differ across (h, s)");
    }
  }
}

MarkovPolicy MarkovPolicy::Uniform(int horizon, int states, int actions) {
  return MarkovPolicy(horizon, states,
                      std::vector<Simplex>(static_cast<size_t>(horizon) * states,
                                           Simplex::Uniform(actions)));
}

void MarkovPolicy::Set(int h, int s, Simplex p) {
  if (p.size() != num_actions()) throw DimensionMismatch("policy action count");
  table_[h * states_ + s] = std::move(p);
}

Trajectory SampleTrajectory(const LinearMDP& mdp, const MarkovPolicy& mu,
                            const MarkovPolicy& nu, Rng& rng) {
  if (mu.horizon() != mdp.horizon() || nu.horizon() != mdp.horizon() ||
      mu.num_states() != mdp.num_states() || nu.num_states() != mdp.num_states() ||
      mu.num_actions() != mdp.num_max_actions() || nu.num_actions() != mdp.num_min_actions()) {
    throw DimensionMismatch("policies do not match the Markov game");
  }
  Trajectory out;
  out.reserve(mdp.horizon());
  int s = SampleIndex(mdp.rho(), rng);
  for (int h = 0; h < mdp.horizon(); ++h) {
    TransitionRecord rec;
    rec.s = s;
    rec.i = SampleIndex(mu.at(h, s), rng);
    rec.j = SampleIndex(nu.at(h, s), rng);
    const int cell = mdp.Cell(s, rec.i, rec.j);
    rec.r = mdp.rewards(h)[cell];
    // Inverse CDF over the kernel row.
    const Eigen::MatrixXd& p = mdp.transitions(h);
    const double u = UniformUnit(rng);
    double acc = 0.0;
    int next = mdp.num_states() - 1;
    for (int k = 0; k < mdp.num_states(); ++k) {
      if (p(cell, k) <= 0.0) continue;
      acc += p(cell, k);
      next = k;
      if (u < acc) break;
    }
    rec.next = next;
    out.push_back(rec);
    s = next;
  }
  return out;
}

}  // namespace klgame
