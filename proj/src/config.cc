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

#include "klgame/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "klgame/errors.h"
#include "text_position.h"

namespace klgame {
namespace {

using Json = nlohmann::json;

void RejectUnknownKeys(const Json& object, const std::string& section,
                       const std::set<std::string>& allowed) {
  if (!object.is_object()) throw ConfigInvalid(section, "must be an object");
  for (const auto& item : object.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigInvalid(item.key(), "unknown key in section '" + section + "'");
    }
  }
}

double ReadNumber(const Json& object, const std::string& key, double fallback) {
  if (!object.contains(key)) return fallback;
  const Json& v = object.at(key);
  if (!v.is_number()) throw ConfigInvalid(key, "must be a number");
  return v.get<double>();
}

std::int64_t ReadInteger(const Json& object, const std::string& key, std::int64_t fallback) {
  if (!object.contains(key)) return fallback;
  const Json& v = object.at(key);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  // Accept integral floats such as 5e4.
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9.0e15) {
      return static_cast<std::int64_t>(x);
    }
  }
  throw ConfigInvalid(key, "must be an integer");
}

int ReadInt(const Json& object, const std::string& key, int fallback) {
  const std::int64_t v = ReadInteger(object, key, fallback);
  if (v < -2147483647LL || v > 2147483647LL) throw ConfigInvalid(key, "out of range");
  return static_cast<int>(v);
}

std::uint64_t ReadSeed(const Json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ConfigInvalid(key, "must be a nonnegative 64-bit integer");
}

bool ReadBool(const Json& object, const std::string& key, bool fallback) {
  if (!object.contains(key)) return fallback;
  if (!object.at(key).is_boolean()) throw ConfigInvalid(key, "must be true or false");
  return object.at(key).get<bool>();
}

std::string ReadString(const Json& object, const std::string& key, const std::string& fallback) {
  if (!object.contains(key)) return fallback;
  if (!object.at(key).is_string()) throw ConfigInvalid(key, "must be a string");
  return object.at(key).get<std::string>();
}

Mode ParseMode(const std::string& name) {
  if (name == "omg") return Mode::kOmg;
  if (name == "somg") return Mode::kSomg;
  if (name == "ne-solve") return Mode::kNeSolve;
  if (name == "fit") return Mode::kFit;
  throw ConfigInvalid("mode", "expected one of omg, somg, ne-solve, fit; got '" + name + "'");
}

void ParseEnvironment(const Json& env, ExperimentConfig& config) {
  if (config.mode == Mode::kSomg) {
    RejectUnknownKeys(env, "environment",
                      {"states", "max_actions", "min_actions", "horizon", "seed", "file"});
    TabularMdpSpec& m = config.markov;
    m.states = ReadInt(env, "states", m.states);
    m.max_actions = ReadInt(env, "max_actions", m.max_actions);
    m.min_actions = ReadInt(env, "min_actions", m.min_actions);
    m.horizon = ReadInt(env, "horizon", m.horizon);
    if (env.contains("seed")) m.seed = ReadSeed(env.at("seed"), "seed");
    config.markov_file = ReadString(env, "file", config.markov_file);
  } else {
    RejectUnknownKeys(env, "environment", {"rows", "cols", "dim", "sigma", "seed"});
    MatrixInstanceSpec& m = config.matrix;
    m.rows = ReadInt(env, "rows", m.rows);
    m.cols = ReadInt(env, "cols", m.cols);
    m.dim = ReadInt(env, "dim", m.dim);
    m.sigma = ReadNumber(env, "sigma", m.sigma);
    if (env.contains("seed")) m.seed = ReadSeed(env.at("seed"), "seed");
  }
}

void ParseAlgorithm(const Json& alg, AlgorithmKnobs& k) {
  RejectUnknownKeys(alg, "algorithm",
                    {"beta", "rounds", "delta", "lambda", "scale_mse", "scale_opt",
                     "bonus_scale", "eval_stride", "ne_tol", "ne_max_iters"});
  k.beta = ReadNumber(alg, "beta", k.beta);
  if (alg.contains("rounds")) k.rounds = ReadInteger(alg, "rounds", 0);
  k.delta = ReadNumber(alg, "delta", k.delta);
  k.lambda = ReadNumber(alg, "lambda", k.lambda);
  k.scale_mse = ReadNumber(alg, "scale_mse", k.scale_mse);
  k.scale_opt = ReadNumber(alg, "scale_opt", k.scale_opt);
  k.bonus_scale = ReadNumber(alg, "bonus_scale", k.bonus_scale);
  k.eval_stride = ReadInt(alg, "eval_stride", k.eval_stride);
  k.ne_tol = ReadNumber(alg, "ne_tol", k.ne_tol);
  k.ne_max_iters = ReadInt(alg, "ne_max_iters", k.ne_max_iters);
}

void Require(bool ok, const std::string& field, const std::string& reason) {
  if (!ok) throw ConfigInvalid(field, reason);
}

}  // namespace

const char* ModeName(Mode mode) {
  switch (mode) {
    case Mode::kOmg:
      return "omg";
    case Mode::kSomg:
      return "somg";
    case Mode::kNeSolve:
      return "ne-solve";
    case Mode::kFit:
      return "fit";
  }
  return "unknown";
}

std::int64_t ExperimentConfig::EffectiveRounds() const {
  if (algorithm.rounds) return *algorithm.rounds;
  return mode == Mode::kSomg ? 20000 : 50000;
}

NeOptions ExperimentConfig::NeSolverOptions() const {
  NeOptions options;
  options.tol = algorithm.ne_tol;
  options.max_iters = algorithm.ne_max_iters;
  return options;
}

void ValidateConfig(const ExperimentConfig& c) {
  const AlgorithmKnobs& k = c.algorithm;
  Require(std::isfinite(k.beta) && k.beta >= 0.0, "beta", "must be a finite number >= 0");
  Require(c.EffectiveRounds() >= 1, "rounds", "must be >= 1");
  Require(k.delta > 0.0 && k.delta < 1.0, "delta", "must lie in (0, 1)");
  Require(std::isfinite(k.lambda) && k.lambda > 0.0, "lambda", "must be positive");
  Require(std::isfinite(k.scale_mse) && k.scale_mse >= 0.0, "scale_mse", "must be >= 0");
  Require(std::isfinite(k.scale_opt) && k.scale_opt >= 0.0, "scale_opt", "must be >= 0");
  Require(std::isfinite(k.bonus_scale) && k.bonus_scale >= 0.0, "bonus_scale", "must be >= 0");
  Require(k.eval_stride >= 1, "eval_stride", "must be >= 1");
  Require(k.ne_tol > 0.0, "ne_tol", "must be positive");
  Require(k.ne_max_iters >= 1, "ne_max_iters", "must be >= 1");
  Require(!c.seeds.empty(), "seeds", "must list at least one seed");
  Require(c.threads >= 0, "threads", "must be >= 0");
  Require(c.burn_in >= 0, "burn_in", "must be >= 0");
  Require(c.matrix.rows >= 1, "rows", "must be >= 1");
  Require(c.matrix.cols >= 1, "cols", "must be >= 1");
  Require(c.matrix.dim >= 1, "dim", "must be >= 1");
  Require(std::isfinite(c.matrix.sigma) && c.matrix.sigma >= 0.0, "sigma", "must be >= 0");
  Require(c.markov.states >= 1, "states", "must be >= 1");
  Require(c.markov.max_actions >= 1, "max_actions", "must be >= 1");
  Require(c.markov.min_actions >= 1, "min_actions", "must be >= 1");
  Require(c.markov.horizon >= 1, "horizon", "must be >= 1");
  if (c.mode == Mode::kNeSolve) Require(!c.game_file.empty(), "game_file", "is required");
  if (c.mode == Mode::kFit) Require(!c.fit_traces.empty(), "traces", "is required");
}

ExperimentConfig ParseConfig(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, column] = internal::JsonErrorPosition(text, e.byte);
    throw ParseError(line, column, "malformed JSON");
  }
  RejectUnknownKeys(doc, "config",
                    {"mode", "environment", "algorithm", "seeds", "output", "fit", "ne_solve"});
  ExperimentConfig config;
  config.mode = ParseMode(ReadString(doc, "mode", "omg"));
  if (doc.contains("environment")) ParseEnvironment(doc.at("environment"), config);
  if (doc.contains("algorithm")) ParseAlgorithm(doc.at("algorithm"), config.algorithm);
  if (doc.contains("seeds")) {
    const Json& seeds = doc.at("seeds");
    if (!seeds.is_array()) throw ConfigInvalid("seeds", "must be an array");
    config.seeds.clear();
    for (const auto& s : seeds) config.seeds.push_back(ReadSeed(s, "seeds"));
  }
  if (doc.contains("output")) {
    const Json& out = doc.at("output");
    RejectUnknownKeys(out, "output", {"dir", "svg", "threads"});
    config.out_dir = ReadString(out, "dir", config.out_dir);
    config.write_svg = ReadBool(out, "svg", config.write_svg);
    config.threads = ReadInt(out, "threads", config.threads);
  }
  if (doc.contains("fit")) {
    const Json& fit = doc.at("fit");
    RejectUnknownKeys(fit, "fit", {"traces", "burn_in"});
    if (fit.contains("traces")) {
      if (!fit.at("traces").is_array()) throw ConfigInvalid("traces", "must be an array");
      for (const auto& p : fit.at("traces")) {
        if (!p.is_string()) throw ConfigInvalid("traces", "entries must be strings");
        config.fit_traces.push_back(p.get<std::string>());
      }
    }
    config.burn_in = ReadInteger(fit, "burn_in", config.burn_in);
  }
  if (doc.contains("ne_solve")) {
    const Json& ne = doc.at("ne_solve");
    RejectUnknownKeys(ne, "ne_solve", {"game_file", "tol"});
    config.game_file = ReadString(ne, "game_file", config.game_file);
    config.algorithm.ne_tol = ReadNumber(ne, "tol", config.algorithm.ne_tol);
  }
  ValidateConfig(config);
  return config;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigInvalid("config", "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str());
}

std::string ConfigToJson(const ExperimentConfig& c) {
  Json doc;
  doc["mode"] = ModeName(c.mode);
  if (c.mode == Mode::kSomg) {
    doc["environment"] = {{"states", c.markov.states},
                          {"max_actions", c.markov.max_actions},
                          {"min_actions", c.markov.min_actions},
                          {"horizon", c.markov.horizon},
                          {"seed", c.markov.seed}};
    if (!c.markov_file.empty()) doc["environment"]["file"] = c.markov_file;
  } else {
    doc["environment"] = {{"rows", c.matrix.rows},   {"cols", c.matrix.cols},
                          {"dim", c.matrix.dim},     {"sigma", c.matrix.sigma},
                          {"seed", c.matrix.seed}};
  }
  const AlgorithmKnobs& k = c.algorithm;
  doc["algorithm"] = {{"beta", k.beta},
                      {"rounds", c.EffectiveRounds()},
                      {"delta", k.delta},
                      {"lambda", k.lambda},
                      {"scale_mse", k.scale_mse},
                      {"scale_opt", k.scale_opt},
                      {"bonus_scale", k.bonus_scale},
                      {"eval_stride", k.eval_stride},
                      {"ne_tol", k.ne_tol},
                      {"ne_max_iters", k.ne_max_iters}};
  doc["seeds"] = c.seeds;
  doc["output"] = {{"dir", c.out_dir}, {"svg", c.write_svg}, {"threads", c.threads}};
  doc["fit"] = {{"traces", c.fit_traces}, {"burn_in", c.burn_in}};
  doc["ne_solve"] = {{"game_file", c.game_file}, {"tol", k.ne_tol}};
  return doc.dump(2);
}

}  // namespace klgame
