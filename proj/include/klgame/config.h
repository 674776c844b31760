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

// Experiment configuration documents.
//
//   {
//     "mode": "omg" | "somg" | "ne-solve" | "fit",
//     "environment": { ... },          // matrix or Markov instance, see below
//     "algorithm": { "beta": 1, "rounds": 50000, ... },
//     "seeds": [0, 1, 2],
//     "output": { "dir": "out", "svg": true, "threads": 0 },
//     "fit": { "traces": ["out/*.csv"], "burn_in": 100 },
//     "ne_solve": { "game_file": "game.txt", "tol": 1e-8 }
//   }
//
// Matrix environments take rows, cols, dim, sigma, seed. Markov environments
// take states, max_actions, min_actions, horizon, seed, or a serialized
// instance under "file". Unknown keys are errors.

#ifndef KLGAME_CONFIG_H_
#define KLGAME_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "klgame/linear_mdp.h"
#include "klgame/omg.h"

namespace klgame {

enum class Mode { kOmg, kSomg, kNeSolve, kFit };

const char* ModeName(Mode mode);

struct AlgorithmKnobs {
  double beta = 1.0;
  // Preset default per mode when unset: 50000 (omg), 20000 (somg).
  std::optional<std::int64_t> rounds;
  double delta = 0.05;
  double lambda = 1.0;
  double scale_mse = 1.0;
  double scale_opt = 1.0;
  double bonus_scale = 1.0;
  int eval_stride = 1;
  double ne_tol = 1e-8;
  int ne_max_iters = 100000;
};

struct ExperimentConfig {
  Mode mode = Mode::kOmg;
  // Desk presets: d = 5, m = n = 8, sigma = 0.1; |S| = 3, |U| = |V| = 2, H = 3.
  MatrixInstanceSpec matrix;
  TabularMdpSpec markov;
  std::string markov_file;
  AlgorithmKnobs algorithm;
  std::vector<std::uint64_t> seeds{0};
  std::string out_dir = "out";
  bool write_svg = true;
  // 0 picks the hardware concurrency.
  int threads = 0;
  std::vector<std::string> fit_traces;
  std::int64_t burn_in = 100;
  std::string game_file;

  std::int64_t EffectiveRounds() const;
  NeOptions NeSolverOptions() const;
};

// Throws ParseError on malformed JSON and ConfigInvalid naming the offending
// field on unknown keys, wrong types, or out-of-range values.
ExperimentConfig ParseConfig(const std::string& text);
ExperimentConfig LoadConfig(const std::string& path);

// Range checks shared by the parser and command-line overrides.
void ValidateConfig(const ExperimentConfig& config);

// Canonical JSON echo of every field.
std::string ConfigToJson(const ExperimentConfig& config);

}  // namespace klgame

#endif  // KLGAME_CONFIG_H_
