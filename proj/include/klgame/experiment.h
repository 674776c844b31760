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

// Seeded experiment execution and trace persistence.

#ifndef KLGAME_EXPERIMENT_H_
#define KLGAME_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "klgame/config.h"
#include "klgame/regret_trace.h"

namespace klgame {

inline constexpr char kTraceCsvHeader[] =
    "t,instant_gap,cumulative_regret,optimism_violation_flag,max_bonus,ne_solver_iters";

// Header plus one LF-terminated row per trace row; doubles in shortest
// round-trip form.
std::string FormatTraceCsv(const RegretTrace& trace);
// Throws ParseError on schema or number errors.
RegretTrace ParseTraceCsv(const std::string& text);
RegretTrace ReadTraceCsv(const std::string& path);

// Cumulative regret against t on a log-scaled x axis.
std::string RenderRegretSvg(const RegretTrace& trace, const std::string& title);

// Builds the environment for `seed` and runs the configured algorithm (omg or
// somg). Throws RunAborted on numerical failure.
RegretTrace RunSingleSeed(const ExperimentConfig& config, std::uint64_t seed);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  // Set when a numerical failure aborted the run.
  bool numerical_failure = false;
  std::string error;
  std::string csv_path;
  std::string summary_path;
  std::string svg_path;
  std::int64_t rows = 0;
  double total_regret = 0.0;
  double wall_seconds = 0.0;
};

struct ExperimentReport {
  std::vector<SeedOutcome> seeds;
  bool all_ok() const;
  bool any_numerical_failure() const;
};

using ProgressFn = std::function<void(const SeedOutcome&)>;

// Runs every seed on a worker pool and writes, per seed, seed_<s>.csv,
// seed_<s>_summary.json and optionally seed_<s>.svg under config.out_dir. A
// failing seed is recorded and the others still run.
ExperimentReport RunExperiment(const ExperimentConfig& config, const ProgressFn& progress = {});

// Output base name of one seed.
std::string SeedStem(std::uint64_t seed);

}  // namespace klgame

#endif  // KLGAME_EXPERIMENT_H_
