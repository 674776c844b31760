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

#include "klgame/experiment.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "klgame/errors.h"
#include "klgame/linear_mdp.h"
#include "klgame/omg.h"
#include "klgame/somg.h"

namespace klgame {
namespace {

using Json = nlohmann::json;

void WriteFile(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

template <typename T>
T ParseField(const std::string& field, int line, int column) {
  T value{};
  const char* first = field.data();
  const char* last = first + field.size();
  const auto [end, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || end != last) {
    throw ParseError(line, column, "bad field '" + field + "'");
  }
  return value;
}

Json SummaryJson(const ExperimentConfig& config, const SeedOutcome& outcome,
                 const RegretTrace& trace) {
  Json doc;
  doc["config"] = Json::parse(ConfigToJson(config));
  doc["seed"] = outcome.seed;
  doc["status"] = outcome.ok ? "ok" : "failed";
  if (!outcome.error.empty()) doc["error"] = outcome.error;
  doc["rounds_requested"] = config.EffectiveRounds();
  doc["rows"] = trace.rows.size();
  doc["last_t"] = trace.rows.empty() ? 0 : trace.rows.back().t;
  doc["total_regret"] = trace.total_regret();
  double gap_sum = 0.0;
  double regret_sum = 0.0;
  double bonus_sum = 0.0;
  std::int64_t flag_sum = 0;
  std::int64_t iter_sum = 0;
  for (const TraceRow& row : trace.rows) {
    gap_sum += row.instant_gap;
    regret_sum += row.cumulative_regret;
    bonus_sum += row.max_bonus;
    flag_sum += row.optimism_violation;
    iter_sum += row.ne_solver_iters;
  }
  doc["column_sums"] = {{"instant_gap", gap_sum},
                        {"cumulative_regret", regret_sum},
                        {"optimism_violation_flag", flag_sum},
                        {"max_bonus", bonus_sum},
                        {"ne_solver_iters", iter_sum}};
  doc["flagged_row_rate"] =
      trace.rows.empty() ? 0.0 : static_cast<double>(flag_sum) / trace.rows.size();
  Json diagnostics = Json::object();
  for (const auto& [name, value] : trace.diagnostics) diagnostics[name] = value;
  doc["diagnostics"] = std::move(diagnostics);
  doc["wall_seconds"] = outcome.wall_seconds;
  return doc;
}

SeedOutcome RunAndPersist(const ExperimentConfig& config, std::uint64_t seed) {
  SeedOutcome outcome;
  outcome.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  RegretTrace trace;
  try {
    trace = RunSingleSeed(config, seed);
    outcome.ok = true;
  } catch (const RunAborted& e) {
    trace = e.partial();
    outcome.numerical_failure = true;
    outcome.error = e.what();
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  outcome.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  outcome.rows = static_cast<std::int64_t>(trace.rows.size());
  outcome.total_regret = trace.total_regret();

  const std::filesystem::path dir(config.out_dir);
  const std::string stem = SeedStem(seed);
  try {
    const std::filesystem::path csv = dir / (stem + ".csv");
    WriteFile(csv, FormatTraceCsv(trace));
    outcome.csv_path = csv.string();
    if (config.write_svg && outcome.ok) {
      const std::filesystem::path svg = dir / (stem + ".svg");
      WriteFile(svg, RenderRegretSvg(trace, fmt::format("{} seed {}", ModeName(config.mode), seed)));
      outcome.svg_path = svg.string();
    }
    const std::filesystem::path summary = dir / (stem + "_summary.json");
    WriteFile(summary, SummaryJson(config, outcome, trace).dump(2) + "\n");
    outcome.summary_path = summary.string();
  } catch (const std::exception& e) {
    outcome.ok = false;
    outcome.error = outcome.error.empty() ? e.what() : outcome.error + "; " + e.what();
  }
  return outcome;
}

}  // namespace

std::string SeedStem(std::uint64_t seed) { return fmt::format("seed_{}", seed); }

std::string FormatTraceCsv(const RegretTrace& trace) {
  std::string out = kTraceCsvHeader;
  out += '\n';
  for (const TraceRow& row : trace.rows) {
    out += fmt::format("{},{},{},{},{},{}\n", row.t, row.instant_gap, row.cumulative_regret,
                       row.optimism_violation ? 1 : 0, row.max_bonus, row.ne_solver_iters);
  }
  return out;
}

RegretTrace ParseTraceCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTraceCsvHeader) {
    throw ParseError(1, 1, "missing or unexpected CSV header");
  }
  RegretTrace trace;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::vector<int> columns;
    size_t start = 0;
    while (true) {
      const size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      columns.push_back(static_cast<int>(start) + 1);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 6) throw ParseError(line_no, 1, "expected 6 fields");
    TraceRow row;
    row.t = ParseField<std::int64_t>(fields[0], line_no, columns[0]);
    row.instant_gap = ParseField<double>(fields[1], line_no, columns[1]);
    row.cumulative_regret = ParseField<double>(fields[2], line_no, columns[2]);
    const int flag = ParseField<int>(fields[3], line_no, columns[3]);
    if (flag != 0 && flag != 1) throw ParseError(line_no, columns[3], "flag must be 0 or 1");
    row.optimism_violation = flag == 1;
    row.max_bonus = ParseField<double>(fields[4], line_no, columns[4]);
    row.ne_solver_iters = ParseField<int>(fields[5], line_no, columns[5]);
    trace.rows.push_back(row);
  }
  return trace;
}

RegretTrace ReadTraceCsv(const std::string& path) { return ParseTraceCsv(ReadFile(path)); }

std::string RenderRegretSvg(const RegretTrace& trace, const std::string& title) {
  constexpr double kWidth = 640.0;
  constexpr double kHeight = 400.0;
  constexpr double kLeft = 70.0;
  constexpr double kRight = 20.0;
  constexpr double kTop = 40.0;
  constexpr double kBottom = 50.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double x_max = 1.0;
  double y_max = 0.0;
  for (const TraceRow& row : trace.rows) {
    x_max = std::max(x_max, std::log10(static_cast<double>(std::max<std::int64_t>(row.t, 1))));
    y_max = std::max(y_max, row.cumulative_regret);
  }
  x_max = std::ceil(x_max);
  if (!(y_max > 0.0)) y_max = 1.0;
  const auto px = [&](double t) {
    return kLeft + plot_w * std::log10(std::max(t, 1.0)) / x_max;
  };
  const auto py = [&](double y) { return kTop + plot_h * (1.0 - y / y_max); };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{3}</text>\n",
      kWidth, kHeight, kLeft, title);
  svg += fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n"
      "<line x1=\"{0}\" y1=\"{3}\" x2=\"{0}\" y2=\"{1}\" stroke=\"black\"/>\n",
      kLeft, kTop + plot_h, kLeft + plot_w, kTop);
  for (int decade = 0; decade <= static_cast<int>(x_max); ++decade) {
    const double x = kLeft + plot_w * decade / x_max;
    svg += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"black\"/>\n"
        "<text x=\"{0:.2f}\" y=\"{3}\" font-family=\"sans-serif\" font-size=\"11\" "
        "text-anchor=\"middle\">1e{4}</text>\n",
        x, kTop + plot_h, kTop + plot_h + 5, kTop + plot_h + 18, decade);
  }
  for (int k = 0; k <= 4; ++k) {
    const double y = y_max * k / 4.0;
    svg += fmt::format(
        "<text x=\"{0}\" y=\"{1:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
        "text-anchor=\"end\">{2:.4g}</text>\n",
        kLeft - 6, py(y) + 4, y);
  }
  svg += fmt::format(
      "<text x=\"{0}\" y=\"{1}\" font-family=\"sans-serif\" font-size=\"12\" "
      "text-anchor=\"middle\">t (log scale)</text>\n",
      kLeft + plot_w / 2, kHeight - 10);
  svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (const TraceRow& row : trace.rows) {
    svg += fmt::format("{:.2f},{:.2f} ", px(static_cast<double>(row.t)),
                       py(row.cumulative_regret));
  }
  svg += "\"/>\n</svg>\n";
  return svg;
}

RegretTrace RunSingleSeed(const ExperimentConfig& config, std::uint64_t seed) {
  const AlgorithmKnobs& k = config.algorithm;
  switch (config.mode) {
    case Mode::kOmg: {
      OmgRunConfig run;
      run.instance = config.matrix;
      run.beta = k.beta;
      run.rounds = config.EffectiveRounds();
      run.lambda = k.lambda;
      run.delta = k.delta;
      run.bonus_scale = k.bonus_scale;
      run.eval_stride = k.eval_stride;
      run.ne = config.NeSolverOptions();
      run.seed = seed;
      return RunOmg(run);
    }
    case Mode::kSomg: {
      SomgRunConfig run;
      run.environment = config.markov;
      if (!config.markov_file.empty()) run.mdp = ParseMdp(ReadFile(config.markov_file));
      run.beta = k.beta;
      run.episodes = config.EffectiveRounds();
      run.lambda = k.lambda;
      run.delta = k.delta;
      run.scale_mse = k.scale_mse;
      run.scale_opt = k.scale_opt;
      run.eval_stride = k.eval_stride;
      run.stage_ne = config.NeSolverOptions();
      run.seed = seed;
      return RunSomg(run);
    }
    case Mode::kNeSolve:
    case Mode::kFit:
      break;
  }
  throw InvalidArgument(std::string("mode '") + ModeName(config.mode) +
                        "' does not produce regret traces");
}

bool ExperimentReport::all_ok() const {
  return std::all_of(seeds.begin(), seeds.end(), [](const SeedOutcome& s) { return s.ok; });
}

bool ExperimentReport::any_numerical_failure() const {
  return std::any_of(seeds.begin(), seeds.end(),
                     [](const SeedOutcome& s) { return s.numerical_failure; });
}

ExperimentReport RunExperiment(const ExperimentConfig& config, const ProgressFn& progress) {
  ValidateConfig(config);
  if (config.mode != Mode::kOmg && config.mode != Mode::kSomg) {
    throw ConfigInvalid("mode", "run needs mode omg or somg");
  }
  std::filesystem::create_directories(config.out_dir);
  ExperimentReport report;
  report.seeds.resize(config.seeds.size());
  const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  const size_t workers =
      std::min(config.seeds.size(),
               static_cast<size_t>(config.threads > 0 ? config.threads : hardware));
  std::atomic<size_t> next{0};
  std::mutex progress_mutex;
  const auto work = [&] {
    for (size_t k = next++; k < config.seeds.size(); k = next++) {
      report.seeds[k] = RunAndPersist(config, config.seeds[k]);
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(report.seeds[k]);
      }
    }
  };
  std::vector<std::thread> pool;
  for (size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& thread : pool) thread.join();
  return report;
}

}  // namespace klgame
