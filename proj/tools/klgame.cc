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

// klgame: command-line driver.
//
//   klgame run CONFIG [--seed S | --seeds A,B,..] [--out-dir DIR] ...
//   klgame fit GLOB... [--burn-in N]
//   klgame ne-solve GAME [--beta B] [--tol T]
//   klgame gen-env [--generator tabular|low-rank] [--states S] ... [--out FILE]
//
// Exit codes: 0 success, 1 usage/config/parse error, 2 numerical
// non-convergence.

#include <glob.h>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "klgame/config.h"
#include "klgame/errors.h"
#include "klgame/experiment.h"
#include "klgame/fit.h"
#include "klgame/game_file.h"
#include "klgame/linear_mdp.h"
#include "klgame/matrix_game.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

std::string FormatSimplex(const klgame::Simplex& p) {
  std::string out = "[";
  for (int k = 0; k < p.size(); ++k) {
    if (k > 0) out += ", ";
    out += fmt::format("{:.12g}", p[k]);
  }
  return out + "]";
}

std::vector<std::string> ExpandGlobs(const std::vector<std::string>& patterns) {
  std::vector<std::string> paths;
  for (const std::string& pattern : patterns) {
    glob_t matches{};
    const int rc = glob(pattern.c_str(), 0, nullptr, &matches);
    if (rc == 0) {
      for (size_t k = 0; k < matches.gl_pathc; ++k) paths.emplace_back(matches.gl_pathv[k]);
    }
    globfree(&matches);
    if (rc == GLOB_NOMATCH) throw klgame::InsufficientData("no files match '" + pattern + "'");
    if (rc != 0) throw klgame::Error("cannot expand '" + pattern + "'");
  }
  std::sort(paths.begin(), paths.end());
  paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
  return paths;
}

int NeSolve(const std::string& path, double beta, double tol, int max_iters) {
  const klgame::GameFile file = klgame::LoadGameFile(path);
  const klgame::KLMatrixGame game = file.ToGame(beta);
  klgame::NeOptions options;
  options.tol = tol;
  options.max_iters = max_iters;
  const auto print = [](const klgame::NESolution& s) {
    fmt::print("mu    = {}\n", FormatSimplex(s.pair().mu));
    fmt::print("nu    = {}\n", FormatSimplex(s.pair().nu));
    fmt::print("value = {:.15g}\n", s.value());
    fmt::print("gap   = {:.6e}\n", s.certified_gap());
    fmt::print("iters = {}\n", s.iterations());
  };
  try {
    const klgame::NESolution solution = klgame::SolveNE(game, options);
    print(solution);
    return solution.certified_gap() <= tol ? kExitOk : kExitNumerical;
  } catch (const klgame::NoConvergence& e) {
    print(e.best());
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitNumerical;
  }
}

int Fit(const std::vector<std::string>& patterns, std::int64_t burn_in) {
  const std::vector<std::string> paths = ExpandGlobs(patterns);
  std::vector<klgame::RegretTrace> traces;
  traces.reserve(paths.size());
  for (const std::string& path : paths) traces.push_back(klgame::ReadTraceCsv(path));
  const klgame::FitReport report = klgame::FitRegretModels(traces, burn_in, paths);
  fmt::print("{:<40} {:>8} {:>14} {:>14} {:>14} {:>14}  preferred\n", "trace", "points",
             "a(log2)", "ssr(log2)", "b(sqrt)", "ssr(sqrt)");
  for (const klgame::SeedFit& s : report.seeds) {
    fmt::print("{:<40} {:>8} {:>14.6g} {:>14.6g} {:>14.6g} {:>14.6g}  {}\n", s.label, s.points,
               s.log_squared.slope, s.log_squared.residual, s.sqrt.slope, s.sqrt.residual,
               klgame::ModelName(s.preferred));
  }
  const auto votes = std::count_if(report.seeds.begin(), report.seeds.end(), [](const auto& s) {
    return s.preferred == klgame::RegretModel::kLogSquared;
  });
  fmt::print("mean ssr: log2 {:.6g}, sqrt {:.6g}; log2 preferred in {}/{} traces; overall {}\n",
             report.mean_residual_log_squared, report.mean_residual_sqrt, votes,
             report.seeds.size(), klgame::ModelName(report.preferred));
  return kExitOk;
}

struct RunFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  std::optional<std::string> out_dir;
  std::optional<int> eval_stride;
  std::optional<double> bonus_scale;
  std::optional<std::int64_t> rounds;
  std::optional<int> threads;
  bool no_svg = false;
  bool quiet = false;
};

int Run(const RunFlags& flags) {
  klgame::ExperimentConfig config = klgame::LoadConfig(flags.config_path);
  if (!flags.seeds.empty()) config.seeds = flags.seeds;
  if (flags.seed) config.seeds = {*flags.seed};
  if (flags.out_dir) config.out_dir = *flags.out_dir;
  if (flags.eval_stride) config.algorithm.eval_stride = *flags.eval_stride;
  if (flags.bonus_scale) config.algorithm.bonus_scale = *flags.bonus_scale;
  if (flags.rounds) config.algorithm.rounds = *flags.rounds;
  if (flags.threads) config.threads = *flags.threads;
  if (flags.no_svg) config.write_svg = false;
  klgame::ValidateConfig(config);

  switch (config.mode) {
    case klgame::Mode::kNeSolve:
      return NeSolve(config.game_file, config.algorithm.beta, config.algorithm.ne_tol,
                     config.algorithm.ne_max_iters);
    case klgame::Mode::kFit:
      return Fit(config.fit_traces, config.burn_in);
    case klgame::Mode::kOmg:
    case klgame::Mode::kSomg:
      break;
  }

  const bool quiet = flags.quiet;
  const klgame::ExperimentReport report =
      klgame::RunExperiment(config, [quiet](const klgame::SeedOutcome& s) {
        if (quiet && s.ok) return;
        if (s.ok) {
          fmt::print("seed {}: {} rows, regret {:.6g}, {:.2f}s -> {}\n", s.seed, s.rows,
                     s.total_regret, s.wall_seconds, s.csv_path);
        } else {
          fmt::print(stderr, "seed {}: FAILED: {}\n", s.seed, s.error);
        }
      });
  if (report.any_numerical_failure()) return kExitNumerical;
  return report.all_ok() ? kExitOk : kExitUsage;
}

struct GenFlags {
  std::string generator = "tabular";
  int states = 3;
  int max_actions = 2;
  int min_actions = 2;
  int horizon = 3;
  int dim = 4;
  std::uint64_t seed = 0;
  std::string out;
};

int GenEnv(const GenFlags& flags) {
  klgame::LinearMDP mdp = [&] {
    if (flags.generator == "low-rank") {
      klgame::LowRankMdpSpec spec{flags.horizon, flags.states, flags.max_actions,
                                  flags.min_actions, flags.dim, flags.seed};
      return klgame::MakeLowRankMdp(spec);
    }
    klgame::TabularMdpSpec spec{flags.horizon, flags.states, flags.max_actions,
                                flags.min_actions, flags.seed};
    return klgame::MakeTabularMdp(spec);
  }();
  const std::string text = klgame::SerializeMdp(mdp);
  if (flags.out.empty()) {
    std::cout << text << "\n";
    return kExitOk;
  }
  std::ofstream out(flags.out, std::ios::binary | std::ios::trunc);
  out << text << "\n";
  if (!out) throw klgame::Error("cannot write '" + flags.out + "'");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KL-regularized zero-sum game learners and experiment harness"};
  app.require_subcommand(1);

  RunFlags run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run an experiment described by a config file");
  run_cmd->add_option("config", run.config_path, "JSON config path")->required();
  auto* seed_opt = run_cmd->add_option("--seed", run.seed, "Run a single seed");
  run_cmd->add_option("--seeds", run.seeds, "Comma-separated seed list")
      ->delimiter(',')
      ->excludes(seed_opt);
  run_cmd->add_option("--out-dir", run.out_dir, "Output directory");
  run_cmd->add_option("--eval-stride", run.eval_stride, "Evaluate every k-th round");
  run_cmd->add_option("--bonus-scale", run.bonus_scale, "Multiplier on the OMG bonus");
  run_cmd->add_option("--rounds", run.rounds, "Number of rounds or episodes");
  run_cmd->add_option("--threads", run.threads, "Worker threads (0 = hardware)");
  run_cmd->add_flag("--no-svg", run.no_svg, "Skip SVG plots");
  run_cmd->add_flag("--quiet", run.quiet, "Only report failures");

  std::vector<std::string> fit_globs;
  std::int64_t burn_in = 100;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit log^2 and sqrt growth to regret traces");
  fit_cmd->add_option("traces", fit_globs, "CSV paths or glob patterns")->required();
  fit_cmd->add_option("--burn-in", burn_in, "Ignore rounds t <= burn-in");

  std::string game_path;
  double beta = 1.0;
  double tol = 1e-8;
  int max_iters = 100000;
  CLI::App* ne_cmd = app.add_subcommand("ne-solve", "Solve a KL-regularized matrix game");
  ne_cmd->add_option("game", game_path, "Payoff matrix file")->required();
  ne_cmd->add_option("--beta", beta, "Regularization strength")->check(CLI::NonNegativeNumber);
  ne_cmd->add_option("--tol", tol, "Dual-gap tolerance")->check(CLI::PositiveNumber);
  ne_cmd->add_option("--max-iters", max_iters, "Iteration budget")->check(CLI::PositiveNumber);

  GenFlags gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-env", "Generate and serialize a linear MDP");
  gen_cmd->add_option("--generator", gen.generator, "tabular or low-rank")
      ->check(CLI::IsMember({"tabular", "low-rank"}));
  gen_cmd->add_option("--states", gen.states)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--max-actions", gen.max_actions)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--min-actions", gen.min_actions)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--horizon", gen.horizon)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--dim", gen.dim, "Latent dimension (low-rank)")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--out", gen.out, "Output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return Run(run);
    if (*fit_cmd) return Fit(fit_globs, burn_in);
    if (*ne_cmd) return NeSolve(game_path, beta, tol, max_iters);
    if (*gen_cmd) return GenEnv(gen);
  } catch (const klgame::NoConvergence& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitNumerical;
  } catch (const klgame::RunAborted& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
