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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "klgame/errors.h"

namespace klgame {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path ScratchDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("klgame_experiment_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig SmallOmg(const fs::path& dir, std::vector<std::uint64_t> seeds) {
  ExperimentConfig c;
  c.algorithm.rounds = 100;
  c.seeds = std::move(seeds);
  c.out_dir = dir.string();
  c.threads = 2;
  return c;
}

TEST(ExperimentTest, WritesOneTracePerSeed) {
  const fs::path dir = ScratchDir("layout");
  const ExperimentReport report = RunExperiment(SmallOmg(dir, {1, 2}));
  ASSERT_TRUE(report.all_ok());
  ASSERT_EQ(report.seeds.size(), 2u);
  for (std::uint64_t seed : {1, 2}) {
    const fs::path csv = dir / (SeedStem(seed) + ".csv");
    const RegretTrace trace = ReadTraceCsv(csv.string());
    EXPECT_EQ(trace.rows.size(), 100u);
    EXPECT_TRUE(fs::exists(dir / (SeedStem(seed) + ".svg")));
    const nlohmann::json summary =
        nlohmann::json::parse(Slurp(dir / (SeedStem(seed) + "_summary.json")));
    EXPECT_EQ(summary["status"], "ok");
    EXPECT_EQ(summary["seed"], seed);
    EXPECT_EQ(summary["rows"], 100);
    double gap_sum = 0.0;
    double regret_sum = 0.0;
    double bonus_sum = 0.0;
    for (const TraceRow& row : trace.rows) {
      gap_sum += row.instant_gap;
      regret_sum += row.cumulative_regret;
      bonus_sum += row.max_bonus;
    }
    const nlohmann::json& sums = summary["column_sums"];
    EXPECT_NEAR(sums["instant_gap"].get<double>(), gap_sum, 1e-9);
    EXPECT_NEAR(sums["cumulative_regret"].get<double>(), regret_sum, 1e-9 * (1 + regret_sum));
    EXPECT_NEAR(sums["max_bonus"].get<double>(), bonus_sum, 1e-9 * (1 + bonus_sum));
    EXPECT_NEAR(summary["total_regret"].get<double>(), trace.total_regret(), 1e-9);
    EXPECT_EQ(summary["config"]["algorithm"]["rounds"], 100);
  }
}

TEST(ExperimentTest, RepeatAndPermutationAreByteIdentical) {
  const fs::path a = ScratchDir("repeat_a");
  const fs::path b = ScratchDir("repeat_b");
  const fs::path c = ScratchDir("repeat_c");
  ASSERT_TRUE(RunExperiment(SmallOmg(a, {4, 5, 6})).all_ok());
  ASSERT_TRUE(RunExperiment(SmallOmg(b, {4, 5, 6})).all_ok());
  ExperimentConfig permuted = SmallOmg(c, {6, 4});
  permuted.threads = 1;
  ASSERT_TRUE(RunExperiment(permuted).all_ok());
  for (std::uint64_t seed : {4, 5, 6}) {
    const std::string name = SeedStem(seed) + ".csv";
    EXPECT_EQ(Slurp(a / name), Slurp(b / name));
    if (seed != 5) {
      EXPECT_EQ(Slurp(a / name), Slurp(c / name));
    }
  }
  EXPECT_NE(Slurp(a / "seed_4.csv"), Slurp(a / "seed_5.csv"));
}

TEST(ExperimentTest, SomgRunsThroughTheSameDriver) {
  const fs::path dir = ScratchDir("somg");
  ExperimentConfig c;
  c.mode = Mode::kSomg;
  c.algorithm.rounds = 40;
  c.algorithm.eval_stride = 10;
  c.seeds = {0};
  c.out_dir = dir.string();
  c.write_svg = false;
  const ExperimentReport report = RunExperiment(c);
  ASSERT_TRUE(report.all_ok()) << report.seeds[0].error;
  const RegretTrace trace = ReadTraceCsv((dir / "seed_0.csv").string());
  ASSERT_LE(trace.rows.size(), 5u);
  EXPECT_EQ(trace.rows.back().t, 40);
  for (size_t k = 1; k < trace.rows.size(); ++k) {
    EXPECT_LE(trace.rows[k].t - trace.rows[k - 1].t, 10);
  }
  EXPECT_FALSE(fs::exists(dir / "seed_0.svg"));
}

TEST(ExperimentTest, FailuresAreRecordedPerSeed) {
  const fs::path dir = ScratchDir("failure");
  ExperimentConfig c = SmallOmg(dir, {0, 1});
  c.algorithm.beta = 0.01;
  c.algorithm.ne_tol = 1e-15;
  c.algorithm.ne_max_iters = 1;
  const ExperimentReport report = RunExperiment(c);
  EXPECT_FALSE(report.all_ok());
  EXPECT_TRUE(report.any_numerical_failure());
  for (const SeedOutcome& s : report.seeds) {
    EXPECT_FALSE(s.ok);
    EXPECT_FALSE(s.error.empty());
    const nlohmann::json summary = nlohmann::json::parse(Slurp(s.summary_path));
    EXPECT_EQ(summary["status"], "failed");
    EXPECT_TRUE(fs::exists(s.csv_path));
  }
}

TEST(ExperimentTest, RejectsNonRunModes) {
  ExperimentConfig c = SmallOmg(ScratchDir("mode"), {0});
  c.mode = Mode::kFit;
  c.fit_traces = {"x.csv"};
  EXPECT_THROW(RunExperiment(c), ConfigInvalid);
}

TEST(TraceCsvTest, RoundTripsExactly) {
  RegretTrace trace;
  trace.Append(1, 0.125, false, 0.5, 3);
  trace.Append(10, 1.0 / 3.0, true, 1e-17, 12);
  const std::string text = FormatTraceCsv(trace);
  EXPECT_EQ(text.substr(0, text.find('\n')), kTraceCsvHeader);
  const RegretTrace back = ParseTraceCsv(text);
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(back.rows[1].t, 10);
  EXPECT_EQ(back.rows[1].instant_gap, 1.0 / 3.0);
  EXPECT_EQ(back.rows[1].cumulative_regret, trace.rows[1].cumulative_regret);
  EXPECT_TRUE(back.rows[1].optimism_violation);
  EXPECT_EQ(back.rows[1].max_bonus, 1e-17);
  EXPECT_EQ(back.rows[1].ne_solver_iters, 12);
  EXPECT_EQ(FormatTraceCsv(back), text);
}

TEST(TraceCsvTest, MalformedRowsReportPosition) {
  const std::string header = std::string(kTraceCsvHeader) + "\n";
  try {
    ParseTraceCsv(header + "1,0.1,0.1,0,0.2,3\n2,0.1,0.2,2,0.2,3\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(ParseTraceCsv(header + "1,0.1,0.1,0,0.2\n"), ParseError);
  EXPECT_THROW(ParseTraceCsv("t,gap\n"), ParseError);
}

TEST(RegretSvgTest, RendersPolyline) {
  RegretTrace trace;
  for (int t = 1; t <= 50; ++t) trace.Append(t, 1.0 / t, false, 0.0, 1);
  const std::string svg = RenderRegretSvg(trace, "demo");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_NE(svg.find("demo"), std::string::npos);
}

}  // namespace
}  // namespace klgame
