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

#ifndef KLGAME_REGRET_TRACE_H_
#define KLGAME_REGRET_TRACE_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "klgame/errors.h"

namespace klgame {

// One evaluated round (or episode).
struct TraceRow {
  std::int64_t t = 0;
  double instant_gap = 0.0;
  double cumulative_regret = 0.0;
  bool optimism_violation = false;
  double max_bonus = 0.0;
  int ne_solver_iters = 0;
};

// Per-round dual gaps of a run. With an evaluation stride k > 1 only every
// k-th round is evaluated and the cumulative column charges each evaluated gap
// for the k rounds it stands for.
struct RegretTrace {
  std::vector<TraceRow> rows;
  // Named counters and rates, in insertion order.
  std::vector<std::pair<std::string, double>> diagnostics;

  void Append(std::int64_t t, double gap, bool violation, double max_bonus,
              int ne_iters) {
    const std::int64_t previous = rows.empty() ? 0 : rows.back().t;
    const double base = rows.empty() ? 0.0 : rows.back().cumulative_regret;
    rows.push_back({t, gap, base + gap * static_cast<double>(t - previous), violation,
                    max_bonus, ne_iters});
  }

  void SetDiagnostic(const std::string& name, double value) {
    for (auto& [key, v] : diagnostics) {
      if (key == name) {
        v = value;
        return;
      }
    }
    diagnostics.emplace_back(name, value);
  }

  // Throws std::out_of_range when absent.
  double diagnostic(const std::string& name) const {
    for (const auto& [key, v] : diagnostics) {
      if (key == name) return v;
    }
    throw std::out_of_range("no diagnostic named " + name);
  }

  double total_regret() const { return rows.empty() ? 0.0 : rows.back().cumulative_regret; }
};

// An algorithm failed mid-run; the trace holds every round completed so far.
class RunAborted : public Error {
 public:
  RunAborted(const std::string& what, RegretTrace partial)
      : Error(what), partial_(std::move(partial)) {}
  const RegretTrace& partial() const { return partial_; }

 private:
  RegretTrace partial_;
};

}  // namespace klgame

#endif  // KLGAME_REGRET_TRACE_H_
