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

// Growth-rate discrimination of cumulative-regret curves.

#ifndef KLGAME_FIT_H_
#define KLGAME_FIT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "klgame/regret_trace.h"

namespace klgame {

// Listed in tie-break order.
enum class RegretModel { kLogSquared, kSqrt };

const char* ModelName(RegretModel model);

// y ~ slope * g(t) + intercept, with g = log^2 or sqrt.
struct ModelFit {
  double slope = 0.0;
  double intercept = 0.0;
  // Sum of squared residuals.
  double residual = 0.0;
};

struct SeedFit {
  std::string label;
  std::int64_t points = 0;
  ModelFit log_squared;
  ModelFit sqrt;
  RegretModel preferred = RegretModel::kLogSquared;
};

struct FitReport {
  std::vector<SeedFit> seeds;
  double mean_residual_log_squared = 0.0;
  double mean_residual_sqrt = 0.0;
  RegretModel preferred = RegretModel::kLogSquared;
};

// Ordinary least squares of y on (g(t), 1).
ModelFit FitModel(const std::vector<double>& t, const std::vector<double>& y,
                  RegretModel model);

// Fits the cumulative regret of every row with t > burn_in, per trace. Each
// trace is preferred by its smaller residual and the report by the mean
// residuals; ties go to log^2. Throws InsufficientData when there are no
// traces or a trace keeps fewer than three points.
FitReport FitRegretModels(const std::vector<RegretTrace>& traces, std::int64_t burn_in = 100,
                          const std::vector<std::string>& labels = {});

}  // namespace klgame

#endif  // KLGAME_FIT_H_
