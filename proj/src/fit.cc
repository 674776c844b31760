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

#include "klgame/fit.h"

#include <cmath>
#include <string>

#include "klgame/errors.h"

namespace klgame {
namespace {

double Basis(double t, RegretModel model) {
  if (model == RegretModel::kLogSquared) {
    const double l = std::log(t);
    return l * l;
  }
  return std::sqrt(t);
}

RegretModel Prefer(double log_squared, double sqrt) {
  return sqrt < log_squared ? RegretModel::kSqrt : RegretModel::kLogSquared;
}

}  // namespace

const char* ModelName(RegretModel model) {
  return model == RegretModel::kLogSquared ? "log2" : "sqrt";
}

ModelFit FitModel(const std::vector<double>& t, const std::vector<double>& y,
                  RegretModel model) {
  if (t.size() != y.size()) throw DimensionMismatch("fit needs one response per time");
  if (t.size() < 3) throw InsufficientData("fit needs at least three points");
  const double n = static_cast<double>(t.size());
  std::vector<double> x(t.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (size_t k = 0; k < t.size(); ++k) {
    if (!(t[k] > 0.0)) throw InvalidArgument("fit times must be positive");
    x[k] = Basis(t[k], model);
    mean_x += x[k];
    mean_y += y[k];
  }
  mean_x /= n;
  mean_y /= n;
  // Centered normal equations.
  double sxx = 0.0;
  double sxy = 0.0;
  for (size_t k = 0; k < t.size(); ++k) {
    sxx += (x[k] - mean_x) * (x[k] - mean_x);
    sxy += (x[k] - mean_x) * (y[k] - mean_y);
  }
  if (!(sxx > 0.0)) throw InsufficientData("fit times must not all be equal");
  ModelFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  for (size_t k = 0; k < t.size(); ++k) {
    const double r = (y[k] - mean_y) - fit.slope * (x[k] - mean_x);
    fit.residual += r * r;
  }
  return fit;
}

FitReport FitRegretModels(const std::vector<RegretTrace>& traces, std::int64_t burn_in,
                          const std::vector<std::string>& labels) {
  if (traces.empty()) throw InsufficientData("no traces to fit");
  if (!labels.empty() && labels.size() != traces.size()) {
    throw DimensionMismatch("need one label per trace");
  }
  FitReport report;
  for (size_t k = 0; k < traces.size(); ++k) {
    std::vector<double> t;
    std::vector<double> y;
    for (const TraceRow& row : traces[k].rows) {
      if (row.t <= burn_in) continue;
      t.push_back(static_cast<double>(row.t));
      y.push_back(row.cumulative_regret);
    }
    SeedFit seed;
    seed.label = labels.empty() ? "trace " + std::to_string(k) : labels[k];
    if (t.size() < 3) {
      throw InsufficientData(seed.label + " has fewer than three rows after the burn-in");
    }
    seed.points = static_cast<std::int64_t>(t.size());
    seed.log_squared = FitModel(t, y, RegretModel::kLogSquared);
    seed.sqrt = FitModel(t, y, RegretModel::kSqrt);
    seed.preferred = Prefer(seed.log_squared.residual, seed.sqrt.residual);
    report.mean_residual_log_squared += seed.log_squared.residual;
    report.mean_residual_sqrt += seed.sqrt.residual;
    report.seeds.push_back(std::move(seed));
  }
  const double count = static_cast<double>(traces.size());
  report.mean_residual_log_squared /= count;
  report.mean_residual_sqrt /= count;
  report.preferred = Prefer(report.mean_residual_log_squared, report.mean_residual_sqrt);
  return report;
}

}  // namespace klgame
