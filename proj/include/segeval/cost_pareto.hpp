// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace segeval {

// Per-image compute cost, assuming ~2N operations per forward pass of an
// N-parameter transformer, summed over every token processed by every call.

struct CostStage {
  long long calls = 1;
  long long tokens_per_call = 1;
  double model_params = 0.0;
};

struct CostModel {
  std::string metric;
  std::vector<CostStage> stages;
};

/// Throws ValidationError on an empty stage list or a non-positive field.
void validate_cost_model(const CostModel& model);

/// FLOPs to score one image: sum of calls * tokens_per_call * 2 * model_params.
double estimate_flops(const CostModel& model);

using CostModelSet = std::map<std::string, CostModel, std::less<>>;

/// Accepts one model object or an array of them; every model is validated.
CostModelSet parse_cost_models(std::string_view text, const std::string& source);
CostModelSet load_cost_models(const std::filesystem::path& path);

struct QualityCostPoint {
  std::string metric;
  double quality = 0.0;
  double cost_flops = 0.0;

  bool operator==(const QualityCostPoint&) const = default;
};

/// `a` dominates `b` when it is no worse on both axes and strictly better on one.
bool dominates(const QualityCostPoint& a, const QualityCostPoint& b);

/// Non-dominated points, ordered by ascending cost (then metric name).
/// Points identical in both quality and cost are all kept.
/// Throws ValidationError on empty input, duplicate metric names, a
/// non-finite quality or a non-positive cost.
std::vector<QualityCostPoint> pareto_frontier(std::vector<QualityCostPoint> points);

}  // namespace segeval
