// SPDX-License-Identifier: Apache-2.0

#include "segeval/cost_pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "segeval/error.hpp"
#include "segeval/io.hpp"

namespace segeval {

using nlohmann::json;

void validate_cost_model(const CostModel& model) {
  if (model.metric.empty()) throw ValidationError("cost model with empty metric name");
  if (model.stages.empty()) {
    throw ValidationError(fmt::format("cost model {}: at least one stage is required", model.metric));
  }
  for (std::size_t i = 0; i < model.stages.size(); ++i) {
    const auto& s = model.stages[i];
    if (s.calls <= 0 || s.tokens_per_call <= 0 || !(s.model_params > 0.0) ||
        !std::isfinite(s.model_params)) {
      throw ValidationError(fmt::format(
          "cost model {}: stage {} must have positive calls, tokens_per_call and model_params",
          model.metric, i));
    }
  }
}

double estimate_flops(const CostModel& model) {
  validate_cost_model(model);
  double total = 0.0;
  for (const auto& s : model.stages) {
    const auto tokens = static_cast<double>(s.calls) * static_cast<double>(s.tokens_per_call);
    total += tokens * 2.0 * s.model_params;
  }
  return total;
}

namespace {

CostModel parse_model(const json& doc, const std::string& where) {
  if (!doc.is_object()) throw ParseError(fmt::format("{}: expected an object", where));
  auto metric = doc.find("metric");
  if (metric == doc.end()) throw ParseError(fmt::format("{}: missing required field \"metric\"", where));
  if (!metric->is_string()) throw ParseError(fmt::format("{}: field \"metric\": expected a string", where));
  auto stages = doc.find("stages");
  if (stages == doc.end()) throw ParseError(fmt::format("{}: missing required field \"stages\"", where));
  if (!stages->is_array()) throw ParseError(fmt::format("{}: field \"stages\": expected an array", where));

  CostModel model;
  model.metric = metric->get<std::string>();
  for (std::size_t i = 0; i < stages->size(); ++i) {
    const auto& st = (*stages)[i];
    auto at = fmt::format("{}.stages[{}]", where, i);
    if (!st.is_object()) throw ParseError(fmt::format("{}: expected an object", at));
    CostStage stage;
    for (const char* name : {"calls", "tokens_per_call", "model_params"}) {
      auto it = st.find(name);
      if (it == st.end()) throw ParseError(fmt::format("{}: missing required field \"{}\"", at, name));
      bool integer_field = std::string_view(name) != "model_params";
      if (integer_field ? !it->is_number_integer() : !it->is_number()) {
        throw ParseError(fmt::format("{}: field \"{}\": expected {}", at, name,
                                     integer_field ? "an integer" : "a number"));
      }
    }
    stage.calls = st["calls"].get<long long>();
    stage.tokens_per_call = st["tokens_per_call"].get<long long>();
    stage.model_params = st["model_params"].get<double>();
    model.stages.push_back(stage);
  }
  validate_cost_model(model);
  return model;
}

}  // namespace

CostModelSet parse_cost_models(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: malformed JSON: {}", source, e.what()));
  }
  CostModelSet models;
  auto add = [&](const json& item, const std::string& where) {
    auto model = parse_model(item, where);
    auto name = model.metric;
    if (!models.emplace(name, std::move(model)).second) {
      throw ValidationError(fmt::format("{}: duplicate cost model for metric {}", source, name));
    }
  };
  if (doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i) add(doc[i], fmt::format("{}[{}]", source, i));
  } else {
    add(doc, source);
  }
  return models;
}

CostModelSet load_cost_models(const std::filesystem::path& path) {
  return parse_cost_models(read_text_file(path), path.string());
}

bool dominates(const QualityCostPoint& a, const QualityCostPoint& b) {
  return a.quality >= b.quality && a.cost_flops <= b.cost_flops &&
         (a.quality > b.quality || a.cost_flops < b.cost_flops);
}

std::vector<QualityCostPoint> pareto_frontier(std::vector<QualityCostPoint> points) {
  if (points.empty()) throw ValidationError("pareto_frontier: no points");
  std::set<std::string> names;
  for (const auto& p : points) {
    if (!names.insert(p.metric).second) {
      throw ValidationError(fmt::format("pareto_frontier: duplicate metric {}", p.metric));
    }
    if (!std::isfinite(p.quality) || !(p.cost_flops > 0.0) || !std::isfinite(p.cost_flops)) {
      throw ValidationError(
          fmt::format("pareto_frontier: metric {} needs finite quality and positive cost", p.metric));
    }
  }

  // Sweep by ascending cost. Within one cost level only the best quality can
  // survive, and only if it beats everything strictly cheaper.
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
    if (a.cost_flops != b.cost_flops) return a.cost_flops < b.cost_flops;
    if (a.quality != b.quality) return a.quality > b.quality;
    return a.metric < b.metric;
  });
  std::vector<QualityCostPoint> frontier;
  double best_cheaper = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < points.size()) {
    std::size_t j = i;
    while (j < points.size() && points[j].cost_flops == points[i].cost_flops) ++j;
    const double level_best = points[i].quality;
    if (level_best > best_cheaper) {
      for (auto k = i; k < j && points[k].quality == level_best; ++k) frontier.push_back(points[k]);
    }
    best_cheaper = std::max(best_cheaper, level_best);
    i = j;
  }
  return frontier;
}

}  // namespace segeval
