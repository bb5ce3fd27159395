// SPDX-License-Identifier: Apache-2.0

#include "segeval/metametrics.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "segeval/error.hpp"

namespace segeval {

namespace {

using NodeScores = std::unordered_map<std::string, std::vector<double>>;

// Scores of every node's images, in image order. Throws CoverageError listing
// every unscored image of the SEG.
NodeScores collect_node_scores(const SemanticErrorGraph& seg, const ScoreTable& scores) {
  NodeScores out;
  std::vector<std::string> missing;
  for (const auto& node : seg.nodes) {
    auto& values = out[node.id];
    for (const auto& image : node.images) {
      if (auto score = scores.find(seg.id, image)) {
        values.push_back(*score);
      } else {
        missing.push_back(seg.id + "/" + image);
      }
    }
  }
  if (!missing.empty()) {
    throw CoverageError(fmt::format("metric {}: {} missing score(s) in seg {}: {}",
                                    scores.metric(), missing.size(), seg.id,
                                    fmt::join(missing, ", ")),
                        std::move(missing));
  }
  return out;
}

double rank_over_walks(const SemanticErrorGraph& seg, const std::vector<Walk>& walks,
                       const ScoreTable& scores, TieMode tie_mode) {
  double sum = 0.0;
  for (const auto& walk : walks) {
    auto triples = walk_triples(seg, walk);
    std::vector<double> values;
    std::vector<double> errors;
    for (const auto& entry : triples.entries) {
      values.push_back(*scores.find(seg.id, entry.image_id));
      errors.push_back(static_cast<double>(entry.error_count));
    }
    // Faithful metrics score lower as errors grow, so flip the sign.
    sum -= spearman_rho(values, errors, tie_mode);
  }
  return sum / static_cast<double>(walks.size());
}

double sep_over_pairs(const NodeScores& node_scores, const std::vector<NodePair>& pairs) {
  double sum = 0.0;
  for (const auto& [lower, higher] : pairs) {
    sum += ks_statistic(node_scores.at(lower), node_scores.at(higher));
  }
  return sum / static_cast<double>(pairs.size());
}

double delta_over_pairs(const NodeScores& node_scores, const std::vector<NodePair>& pairs,
                        double global_std) {
  if (global_std == 0.0) return 0.0;
  double sum = 0.0;
  for (const auto& [lower, higher] : pairs) {
    sum += mean(node_scores.at(lower)) - mean(node_scores.at(higher));
  }
  return sum / static_cast<double>(pairs.size()) / global_std;
}

}  // namespace

double rank_score(const SemanticErrorGraph& seg, const ScoreTable& scores, TieMode tie_mode) {
  collect_node_scores(seg, scores);
  return rank_over_walks(seg, enumerate_walks(seg), scores, tie_mode);
}

double sep_score(const SemanticErrorGraph& seg, const ScoreTable& scores, PairMode pair_mode) {
  auto node_scores = collect_node_scores(seg, scores);
  return sep_over_pairs(node_scores, adjacent_pairs(seg, pair_mode));
}

double delta_score(const SemanticErrorGraph& seg, const ScoreTable& scores, double global_std,
                   PairMode pair_mode) {
  if (!(global_std >= 0.0)) throw std::invalid_argument("delta_score: negative global_std");
  auto node_scores = collect_node_scores(seg, scores);
  return delta_over_pairs(node_scores, adjacent_pairs(seg, pair_mode), global_std);
}

double global_std(const SegCollection& collection, const ScoreTable& scores) {
  std::vector<double> all;
  std::vector<std::string> missing;
  for (const auto& seg : collection) {
    for (const auto& node : seg.nodes) {
      for (const auto& image : node.images) {
        if (auto score = scores.find(seg.id, image)) {
          all.push_back(*score);
        } else {
          missing.push_back(seg.id + "/" + image);
        }
      }
    }
  }
  if (!missing.empty()) {
    throw CoverageError(fmt::format("metric {}: {} missing score(s): {}", scores.metric(),
                                    missing.size(), fmt::join(missing, ", ")),
                        std::move(missing));
  }
  if (all.empty()) throw CoverageError("global_std: empty collection", {});
  return population_moments(all).std;
}

SegMetricResult evaluate_seg(const SemanticErrorGraph& seg, const ScoreTable& scores,
                             double global_std, const MetaOptions& options) {
  auto node_scores = collect_node_scores(seg, scores);
  auto walks = enumerate_walks(seg);
  auto pairs = adjacent_pairs(walks, options.pair_mode);

  SegMetricResult result;
  result.seg_id = seg.id;
  result.metric = scores.metric();
  result.subset = seg.subset;
  result.rank = rank_over_walks(seg, walks, scores, options.tie_mode);
  result.sep = sep_over_pairs(node_scores, pairs);
  result.delta = delta_over_pairs(node_scores, pairs, global_std);
  result.walk_count = walks.size();
  result.pair_count = pairs.size();
  return result;
}

std::vector<SegMetricResult> evaluate_metric(const SegCollection& collection,
                                             const ScoreTable& scores,
                                             const MetaOptions& options,
                                             std::optional<Subset> subset) {
  const double sigma = global_std(collection, scores);
  std::vector<SegMetricResult> results;
  for (const auto& seg : collection) {
    if (subset && seg.subset != *subset) continue;
    results.push_back(evaluate_seg(seg, scores, sigma, options));
  }
  return results;
}

const MetricAggregate* AggregateReport::find(std::string_view metric) const {
  auto it = std::find_if(metrics.begin(), metrics.end(),
                         [&](const auto& m) { return m.metric == metric; });
  return it == metrics.end() ? nullptr : &*it;
}

namespace {

MetaMeans mean_of(const std::vector<const SegMetricResult*>& rows) {
  MetaMeans m;
  for (const auto* r : rows) {
    m.rank += r->rank;
    m.sep += r->sep;
    m.delta += r->delta;
  }
  m.seg_count = rows.size();
  if (!rows.empty()) {
    const auto n = static_cast<double>(rows.size());
    m.rank /= n;
    m.sep /= n;
    m.delta /= n;
  }
  return m;
}

}  // namespace

AggregateReport aggregate(const std::vector<SegMetricResult>& results,
                          const SegCollection& collection) {
  std::map<std::string, std::vector<const SegMetricResult*>> by_metric;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : results) {
    if (!seen.emplace(r.metric, r.seg_id).second) {
      throw ValidationError(fmt::format("duplicate result for seg {} metric {}", r.seg_id, r.metric));
    }
    if (!collection.find(r.seg_id)) {
      throw ValidationError(fmt::format("result for unknown seg {} (metric {})", r.seg_id, r.metric));
    }
    by_metric[r.metric].push_back(&r);
  }

  AggregateReport report;
  for (const auto& [metric, rows] : by_metric) {
    MetricAggregate agg;
    agg.metric = metric;
    agg.overall = mean_of(rows);
    std::map<Subset, std::vector<const SegMetricResult*>> partition;
    std::set<std::string> covered;
    for (const auto* r : rows) {
      partition[collection.find(r->seg_id)->subset].push_back(r);
      covered.insert(r->seg_id);
    }
    for (const auto& [subset, part] : partition) agg.by_subset[subset] = mean_of(part);
    for (const auto& seg : collection) {
      if (covered.count(seg.id) == 0) agg.missing_segs.push_back(seg.id);
    }
    report.metrics.push_back(std::move(agg));
  }
  return report;
}

}  // namespace segeval
