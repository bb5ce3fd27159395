// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "segeval/score_table.hpp"
#include "segeval/seg.hpp"
#include "segeval/stats.hpp"
#include "segeval/walks.hpp"

namespace segeval {

// ─── Meta-metrics ────────────────────────────────────────────
// rank: how well a metric orders images along each walk (negated Spearman
//       correlation of score against error count, so +1 is ideal).
// sep:  mean KS statistic between score populations of adjacent nodes.
// delta: mean drop in node-mean score between adjacent nodes, in units of
//        the metric's standard deviation over the whole collection.
//
// Every image of a SEG must be scored; gaps raise CoverageError.

struct MetaOptions {
  TieMode tie_mode = TieMode::midrank;
  PairMode pair_mode = PairMode::per_walk;
};

struct SegMetricResult {
  std::string seg_id;
  std::string metric;
  Subset subset = Subset::synth;
  double rank = 0.0;
  double sep = 0.0;
  double delta = 0.0;
  std::size_t walk_count = 0;
  std::size_t pair_count = 0;
};

double rank_score(const SemanticErrorGraph& seg, const ScoreTable& scores,
                  TieMode tie_mode = TieMode::midrank);

double sep_score(const SemanticErrorGraph& seg, const ScoreTable& scores,
                 PairMode pair_mode = PairMode::per_walk);

/// Returns 0 when `global_std` is 0.
double delta_score(const SemanticErrorGraph& seg, const ScoreTable& scores, double global_std,
                   PairMode pair_mode = PairMode::per_walk);

/// Population std of the metric over every image of every SEG in `collection`.
double global_std(const SegCollection& collection, const ScoreTable& scores);

SegMetricResult evaluate_seg(const SemanticErrorGraph& seg, const ScoreTable& scores,
                             double global_std, const MetaOptions& options = {});

/// All SEGs of `collection` (optionally one subset) for one metric. The
/// normalising std is always taken over the full collection.
std::vector<SegMetricResult> evaluate_metric(const SegCollection& collection,
                                             const ScoreTable& scores,
                                             const MetaOptions& options = {},
                                             std::optional<Subset> subset = std::nullopt);

struct MetaMeans {
  double rank = 0.0;
  double sep = 0.0;
  double delta = 0.0;
  std::size_t seg_count = 0;

  /// Percent scaling used for display only.
  MetaMeans display() const { return {rank * 100.0, sep * 100.0, delta * 100.0, seg_count}; }
};

struct MetricAggregate {
  std::string metric;
  MetaMeans overall;
  std::map<Subset, MetaMeans> by_subset;  // only subsets with results
  // Collection SEGs with no result for this metric.
  std::vector<std::string> missing_segs;
};

struct AggregateReport {
  std::vector<MetricAggregate> metrics;  // sorted by metric name

  const MetricAggregate* find(std::string_view metric) const;
};

/// Unweighted means per subset and overall. Throws ValidationError on a
/// duplicate (seg, metric) result or a result for a SEG outside `collection`.
AggregateReport aggregate(const std::vector<SegMetricResult>& results,
                          const SegCollection& collection);

}  // namespace segeval
