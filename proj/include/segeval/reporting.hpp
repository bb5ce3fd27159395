// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "segeval/metametrics.hpp"

namespace segeval {

enum class Basis { rank, sep, delta };

std::string_view to_string(Basis basis);
std::optional<Basis> parse_basis(std::string_view text);
double basis_value(const SegMetricResult& result, Basis basis);
double basis_value(const MetaMeans& means, Basis basis);

enum class CorrelationKind { spearman, pearson };

std::string_view to_string(CorrelationKind kind);
std::optional<CorrelationKind> parse_correlation_kind(std::string_view text);

struct CorrelationMatrix {
  std::vector<std::string> metric_names;  // sorted
  std::vector<std::vector<double>> values;
  Basis basis = Basis::rank;
  std::optional<Subset> subset;
  CorrelationKind kind = CorrelationKind::spearman;
};

/// Correlates the per-SEG series of every pair of metrics. Series are aligned
/// by seg id; every metric must cover the same SEGs after filtering
/// (CoverageError otherwise). Constant series correlate as 0.
CorrelationMatrix metric_correlation_matrix(const std::vector<SegMetricResult>& results,
                                            Basis basis, std::optional<Subset> subset = {},
                                            CorrelationKind kind = CorrelationKind::spearman,
                                            TieMode tie_mode = TieMode::midrank);

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

/// Equal-width bins, half-open [lower, upper) except the last, which is closed.
/// Range is [-1, 1] for rank, [0, 1] for sep and the data range for delta.
/// Throws CoverageError when no result matches.
std::vector<HistogramBin> histogram_data(const std::vector<SegMetricResult>& results,
                                         std::string_view metric, Basis basis,
                                         std::size_t bin_count,
                                         std::optional<Subset> subset = {});

struct LinePoint {
  std::size_t walk_index = 0;
  std::string image_id;
  double normalized_rank = 0.0;  // error_count / max error_count in the walk
  double score = 0.0;
};

/// One point per image of every walk, walks in enumeration order.
std::vector<LinePoint> walk_line_data(const SemanticErrorGraph& seg, const ScoreTable& scores);

struct ReportOptions {
  MetaOptions meta;
  std::optional<Subset> subset;
  CorrelationKind correlation = CorrelationKind::spearman;
  std::size_t histogram_bins = 10;
};

struct ReportBundle {
  ReportOptions options;
  AggregateReport aggregates;
  std::vector<SegMetricResult> per_seg;  // ordered by (metric, seg id)
  std::vector<CorrelationMatrix> correlations;  // rank and sep
  std::map<std::string, std::map<Basis, std::vector<HistogramBin>>> histograms;
  std::map<std::string, std::vector<std::pair<std::string, LinePoint>>> lines;  // (seg id, point)
};

/// Runs every meta-metric for each table over `collection` and assembles all
/// report sections.
ReportBundle build_report(const SegCollection& collection,
                          const std::vector<const ScoreTable*>& tables,
                          const ReportOptions& options = {});

std::string render_report_json(const ReportBundle& bundle);
std::string render_per_seg_csv(const std::vector<SegMetricResult>& results);
std::string render_histogram_csv(const std::vector<HistogramBin>& bins);
std::string render_lines_csv(const std::vector<std::pair<std::string, LinePoint>>& lines);

/// Fixed-width summary table. `display_scale` multiplies values by 100.
std::string render_aggregate_table(const AggregateReport& report, bool display_scale = true);

/// Writes report.json, per_seg.csv, hist_<metric>_<basis>.csv and
/// lines_<metric>.csv into `out_dir`. Output is byte-stable for equal inputs.
std::vector<std::filesystem::path> emit_report(const ReportBundle& bundle,
                                               const std::filesystem::path& out_dir);

/// Reads metric -> quality back from an emitted report.json, on the display
/// (x100) scale.
std::map<std::string, double> read_report_quality(const std::filesystem::path& report_json,
                                                  Basis basis,
                                                  std::optional<Subset> subset = {});

}  // namespace segeval
