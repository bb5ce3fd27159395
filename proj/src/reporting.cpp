// SPDX-License-Identifier: Apache-2.0

#include "segeval/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "segeval/error.hpp"
#include "segeval/io.hpp"

namespace segeval {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Basis basis) {
  switch (basis) {
    case Basis::rank:
      return "rank";
    case Basis::sep:
      return "sep";
    case Basis::delta:
      return "delta";
  }
  return "rank";
}

std::optional<Basis> parse_basis(std::string_view text) {
  if (text == "rank") return Basis::rank;
  if (text == "sep") return Basis::sep;
  if (text == "delta") return Basis::delta;
  return std::nullopt;
}

double basis_value(const SegMetricResult& r, Basis basis) {
  return basis == Basis::rank ? r.rank : basis == Basis::sep ? r.sep : r.delta;
}

double basis_value(const MetaMeans& m, Basis basis) {
  return basis == Basis::rank ? m.rank : basis == Basis::sep ? m.sep : m.delta;
}

std::string_view to_string(CorrelationKind kind) {
  return kind == CorrelationKind::spearman ? "spearman" : "pearson";
}

std::optional<CorrelationKind> parse_correlation_kind(std::string_view text) {
  if (text == "spearman") return CorrelationKind::spearman;
  if (text == "pearson") return CorrelationKind::pearson;
  return std::nullopt;
}

CorrelationMatrix metric_correlation_matrix(const std::vector<SegMetricResult>& results,
                                            Basis basis, std::optional<Subset> subset,
                                            CorrelationKind kind, TieMode tie_mode) {
  std::map<std::string, std::map<std::string, double>> series;  // metric -> seg -> value
  for (const auto& r : results) {
    if (subset && r.subset != *subset) continue;
    series[r.metric][r.seg_id] = basis_value(r, basis);
  }
  if (series.empty()) throw CoverageError("correlation matrix: no results after filtering", {});

  const auto& reference = series.begin()->second;
  for (const auto& [metric, values] : series) {
    std::vector<std::string> gaps;
    for (const auto& [seg, _] : reference) {
      if (!values.count(seg)) gaps.push_back(metric + " lacks " + seg);
    }
    for (const auto& [seg, _] : values) {
      if (!reference.count(seg)) gaps.push_back(series.begin()->first + " lacks " + seg);
    }
    if (!gaps.empty()) {
      auto what = fmt::format("correlation matrix: metrics cover different SEGs ({})", gaps.front());
      throw CoverageError(std::move(what), std::move(gaps));
    }
  }

  CorrelationMatrix m;
  m.basis = basis;
  m.subset = subset;
  m.kind = kind;
  std::vector<std::vector<double>> columns;
  for (const auto& [metric, values] : series) {
    m.metric_names.push_back(metric);
    auto& col = columns.emplace_back();
    for (const auto& [_, v] : values) col.push_back(v);
  }
  const auto n = columns.size();
  m.values.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double r = kind == CorrelationKind::spearman ? spearman_rho(columns[i], columns[j], tie_mode)
                                                   : pearson_r(columns[i], columns[j]);
      m.values[i][j] = r;
      m.values[j][i] = r;
    }
  }
  return m;
}

std::vector<HistogramBin> histogram_data(const std::vector<SegMetricResult>& results,
                                         std::string_view metric, Basis basis,
                                         std::size_t bin_count, std::optional<Subset> subset) {
  if (bin_count == 0) throw std::invalid_argument("histogram_data: bin_count must be >= 1");
  std::vector<double> values;
  for (const auto& r : results) {
    if (r.metric != metric || (subset && r.subset != *subset)) continue;
    values.push_back(basis_value(r, basis));
  }
  if (values.empty()) {
    throw CoverageError(fmt::format("histogram: no {} results for metric {}", to_string(basis), metric), {});
  }

  double lo = basis == Basis::rank ? -1.0 : 0.0;
  double hi = 1.0;
  if (basis == Basis::delta) {
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    lo = *mn;
    hi = *mx;
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  const double width = (hi - lo) / static_cast<double>(bin_count);
  auto edge = [&](std::size_t i) {
    return i == bin_count ? hi : lo + width * static_cast<double>(i);
  };

  std::vector<HistogramBin> bins(bin_count);
  for (std::size_t i = 0; i < bin_count; ++i) bins[i] = {edge(i), edge(i + 1), 0};
  for (double v : values) {
    if (v < lo || v > hi) {
      throw ValidationError(fmt::format("histogram: value {} outside [{}, {}]", v, lo, hi));
    }
    auto idx = static_cast<std::size_t>(
        std::min<double>(std::floor((v - lo) / width), static_cast<double>(bin_count - 1)));
    // Snap to the half-open edges actually reported.
    while (idx > 0 && v < bins[idx].lower) --idx;
    while (idx + 1 < bin_count && v >= bins[idx + 1].lower) ++idx;
    ++bins[idx].count;
  }
  return bins;
}

std::vector<LinePoint> walk_line_data(const SemanticErrorGraph& seg, const ScoreTable& scores) {
  std::vector<LinePoint> points;
  auto walks = enumerate_walks(seg);
  std::vector<std::string> missing;
  for (std::size_t w = 0; w < walks.size(); ++w) {
    auto triples = walk_triples(seg, walks[w]);
    int max_count = 0;
    for (const auto& e : triples.entries) max_count = std::max(max_count, e.error_count);
    for (const auto& e : triples.entries) {
      auto score = scores.find(seg.id, e.image_id);
      if (!score) {
        missing.push_back(seg.id + "/" + e.image_id);
        continue;
      }
      points.push_back({w, e.image_id, static_cast<double>(e.error_count) / max_count, *score});
    }
  }
  if (!missing.empty()) {
    throw CoverageError(fmt::format("metric {}: missing scores in seg {}", scores.metric(), seg.id),
                        std::move(missing));
  }
  return points;
}

ReportBundle build_report(const SegCollection& collection,
                          const std::vector<const ScoreTable*>& tables,
                          const ReportOptions& options) {
  if (tables.empty()) throw CoverageError("no metrics to score", {});
  ReportBundle bundle;
  bundle.options = options;

  SegCollection scope = collection;
  if (options.subset) {
    std::vector<SemanticErrorGraph> kept;
    for (const auto& seg : collection) {
      if (seg.subset == *options.subset) kept.push_back(seg);
    }
    if (kept.empty()) {
      throw CoverageError(fmt::format("no SEGs in subset {}", to_string(*options.subset)), {});
    }
    scope = SegCollection(std::move(kept));
  }

  std::vector<const ScoreTable*> sorted(tables);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->metric() < b->metric(); });
  for (const auto* table : sorted) {
    auto results = evaluate_metric(collection, *table, options.meta, options.subset);
    bundle.per_seg.insert(bundle.per_seg.end(), results.begin(), results.end());
    for (const auto& seg : scope) {
      for (auto& point : walk_line_data(seg, *table)) {
        bundle.lines[table->metric()].emplace_back(seg.id, std::move(point));
      }
    }
  }
  bundle.aggregates = aggregate(bundle.per_seg, scope);
  for (auto basis : {Basis::rank, Basis::sep}) {
    bundle.correlations.push_back(metric_correlation_matrix(
        bundle.per_seg, basis, std::nullopt, options.correlation, options.meta.tie_mode));
  }
  for (const auto* table : sorted) {
    for (auto basis : {Basis::rank, Basis::sep}) {
      bundle.histograms[table->metric()][basis] =
          histogram_data(bundle.per_seg, table->metric(), basis, options.histogram_bins);
    }
  }
  return bundle;
}

// ─── Rendering ───────────────────────────────────────────────

namespace {

// Six significant digits, parsed back so the JSON writer emits the short form.
ordered_json number(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

ordered_json means_json(const MetaMeans& m) {
  ordered_json j;
  j["rank"] = number(m.rank);
  j["sep"] = number(m.sep);
  j["delta"] = number(m.delta);
  j["segs"] = m.seg_count;
  return j;
}

std::string subset_label(Subset s) {
  switch (s) {
    case Subset::synth:
      return "Synth";
    case Subset::nat:
      return "Nat";
    case Subset::real:
      return "Real";
  }
  return "";
}

std::string file_safe(std::string_view name) {
  std::string out(name);
  for (auto& c : out) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return out;
}

}  // namespace

std::string render_report_json(const ReportBundle& bundle) {
  ordered_json doc;
  auto& config = doc["config"];
  config["tie_mode"] = std::string(to_string(bundle.options.meta.tie_mode));
  config["pair_mode"] = std::string(to_string(bundle.options.meta.pair_mode));
  config["subset"] = bundle.options.subset ? std::string(to_string(*bundle.options.subset)) : "all";
  config["correlation"] = std::string(to_string(bundle.options.correlation));
  config["histogram_bins"] = bundle.options.histogram_bins;

  doc["metrics"] = ordered_json::object();
  for (const auto& agg : bundle.aggregates.metrics) {
    ordered_json m;
    m["overall"] = means_json(agg.overall);
    m["by_subset"] = ordered_json::object();
    for (const auto& [subset, means] : agg.by_subset) {
      m["by_subset"][std::string(to_string(subset))] = means_json(means);
    }
    ordered_json display;
    display["overall"] = means_json(agg.overall.display());
    display["by_subset"] = ordered_json::object();
    for (const auto& [subset, means] : agg.by_subset) {
      display["by_subset"][std::string(to_string(subset))] = means_json(means.display());
    }
    m["display"] = std::move(display);
    m["missing_segs"] = agg.missing_segs;
    doc["metrics"][agg.metric] = std::move(m);
  }

  doc["correlations"] = ordered_json::object();
  for (const auto& c : bundle.correlations) {
    ordered_json entry;
    entry["kind"] = std::string(to_string(c.kind));
    entry["subset"] = c.subset ? std::string(to_string(*c.subset)) : "all";
    entry["metrics"] = c.metric_names;
    entry["values"] = ordered_json::array();
    for (const auto& row : c.values) {
      auto r = ordered_json::array();
      for (double v : row) r.push_back(number(v));
      entry["values"].push_back(std::move(r));
    }
    doc["correlations"][std::string(to_string(c.basis))] = std::move(entry);
  }
  return doc.dump(2) + "\n";
}

std::string render_per_seg_csv(const std::vector<SegMetricResult>& results) {
  std::string out = "metric,seg_id,subset,rank,sep,delta,walks,pairs\n";
  for (const auto& r : results) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", csv_escape(r.metric), csv_escape(r.seg_id),
                       to_string(r.subset), format_number(r.rank), format_number(r.sep),
                       format_number(r.delta), r.walk_count, r.pair_count);
  }
  return out;
}

std::string render_histogram_csv(const std::vector<HistogramBin>& bins) {
  std::string out = "bin_lower,bin_upper,count\n";
  for (const auto& b : bins) {
    out += fmt::format("{},{},{}\n", format_number(b.lower), format_number(b.upper), b.count);
  }
  return out;
}

std::string render_lines_csv(const std::vector<std::pair<std::string, LinePoint>>& lines) {
  std::string out = "seg_id,walk_index,normalized_rank,score\n";
  for (const auto& [seg_id, p] : lines) {
    out += fmt::format("{},{},{},{}\n", csv_escape(seg_id), p.walk_index,
                       format_number(p.normalized_rank), format_number(p.score));
  }
  return out;
}

std::string render_aggregate_table(const AggregateReport& report, bool display_scale) {
  std::size_t width = 6;
  for (const auto& agg : report.metrics) width = std::max(width, agg.metric.size());
  std::string out = fmt::format("{:<{}}  {:<6} {:>5} {:>9} {:>9} {:>9}\n", "metric", width,
                                "subset", "segs", "rank", "sep", "delta");
  auto row = [&](const std::string& metric, const std::string& label, const MetaMeans& raw) {
    auto m = display_scale ? raw.display() : raw;
    auto spec = display_scale ? "{:>9.2f}" : "{:>9.4f}";
    out += fmt::format("{:<{}}  {:<6} {:>5} ", metric, width, label, m.seg_count);
    out += fmt::format(fmt::runtime(spec), m.rank == 0.0 ? 0.0 : m.rank) + " ";
    out += fmt::format(fmt::runtime(spec), m.sep == 0.0 ? 0.0 : m.sep) + " ";
    out += fmt::format(fmt::runtime(spec), m.delta == 0.0 ? 0.0 : m.delta) + "\n";
  };
  for (const auto& agg : report.metrics) {
    row(agg.metric, "Avg", agg.overall);
    for (const auto& [subset, means] : agg.by_subset) row(agg.metric, subset_label(subset), means);
  }
  return out;
}

std::vector<std::filesystem::path> emit_report(const ReportBundle& bundle,
                                               const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& name, const std::string& text) {
    auto path = out_dir / name;
    write_text_file(path, text);
    written.push_back(path);
  };
  write("report.json", render_report_json(bundle));
  write("per_seg.csv", render_per_seg_csv(bundle.per_seg));
  for (const auto& [metric, by_basis] : bundle.histograms) {
    for (const auto& [basis, bins] : by_basis) {
      write(fmt::format("hist_{}_{}.csv", file_safe(metric), to_string(basis)),
            render_histogram_csv(bins));
    }
  }
  for (const auto& [metric, lines] : bundle.lines) {
    write(fmt::format("lines_{}.csv", file_safe(metric)), render_lines_csv(lines));
  }
  return written;
}

std::map<std::string, double> read_report_quality(const std::filesystem::path& report_json,
                                                  Basis basis, std::optional<Subset> subset) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(report_json));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("{}: malformed JSON: {}", report_json.string(), e.what()));
  }
  auto metrics = doc.find("metrics");
  if (metrics == doc.end() || !metrics->is_object()) {
    throw ParseError(fmt::format("{}: missing \"metrics\" object", report_json.string()));
  }
  std::map<std::string, double> out;
  const auto key = std::string(to_string(basis));
  for (const auto& [name, entry] : metrics->items()) {
    auto shown = entry.find("display");
    if (shown == entry.end() || !shown->is_object()) {
      throw ParseError(fmt::format("{}: metric {} has no \"display\" table", report_json.string(), name));
    }
    const auto& m = *shown;
    const nlohmann::json* table = nullptr;
    if (subset) {
      auto by = m.find("by_subset");
      if (by == m.end() || !by->contains(std::string(to_string(*subset)))) continue;
      table = &(*by)[std::string(to_string(*subset))];
    } else {
      auto it = m.find("overall");
      if (it == m.end()) {
        throw ParseError(fmt::format("{}: metric {} has no \"overall\" table", report_json.string(), name));
      }
      table = &*it;
    }
    if (!table->contains(key) || !(*table)[key].is_number()) {
      throw ParseError(fmt::format("{}: metric {} lacks numeric \"{}\"", report_json.string(), name, key));
    }
    out[name] = (*table)[key].get<double>();
  }
  return out;
}

}  // namespace segeval
