// SPDX-License-Identifier: Apache-2.0

#include "segeval/reporting.hpp"

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "builders.hpp"
#include "segeval/error.hpp"
#include "segeval/io.hpp"
#include "segeval/synth.hpp"

namespace segeval {
namespace {

SegMetricResult result(std::string seg, std::string metric, double rank, Subset subset = Subset::synth) {
  return {std::move(seg), std::move(metric), subset, rank, 0.0, 0.0, 1, 1};
}

TEST(CorrelationMatrix, SelfNegationAndMonotone) {
  std::vector<SegMetricResult> rs;
  const double a[] = {0.1, 0.5, 0.3, 0.9, 0.7};
  for (int i = 0; i < 5; ++i) {
    auto id = "s" + std::to_string(i);
    rs.push_back(result(id, "a", a[i]));
    rs.push_back(result(id, "b", a[i] * a[i]));
    rs.push_back(result(id, "neg", -a[i]));
  }
  auto m = metric_correlation_matrix(rs, Basis::rank);
  ASSERT_EQ(m.metric_names, (std::vector<std::string>{"a", "b", "neg"}));
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(m.values[i][i], 1.0);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(m.values[i][j], m.values[j][i]);
  }
  EXPECT_EQ(m.values[0][1], 1.0);
  EXPECT_EQ(m.values[0][2], -1.0);
  auto p = metric_correlation_matrix(rs, Basis::rank, {}, CorrelationKind::pearson);
  EXPECT_LT(p.values[0][1], 1.0);
  EXPECT_NEAR(p.values[0][2], -1.0, 1e-12);
}

TEST(CorrelationMatrix, RequiresMatchingCoverage) {
  std::vector<SegMetricResult> rs{result("s1", "a", 0.1), result("s2", "a", 0.2), result("s1", "b", 0.3)};
  EXPECT_THROW(metric_correlation_matrix(rs, Basis::rank), CoverageError);
}

TEST(CorrelationMatrix, SubsetFilter) {
  std::vector<SegMetricResult> rs{result("s1", "a", 0.1, Subset::real), result("s1", "b", 0.2, Subset::real),
                                  result("s2", "a", 0.2, Subset::real), result("s2", "b", 0.1, Subset::real),
                                  result("s3", "a", 0.9), result("s3", "b", 0.9)};
  auto real = metric_correlation_matrix(rs, Basis::rank, Subset::real);
  EXPECT_EQ(real.values[0][1], -1.0);
}

TEST(Histogram, Examples) {
  std::vector<SegMetricResult> ones{result("a", "m", 1), result("b", "m", 1), result("c", "m", 1)};
  auto bins = histogram_data(ones, "m", Basis::rank, 2);
  ASSERT_EQ(bins.size(), 2u);
  EXPECT_EQ(bins[0].lower, -1.0);
  EXPECT_EQ(bins[0].upper, 0.0);
  EXPECT_EQ(bins[0].count, 0u);
  EXPECT_EQ(bins[1].upper, 1.0);
  EXPECT_EQ(bins[1].count, 3u);

  std::vector<SegMetricResult> spread{result("a", "m", -1), result("b", "m", 0), result("c", "m", 1)};
  bins = histogram_data(spread, "m", Basis::rank, 4);
  std::vector<std::size_t> counts;
  for (const auto& b : bins) counts.push_back(b.count);
  EXPECT_EQ(counts, (std::vector<std::size_t>{1, 0, 1, 1}));
  EXPECT_THROW(histogram_data(spread, "m", Basis::rank, 0), std::invalid_argument);
}

TEST(Histogram, CountsSumToInput) {
  SynthConfig config;
  config.seg_count = 30;
  auto segs = generate_segs(config);
  auto noisy = oracle_scores(segs, {OracleKind::noisy, 0.4, 3});
  auto rs = evaluate_metric(segs, noisy);
  for (Basis b : {Basis::rank, Basis::sep, Basis::delta}) {
    for (std::size_t n : {1u, 3u, 7u, 20u}) {
      std::size_t total = 0;
      for (const auto& bin : histogram_data(rs, "noisy", b, n)) total += bin.count;
      EXPECT_EQ(total, rs.size());
    }
  }
}

TEST(WalkLines, ChainExample) {
  auto seg = testing::chain3();
  auto scores = testing::node_scores(seg, "m", {{"0", {0.9}}, {"1", {0.5}}, {"2", {0.2}}});
  auto pts = walk_line_data(seg, scores);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[0].normalized_rank, 0.0);
  EXPECT_EQ(pts[1].normalized_rank, 0.5);
  EXPECT_EQ(pts[2].normalized_rank, 1.0);
  EXPECT_EQ(pts[0].score, 0.9);
  EXPECT_EQ(pts[2].score, 0.2);
}

TEST(BuildReport, SingleSegSingleMetric) {
  SegCollection segs({testing::chain3()});
  auto scores = oracle_scores(segs, {OracleKind::perfect});
  auto bundle = build_report(segs, {&scores});
  ASSERT_EQ(bundle.per_seg.size(), 1u);
  auto csv = render_per_seg_csv(bundle.per_seg);
  EXPECT_EQ(csv, "metric,seg_id,subset,rank,sep,delta,walks,pairs\nperfect,chain,synth,1,1," +
                     format_number(bundle.per_seg[0].delta) + ",1,2\n");
  auto json = nlohmann::json::parse(render_report_json(bundle));
  EXPECT_EQ(json["metrics"]["perfect"]["overall"]["rank"], 1.0);
  EXPECT_EQ(json["metrics"]["perfect"]["display"]["overall"]["rank"], 100.0);
}

TEST(BuildReport, TwoMetricsEmitDeterministically) {
  SynthConfig config;
  config.seg_count = 6;
  auto segs = generate_segs(config);
  auto perfect = oracle_scores(segs, {OracleKind::perfect});
  auto noisy = oracle_scores(segs, {OracleKind::noisy, 0.2, 1});
  auto bundle = build_report(segs, {&perfect, &noisy});
  ASSERT_EQ(bundle.correlations.size(), 2u);
  EXPECT_EQ(bundle.correlations[0].values.size(), 2u);

  auto a = testing::temp_dir("report_a");
  auto b = testing::temp_dir("report_b");
  auto files_a = emit_report(bundle, a);
  auto files_b = emit_report(build_report(segs, {&noisy, &perfect}), b);
  ASSERT_EQ(files_a.size(), files_b.size());
  for (std::size_t i = 0; i < files_a.size(); ++i) {
    EXPECT_EQ(files_a[i].filename(), files_b[i].filename());
    EXPECT_EQ(read_text_file(files_a[i]), read_text_file(files_b[i])) << files_a[i];
  }
  auto quality = read_report_quality(a / "report.json", Basis::rank);
  EXPECT_EQ(quality.at("perfect"), 100.0);
}

TEST(AggregateTable, Rows) {
  SegCollection segs({testing::make_seg("a", {{"0", 0, {"x"}}, {"1", 1, {"y"}}}, {{"0", "1"}}, Subset::nat)});
  auto perfect = oracle_scores(segs, {OracleKind::perfect});
  auto bundle = build_report(segs, {&perfect});
  auto table = render_aggregate_table(bundle.aggregates);
  EXPECT_NE(table.find("Avg"), std::string::npos);
  EXPECT_NE(table.find("Nat"), std::string::npos);
  EXPECT_NE(table.find("100.00"), std::string::npos);
}

}  // namespace
}  // namespace segeval
