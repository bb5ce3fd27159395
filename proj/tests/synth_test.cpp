// SPDX-License-Identifier: Apache-2.0

#include "segeval/synth.hpp"

#include <gtest/gtest.h>

#include "segeval/error.hpp"
#include "segeval/metametrics.hpp"
#include "segeval/walks.hpp"

namespace segeval {
namespace {

TEST(SeededRng, Reproducible) {
  SeededRng a(7), b(7), c(8);
  for (int i = 0; i < 100; ++i) {
    auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
  }
  SeededRng r(1);
  for (int i = 0; i < 1000; ++i) {
    auto k = r.uniform_int(-3, 3);
    EXPECT_GE(k, -3);
    EXPECT_LE(k, 3);
    auto u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
}

TEST(GenerateSegs, TwoNodeChain) {
  SynthConfig config;
  config.nodes_per_seg = {2, 2};
  auto segs = generate_segs(config);
  ASSERT_EQ(segs.size(), 1u);
  const auto& seg = *segs.begin();
  EXPECT_EQ(seg.nodes.size(), 2u);
  EXPECT_EQ(seg.edges.size(), 1u);
  EXPECT_TRUE(validate_seg(seg).ok());
}

TEST(GenerateSegs, SameSeedSameOutput) {
  SynthConfig config;
  config.seg_count = 8;
  auto a = generate_segs(config);
  auto b = generate_segs(config);
  auto it = b.begin();
  for (const auto& seg : a) EXPECT_EQ(serialize_seg(seg), serialize_seg(*it++));
  config.seed = 2;
  EXPECT_NE(serialize_seg(*generate_segs(config).begin()), serialize_seg(*a.begin()));
}

TEST(GenerateSegs, PrefixStableAcrossCounts) {
  SynthConfig small;
  small.seg_count = 3;
  SynthConfig big = small;
  big.seg_count = 9;
  auto a = generate_segs(small);
  auto b = generate_segs(big);
  auto it = b.begin();
  for (const auto& seg : a) EXPECT_EQ(serialize_seg(seg), serialize_seg(*it++));
}

TEST(GenerateSegs, FullBranchingYieldsSeveralWalks) {
  SynthConfig config;
  config.nodes_per_seg = {4, 4};
  config.branch_probability = 1.0;
  config.seg_count = 20;
  for (const auto& seg : generate_segs(config)) EXPECT_GE(enumerate_walks(seg).size(), 2u) << seg.id;
}

TEST(GenerateSegs, AllValid) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SynthConfig config;
    config.seed = seed;
    config.seg_count = 10;
    config.branch_probability = 0.2 * static_cast<double>(seed % 6);
    config.multi_error_edge_probability = 0.5;
    for (const auto& seg : generate_segs(config)) {
      auto report = validate_seg(seg);
      EXPECT_TRUE(report.ok()) << seg.id << ": " << (report.ok() ? "" : report.violations[0].message);
      EXPECT_GE(static_cast<int>(seg.nodes.size()), config.nodes_per_seg.min);
      EXPECT_LE(static_cast<int>(seg.nodes.size()), config.nodes_per_seg.max);
    }
  }
}

TEST(ValidateSynthConfig, Rejects) {
  SynthConfig c;
  c.seg_count = 0;
  EXPECT_THROW(validate_synth_config(c), ValidationError);
  c = {};
  c.nodes_per_seg = {5, 3};
  EXPECT_THROW(validate_synth_config(c), ValidationError);
  c = {};
  c.nodes_per_seg = {1, 3};
  EXPECT_THROW(validate_synth_config(c), ValidationError);
  c = {};
  c.branch_probability = 1.5;
  EXPECT_THROW(validate_synth_config(c), ValidationError);
  c = {};
  c.noise_sigma = -1;
  EXPECT_THROW(validate_synth_config(c), ValidationError);
  EXPECT_NO_THROW(validate_synth_config({}));
}

double mean_rank(const SegCollection& segs, double sigma) {
  auto scores = oracle_scores(segs, {OracleKind::noisy, sigma, 77});
  double sum = 0;
  auto rs = evaluate_metric(segs, scores);
  for (const auto& r : rs) sum += r.rank;
  return sum / static_cast<double>(rs.size());
}

TEST(OracleScores, NoiseDegradesRank) {
  SynthConfig config;
  config.seg_count = 60;
  auto segs = generate_segs(config);
  EXPECT_EQ(mean_rank(segs, 0.0), 1.0);
  EXPECT_GT(mean_rank(segs, 0.05), mean_rank(segs, 0.5));
}

TEST(OracleScores, RangeAndNames) {
  SynthConfig config;
  config.seg_count = 5;
  auto segs = generate_segs(config);
  auto noisy = oracle_scores(segs, {OracleKind::noisy, 2.0, 1}, "custom");
  EXPECT_EQ(noisy.metric(), "custom");
  for (const auto& [_, v] : noisy.entries()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_EQ(oracle_scores(segs, {OracleKind::inverse}).metric(), "inverse");
}

TEST(AnswerFixture, CoversEveryImage) {
  SynthConfig config;
  config.seg_count = 10;
  auto segs = generate_segs(config);
  auto fixture = generate_answer_fixture(segs, 3);
  EXPECT_EQ(fixture.graphs.size(), segs.size());
  auto tifa = accumulate_scores(fixture.graphs, fixture.answers, AccumulationMode::tifa, "x");
  auto dsg = accumulate_scores(fixture.graphs, fixture.answers, AccumulationMode::dsg, "x");
  std::size_t images = 0;
  for (const auto& seg : segs) images += seg.image_count();
  EXPECT_EQ(tifa.entries().size(), images);
  for (const auto& [key, v] : dsg.entries()) EXPECT_LE(v, tifa.entries().at(key));
}

}  // namespace
}  // namespace segeval
