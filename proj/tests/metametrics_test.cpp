// SPDX-License-Identifier: Apache-2.0

#include "segeval/metametrics.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "builders.hpp"
#include "oracles.hpp"
#include "segeval/error.hpp"
#include "segeval/synth.hpp"

namespace segeval {
namespace {

using testing::chain3;
using testing::diamond;
using testing::make_seg;
using testing::node_scores;

TEST(RankScore, PerfectAndConstantChain) {
  auto seg = chain3();
  EXPECT_EQ(rank_score(seg, node_scores(seg, "m", {{"0", {0.9}}, {"1", {0.5}}, {"2", {0.2}}})), 1.0);
  EXPECT_EQ(rank_score(seg, node_scores(seg, "m", {{"0", {0.4}}, {"1", {0.4}}, {"2", {0.4}}})), 0.0);
}

TEST(RankScore, DiamondAveragesWalks) {
  auto seg = diamond();
  auto scores = node_scores(seg, "m", {{"0", {1.0}}, {"1a", {0.6}}, {"1b", {0.2}}, {"2", {0.4}}});
  // Walk A (1.0, 0.6, 0.4) -> +1; walk B (1.0, 0.2, 0.4) -> +0.5.
  EXPECT_NEAR(rank_score(seg, scores), 0.75, 1e-15);
  EXPECT_NEAR(oracle::rank_score_brute(seg, [&](const std::string& img) { return *scores.find(seg.id, img); }),
              0.75, 1e-15);
}

TEST(RankScore, TieConventions) {
  auto seg = make_seg("tie", {{"0", 0, {"a"}}, {"1", 1, {"b", "c"}}, {"2", 2, {"d"}}},
                      {{"0", "1"}, {"1", "2"}});
  auto tied = node_scores(seg, "m", {{"0", {1.0}}, {"1", {0.5, 0.5}}, {"2", {0.0}}});
  auto split = node_scores(seg, "m", {{"0", {1.0}}, {"1", {0.51, 0.49}}, {"2", {0.0}}});
  EXPECT_EQ(rank_score(seg, tied, TieMode::midrank), 1.0);
  EXPECT_NEAR(rank_score(seg, split, TieMode::midrank), 0.9486832980505138, 1e-12);
  EXPECT_NEAR(rank_score(seg, tied, TieMode::countbelow), 17.0 / 19.0, 1e-12);
}

TEST(RankScore, MissingScoresListed) {
  auto seg = chain3();
  ScoreTable partial("m");
  partial.set("chain", "0-0.jpg", 1.0);
  try {
    rank_score(seg, partial);
    FAIL();
  } catch (const CoverageError& e) {
    EXPECT_EQ(e.missing(), (std::vector<std::string>{"chain/1-0.jpg", "chain/2-0.jpg"}));
  }
}

TEST(SepScore, Examples) {
  auto seg = make_seg("s", {{"0", 0, {"a", "b"}}, {"1", 1, {"c", "d"}}, {"2", 2, {"e", "f"}}},
                      {{"0", "1"}, {"1", "2"}});
  EXPECT_EQ(sep_score(seg, node_scores(seg, "m", {{"0", {0.9, 0.8}}, {"1", {0.5, 0.6}}, {"2", {0.1, 0.2}}})),
            1.0);
  EXPECT_EQ(sep_score(seg, node_scores(seg, "m", {{"0", {0.3, 0.7}}, {"1", {0.7, 0.3}}, {"2", {0.3, 0.7}}})),
            0.0);
  auto two = make_seg("t", {{"0", 0, {"a", "b"}}, {"1", 1, {"c", "d"}}}, {{"0", "1"}});
  EXPECT_EQ(sep_score(two, node_scores(two, "m", {{"0", {0.1, 0.5}}, {"1", {0.3, 0.7}}})), 0.5);
}

TEST(DeltaScore, Examples) {
  auto two = make_seg("t", {{"0", 0, {"a", "b"}}, {"1", 1, {"c", "d"}}}, {{"0", "1"}});
  auto scores = node_scores(two, "m", {{"0", {0.8, 1.0}}, {"1", {0.4, 0.6}}});
  SegCollection collection({two});
  const double sigma = global_std(collection, scores);
  EXPECT_NEAR(sigma, 0.22360679774997896, 1e-15);
  EXPECT_NEAR(delta_score(two, scores, sigma), 1.788854381999832, 1e-12);

  auto constant = node_scores(two, "m", {{"0", {0.5, 0.5}}, {"1", {0.5, 0.5}}});
  EXPECT_EQ(global_std(collection, constant), 0.0);
  EXPECT_EQ(delta_score(two, constant, 0.0), 0.0);

  auto inverted = node_scores(two, "m", {{"0", {0.4, 0.6}}, {"1", {0.8, 1.0}}});
  EXPECT_NEAR(delta_score(two, inverted, sigma), -1.788854381999832, 1e-12);
  EXPECT_THROW(delta_score(two, scores, -1.0), std::invalid_argument);
}

TEST(GlobalStd, ConcatenatesSegs) {
  auto a = make_seg("a", {{"0", 0, {"x"}}, {"1", 1, {"y"}}}, {{"0", "1"}});
  auto b = make_seg("b", {{"0", 0, {"x"}}, {"1", 1, {"y"}}}, {{"0", "1"}});
  ScoreTable t("m");
  t.set("a", "x", 0.8);
  t.set("a", "y", 1.0);
  t.set("b", "x", 0.4);
  t.set("b", "y", 0.6);
  EXPECT_NEAR(global_std(SegCollection({a, b}), t), std::sqrt(0.05), 1e-15);
  ScoreTable partial("m");
  partial.set("a", "x", 1.0);
  EXPECT_THROW(global_std(SegCollection({a, b}), partial), CoverageError);
}

TEST(EvaluateSeg, CountsWalksAndPairs) {
  auto seg = testing::branching();
  auto scores = oracle_scores(SegCollection({seg}), {OracleKind::perfect});
  auto per_walk = evaluate_seg(seg, scores, 1.0, {TieMode::midrank, PairMode::per_walk});
  auto unique = evaluate_seg(seg, scores, 1.0, {TieMode::midrank, PairMode::unique_edge});
  EXPECT_EQ(per_walk.walk_count, 3u);
  EXPECT_EQ(unique.walk_count, 3u);
  EXPECT_EQ(per_walk.pair_count, 6u);
  EXPECT_EQ(unique.pair_count, 5u);
  EXPECT_EQ(per_walk.rank, 1.0);
  EXPECT_EQ(per_walk.sep, 1.0);
}

class OracleScorers : public ::testing::Test {
 protected:
  void SetUp() override {
    SynthConfig config;
    config.seed = 99;
    config.seg_count = 40;
    config.branch_probability = 0.5;
    config.multi_error_edge_probability = 0.3;
    collection = generate_segs(config);
  }
  SegCollection collection;
};

TEST_F(OracleScorers, PerfectInverseConstant) {
  auto perfect = oracle_scores(collection, {OracleKind::perfect});
  auto inverse = oracle_scores(collection, {OracleKind::inverse});
  auto constant = oracle_scores(collection, {OracleKind::constant});
  for (const auto& r : evaluate_metric(collection, perfect)) {
    EXPECT_EQ(r.rank, 1.0);
    EXPECT_EQ(r.sep, 1.0);
    EXPECT_GT(r.delta, 0.0);
  }
  for (const auto& r : evaluate_metric(collection, inverse)) {
    EXPECT_EQ(r.rank, -1.0);
    EXPECT_LE(r.delta, 0.0);
  }
  for (const auto& r : evaluate_metric(collection, constant)) {
    EXPECT_EQ(r.rank, 0.0);
    EXPECT_EQ(r.sep, 0.0);
    EXPECT_EQ(r.delta, 0.0);
  }
}

TEST_F(OracleScorers, InvertedDeltaMirrorsFaithful) {
  auto perfect = oracle_scores(collection, {OracleKind::perfect});
  auto inverse = oracle_scores(collection, {OracleKind::inverse});
  auto a = evaluate_metric(collection, perfect);
  auto b = evaluate_metric(collection, inverse);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i].delta, -b[i].delta, 1e-12);
}

TEST_F(OracleScorers, RankMatchesBruteForceOnSmallSegs) {
  auto noisy = oracle_scores(collection, {OracleKind::noisy, 0.3, 5});
  int checked = 0;
  for (const auto& seg : collection) {
    if (seg.image_count() > 10) continue;
    ++checked;
    auto brute = oracle::rank_score_brute(seg, [&](const std::string& img) { return *noisy.find(seg.id, img); });
    EXPECT_NEAR(rank_score(seg, noisy), brute, 1e-12) << seg.id;
  }
  SynthConfig small;
  small.seed = 4;
  small.seg_count = 50;
  small.images_per_node = {1, 2};
  small.nodes_per_seg = {2, 5};
  small.branch_probability = 0.6;
  auto smalls = generate_segs(small);
  auto noisy_small = oracle_scores(smalls, {OracleKind::noisy, 0.3, 6});
  for (const auto& seg : smalls) {
    if (seg.image_count() > 10) continue;
    ++checked;
    auto brute = oracle::rank_score_brute(seg, [&](const std::string& img) { return *noisy_small.find(seg.id, img); });
    EXPECT_NEAR(rank_score(seg, noisy_small), brute, 1e-12) << seg.id;
  }
  EXPECT_GT(checked, 30);
}

TEST_F(OracleScorers, MonotoneAndAffineInvariance) {
  auto noisy = oracle_scores(collection, {OracleKind::noisy, 0.2, 8});
  const double sigma = global_std(collection, noisy);
  ScoreTable cubed("m"), affine("m");
  for (const auto& [key, v] : noisy.entries()) {
    cubed.set(key.first, key.second, v * v * v + std::atan(v));
    affine.set(key.first, key.second, 3.5 * v - 2.0);
  }
  const double affine_sigma = global_std(collection, affine);
  for (const auto& seg : collection) {
    EXPECT_EQ(rank_score(seg, noisy), rank_score(seg, cubed));
    EXPECT_EQ(sep_score(seg, noisy), sep_score(seg, cubed));
    EXPECT_NEAR(delta_score(seg, noisy, sigma), delta_score(seg, affine, affine_sigma), 1e-12);
  }
}

TEST(Aggregate, MeansPerSubset) {
  auto a = make_seg("a", {{"0", 0, {"x"}}, {"1", 1, {"y"}}}, {{"0", "1"}}, Subset::synth);
  auto b = make_seg("b", {{"0", 0, {"x"}}, {"1", 1, {"y"}}}, {{"0", "1"}}, Subset::real);
  SegCollection collection({a, b});
  std::vector<SegMetricResult> results{{"a", "m", Subset::synth, 0.8, 0.5, 1.0, 1, 1},
                                       {"b", "m", Subset::real, 0.6, 0.3, 0.0, 1, 1}};
  auto report = aggregate(results, collection);
  ASSERT_EQ(report.metrics.size(), 1u);
  const auto& m = report.metrics[0];
  EXPECT_NEAR(m.overall.rank, 0.7, 1e-15);
  EXPECT_EQ(m.by_subset.at(Subset::synth).rank, 0.8);
  EXPECT_EQ(m.by_subset.at(Subset::real).rank, 0.6);
  EXPECT_EQ(m.by_subset.count(Subset::nat), 0u);
  EXPECT_NEAR(m.overall.display().rank, 70.0, 1e-12);
  EXPECT_TRUE(m.missing_segs.empty());
}

TEST(Aggregate, SingleSegAndDuplicates) {
  auto a = make_seg("a", {{"0", 0, {"x"}}, {"1", 1, {"y"}}}, {{"0", "1"}});
  auto b = make_seg("b", {{"0", 0, {"x"}}, {"1", 1, {"y"}}}, {{"0", "1"}});
  SegCollection collection({a, b});
  std::vector<SegMetricResult> one{{"a", "m", Subset::synth, 1.0, 0.5, 2.0, 1, 1}};
  auto report = aggregate(one, collection);
  EXPECT_EQ(report.find("m")->overall.rank, 1.0);
  EXPECT_EQ(report.find("m")->overall.delta, 2.0);
  EXPECT_EQ(report.find("m")->missing_segs, std::vector<std::string>{"b"});

  std::vector<SegMetricResult> two{{"a", "m", Subset::synth, 1.0, 0, 0, 1, 1},
                                   {"b", "m", Subset::synth, 0.5, 0, 0, 1, 1}};
  EXPECT_EQ(aggregate(two, collection).find("m")->overall.display().rank, 75.0);
  two.push_back(two[0]);
  EXPECT_THROW(aggregate(two, collection), ValidationError);
}

TEST(ScoreCsv, ParseAndErrors) {
  auto set = parse_score_csv("seg_id,image_id,metric,score\ns1,a.jpg,clip,0.25\ns1,b.jpg,clip,1e-1\ns1,a.jpg,tifa,1\n", "t");
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(*set.at("clip").find("s1", "b.jpg"), 0.1);
  EXPECT_THROW(parse_score_csv("seg,image,metric,score\n", "t"), ParseError);
  EXPECT_THROW(parse_score_csv("seg_id,image_id,metric,score\ns,a,m,abc\n", "t"), ParseError);
  EXPECT_THROW(parse_score_csv("seg_id,image_id,metric,score\ns,a,m,nan\n", "t"), ValidationError);
  EXPECT_THROW(parse_score_csv("seg_id,image_id,metric,score\ns,a,m,1\ns,a,m,2\n", "t"), ValidationError);
}

TEST(ScoreCsv, SerializeRoundTripsExactly) {
  SynthConfig config;
  config.seg_count = 5;
  auto collection = generate_segs(config);
  auto noisy = oracle_scores(collection, {OracleKind::noisy, 0.1, 1});
  auto text = serialize_score_csv({&noisy});
  auto back = parse_score_csv(text, "rt");
  EXPECT_EQ(back.at("noisy").entries(), noisy.entries());
}

}  // namespace
}  // namespace segeval
