// SPDX-License-Identifier: Apache-2.0

#include "segeval/cost_pareto.hpp"

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "segeval/error.hpp"

namespace segeval {
namespace {

TEST(EstimateFlops, EmbeddingMetricMatchesTable) {
  CostModel clip{"clipscore", {{2, 1, 1.51e8}}};
  EXPECT_EQ(estimate_flops(clip), 6.04e8);
}

TEST(EstimateFlops, VqaStage) {
  CostModel vqa{"tifa", {{8, 20, 7e9}}};
  EXPECT_EQ(estimate_flops(vqa), 2.24e12);
  CostModel two{"tifa", {{8, 20, 7e9}, {1, 40, 1.75e11}}};
  EXPECT_EQ(estimate_flops(two), 2.24e12 + 1.4e13);
}

TEST(EstimateFlops, RejectsInvalidModels) {
  EXPECT_THROW(estimate_flops({"m", {}}), ValidationError);
  EXPECT_THROW(estimate_flops({"m", {{0, 1, 1e9}}}), ValidationError);
  EXPECT_THROW(estimate_flops({"m", {{1, 1, -1.0}}}), ValidationError);
}

TEST(CostFiles, ParseSingleAndArray) {
  auto one = parse_cost_models(R"({"metric": "clip", "stages": [{"calls": 2, "tokens_per_call": 1, "model_params": 151000000}]})", "c");
  EXPECT_EQ(estimate_flops(one.at("clip")), 6.04e8);
  auto many = parse_cost_models(R"([{"metric": "a", "stages": [{"calls": 1, "tokens_per_call": 1, "model_params": 1e9}]},
                                    {"metric": "b", "stages": [{"calls": 1, "tokens_per_call": 2, "model_params": 1e9}]}])", "c");
  EXPECT_EQ(many.size(), 2u);
  EXPECT_THROW(parse_cost_models(R"({"metric": "a", "stages": [{"calls": 1.5, "tokens_per_call": 1, "model_params": 1}]})", "c"),
               ParseError);
  EXPECT_THROW(parse_cost_models(R"({"metric": "a", "stages": []})", "c"), ValidationError);
  EXPECT_THROW(parse_cost_models(R"({"stages": []})", "c"), ParseError);
}

TEST(ParetoFrontier, TableFixture) {
  std::vector<QualityCostPoint> pts{{"clip", 71.4, 6.04e8}, {"tifa", 76.5, 2.24e14}, {"dsg", 79.6, 8.6e14}};
  auto frontier = pareto_frontier(pts);
  ASSERT_EQ(frontier.size(), 3u);
  EXPECT_EQ(frontier[0].metric, "clip");
  EXPECT_EQ(frontier[2].metric, "dsg");

  pts.push_back({"weak", 70.0, 2.24e14});
  frontier = pareto_frontier(pts);
  EXPECT_EQ(frontier.size(), 3u);
  for (const auto& p : frontier) EXPECT_NE(p.metric, "weak");
}

TEST(ParetoFrontier, SingleTiesAndErrors) {
  EXPECT_EQ(pareto_frontier({{"a", 1, 1}}).size(), 1u);
  auto tied = pareto_frontier({{"a", 1, 5}, {"b", 1, 5}, {"c", 0.5, 5}});
  ASSERT_EQ(tied.size(), 2u);
  EXPECT_EQ(tied[0].metric, "a");
  EXPECT_EQ(tied[1].metric, "b");
  // Equal quality, higher cost: dominated.
  EXPECT_EQ(pareto_frontier({{"a", 1, 5}, {"b", 1, 6}}).size(), 1u);
  EXPECT_THROW(pareto_frontier({}), ValidationError);
  EXPECT_THROW(pareto_frontier({{"a", 1, 1}, {"a", 2, 2}}), ValidationError);
  EXPECT_THROW(pareto_frontier({{"a", 1, 0}}), ValidationError);
}

TEST(ParetoFrontier, MatchesDominanceScan) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> size(1, 50), grid(0, 12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<QualityCostPoint> pts;
    const int n = size(rng);
    for (int i = 0; i < n; ++i) {
      // Coarse grid forces plenty of ties on both axes.
      pts.push_back({"m" + std::to_string(i), grid(rng) / 4.0, std::pow(10.0, 6 + grid(rng))});
    }
    auto frontier = pareto_frontier(pts);
    EXPECT_EQ(frontier, oracle::dominance_scan(pts));

    // Every point is on the frontier or dominated by a frontier point.
    for (const auto& p : pts) {
      bool covered = std::find(frontier.begin(), frontier.end(), p) != frontier.end();
      for (const auto& f : frontier) covered = covered || dominates(f, p);
      EXPECT_TRUE(covered);
    }

    // Monotone rescaling of cost keeps membership.
    auto rescaled = pts;
    for (auto& p : rescaled) p.cost_flops = std::log10(p.cost_flops);
    auto again = pareto_frontier(rescaled);
    ASSERT_EQ(again.size(), frontier.size());
    for (std::size_t i = 0; i < again.size(); ++i) EXPECT_EQ(again[i].metric, frontier[i].metric);
  }
}

}  // namespace
}  // namespace segeval
