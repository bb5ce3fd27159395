// SPDX-License-Identifier: Apache-2.0

#include "segeval/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <fmt/format.h>

#include "segeval/error.hpp"

namespace segeval {

std::uint64_t SeededRng::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::int64_t SeededRng::uniform_int(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next());
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t r;
  do {
    r = next();
  } while (r >= limit);
  return lo + static_cast<std::int64_t>(r % span);
}

double SeededRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

bool SeededRng::bernoulli(double p) { return uniform() < p; }

double SeededRng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  SeededRng mix(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
  mix.next();
  return mix.next();
}

void validate_synth_config(const SynthConfig& c) {
  auto fail = [](const std::string& what) { throw ValidationError("synth config: " + what); };
  if (c.seg_count < 1) fail("seg_count must be >= 1");
  if (c.nodes_per_seg.min > c.nodes_per_seg.max) fail("nodes_per_seg range is empty");
  if (c.nodes_per_seg.min < 2 || c.nodes_per_seg.max > 12) fail("nodes_per_seg must lie in [2, 12]");
  if (c.images_per_node.min > c.images_per_node.max) fail("images_per_node range is empty");
  if (c.images_per_node.min < 1 || c.images_per_node.max > 8) {
    fail("images_per_node must lie in [1, 8]");
  }
  for (double p : {c.branch_probability, c.multi_error_edge_probability}) {
    if (!(p >= 0.0 && p <= 1.0)) fail("probabilities must lie in [0, 1]");
  }
  if (!(c.noise_sigma >= 0.0) || !std::isfinite(c.noise_sigma)) fail("noise_sigma must be >= 0");
}

namespace {

struct DraftEdge {
  int from;
  int to;
  int weight;
};

std::vector<std::string> draw_labels(SeededRng& rng, int count) {
  std::vector<std::string> pool(std::begin(kErrorLabels), std::end(kErrorLabels));
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) {
    auto pick = rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1);
    out.push_back(pool[static_cast<std::size_t>(pick)]);
    pool.erase(pool.begin() + pick);
  }
  return out;
}

SemanticErrorGraph generate_one(const SynthConfig& config, std::size_t index) {
  SeededRng rng(derive_seed(config.seed, index));
  const int n = static_cast<int>(rng.uniform_int(config.nodes_per_seg.min, config.nodes_per_seg.max));

  // Node k only receives edges from nodes < k, so index order is topological
  // and each distance is final once its in-edges are drawn.
  std::vector<int> distance(static_cast<std::size_t>(n), 0);
  std::vector<DraftEdge> edges;
  for (int k = 1; k < n; ++k) {
    const bool branch = k >= 2 && rng.bernoulli(config.branch_probability);
    const int parent = branch ? static_cast<int>(rng.uniform_int(0, k - 2)) : k - 1;
    const int weight = rng.bernoulli(config.multi_error_edge_probability) ? 2 : 1;
    distance[k] = distance[parent] + weight;
    edges.push_back({parent, k, weight});

    if (k >= 2 && rng.bernoulli(config.branch_probability / 2.0)) {
      int other = static_cast<int>(rng.uniform_int(0, k - 2));
      if (other >= parent) ++other;  // uniform over [0, k-1] minus the parent
      const int other_weight = rng.bernoulli(config.multi_error_edge_probability) ? 2 : 1;
      const int merged = std::min(distance[k], distance[other] + other_weight);
      // Keep the merge only if counts still rise along both in-edges.
      if (distance[parent] < merged && distance[other] < merged) {
        distance[k] = merged;
        edges.push_back({other, k, other_weight});
      }
    }
  }

  // Name nodes "0", "1a", "1b", "2a", ... by error count, in creation order.
  std::vector<std::string> names(static_cast<std::size_t>(n));
  std::map<int, int> used_letters;
  names[0] = "0";
  for (int k = 1; k < n; ++k) {
    int letter = used_letters[distance[k]]++;
    names[k] = fmt::format("{}{}", distance[k], static_cast<char>('a' + letter));
  }

  SemanticErrorGraph seg;
  seg.id = fmt::format("{:04d}", index);
  seg.prompt = fmt::format("synthetic prompt {}", seg.id);
  seg.subset = static_cast<Subset>(rng.uniform_int(0, 2));
  for (int k = 0; k < n; ++k) {
    ErrorNode node;
    node.id = names[k];
    node.error_count = distance[k];
    const int images = static_cast<int>(
        rng.uniform_int(config.images_per_node.min, config.images_per_node.max));
    for (int j = 0; j < images; ++j) node.images.push_back(fmt::format("{}-{}.jpg", node.id, j));
    seg.nodes.push_back(std::move(node));
  }
  for (const auto& e : edges) {
    seg.edges.push_back({names[e.from], names[e.to], draw_labels(rng, e.weight), e.weight});
  }
  return seg;
}

int max_error_count(const SemanticErrorGraph& seg) {
  int m = 0;
  for (const auto& node : seg.nodes) m = std::max(m, node.error_count);
  return m;
}

}  // namespace

SegCollection generate_segs(const SynthConfig& config) {
  validate_synth_config(config);
  std::vector<SemanticErrorGraph> segs;
  for (int i = 0; i < config.seg_count; ++i) segs.push_back(generate_one(config, static_cast<std::size_t>(i)));
  return SegCollection(std::move(segs));
}

std::string_view to_string(OracleKind kind) {
  switch (kind) {
    case OracleKind::perfect:
      return "perfect";
    case OracleKind::inverse:
      return "inverse";
    case OracleKind::constant:
      return "constant";
    case OracleKind::noisy:
      return "noisy";
  }
  return "perfect";
}

ScoreTable oracle_scores(const SegCollection& collection, const OracleSpec& spec,
                         std::string metric) {
  if (spec.kind == OracleKind::noisy && !(spec.sigma >= 0.0)) {
    throw ValidationError("noisy oracle needs sigma >= 0");
  }
  ScoreTable table(metric.empty() ? std::string(to_string(spec.kind)) : std::move(metric));
  std::size_t seg_index = 0;
  for (const auto& seg : collection) {
    SeededRng rng(derive_seed(spec.seed, seg_index++));
    const double max_count = std::max(1, max_error_count(seg));
    for (const auto& node : seg.nodes) {
      const double perfect = 1.0 - node.error_count / max_count;
      for (const auto& image : node.images) {
        double score = 0.5;
        switch (spec.kind) {
          case OracleKind::perfect:
            score = perfect;
            break;
          case OracleKind::inverse:
            score = node.error_count / max_count;
            break;
          case OracleKind::constant:
            break;
          case OracleKind::noisy:
            score = std::clamp(perfect + spec.sigma * rng.normal(), 0.0, 1.0);
            break;
        }
        table.set(seg.id, image, score);
      }
    }
  }
  return table;
}

QuestionGraph random_question_graph(SeededRng& rng, std::string prompt_id, int question_count,
                                    double parent_probability) {
  std::vector<Question> questions;
  for (int k = 0; k < question_count; ++k) {
    Question q;
    q.id = fmt::format("q{}", k + 1);
    q.expected_answer = "yes";
    for (int p = 0; p < k; ++p) {
      if (rng.bernoulli(parent_probability)) q.parent_ids.push_back(fmt::format("q{}", p + 1));
    }
    questions.push_back(std::move(q));
  }
  return QuestionGraph(std::move(prompt_id), std::move(questions));
}

AnswerFixture generate_answer_fixture(const SegCollection& collection, std::uint64_t seed) {
  AnswerFixture fixture;
  std::size_t seg_index = 0;
  for (const auto& seg : collection) {
    SeededRng rng(derive_seed(seed, seg_index++));
    const int count = static_cast<int>(rng.uniform_int(2, 8));
    auto graph = random_question_graph(rng, seg.id, count, 0.3);
    for (const auto& node : seg.nodes) {
      const double p_correct = std::max(0.1, 0.95 - 0.15 * node.error_count);
      for (const auto& image : node.images) {
        auto& answers = fixture.answers[{seg.id, image}];
        for (const auto& q : graph.questions()) {
          answers[q.id] = rng.bernoulli(p_correct) ? "yes" : "no";
        }
      }
    }
    fixture.graphs.emplace(seg.id, std::move(graph));
  }
  return fixture;
}

}  // namespace segeval
