// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "segeval/score_table.hpp"
#include "segeval/scorers.hpp"
#include "segeval/seg.hpp"

namespace segeval {

/// SplitMix64 stream with platform-independent derived distributions, so
/// fixtures generated from a seed are identical everywhere.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Uniform double in [0, 1).
  double uniform();
  bool bernoulli(double p);
  /// Standard normal (Box-Muller).
  double normal();

 private:
  std::uint64_t state_;
};

/// Independent sub-seed for stream `index` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct IntRange {
  int min = 0;
  int max = 0;
};

struct SynthConfig {
  std::uint64_t seed = 1;
  int seg_count = 1;
  IntRange nodes_per_seg{2, 12};
  IntRange images_per_node{1, 8};
  double branch_probability = 0.3;
  double multi_error_edge_probability = 0.1;
  double noise_sigma = 0.05;
};

/// Throws ValidationError for empty or out-of-bounds ranges and probabilities
/// outside [0, 1].
void validate_synth_config(const SynthConfig& config);

/// Valid SEGs; a pure function of the config. SEG i is drawn from its own
/// sub-seed, so it does not depend on seg_count.
SegCollection generate_segs(const SynthConfig& config);

enum class OracleKind { perfect, inverse, constant, noisy };

std::string_view to_string(OracleKind kind);

struct OracleSpec {
  OracleKind kind = OracleKind::perfect;
  double sigma = 0.0;      // noisy only
  std::uint64_t seed = 0;  // noisy only
};

/// perfect: 1 - error_count / max error_count of the SEG; inverse: the
/// complement; constant: 0.5; noisy: perfect plus seeded Gaussian noise,
/// clipped to [0, 1]. The metric is named after the kind unless given.
ScoreTable oracle_scores(const SegCollection& collection, const OracleSpec& spec,
                         std::string metric = {});

/// Random question DAG: question k lists each earlier question as a parent
/// with `parent_probability`. Expected answers are "yes".
QuestionGraph random_question_graph(SeededRng& rng, std::string prompt_id, int question_count,
                                    double parent_probability);

struct AnswerFixture {
  QuestionGraphSet graphs;
  AnswerTable answers;
};

/// One question graph per SEG and a complete yes/no answer set for every image;
/// answers are less likely to be correct as the image's error count grows.
AnswerFixture generate_answer_fixture(const SegCollection& collection, std::uint64_t seed);

}  // namespace segeval
