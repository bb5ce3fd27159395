// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "segeval/score_table.hpp"

namespace segeval {

// ─── Question-answering accumulation ─────────────────────────
// A question graph holds the requirement questions generated for one prompt;
// parent links form a dependency DAG. Answers arrive already canonicalised
// (yes/no or a multiple-choice option) and are matched against the expected
// answer after trimming and ASCII lower-casing.

struct Question {
  std::string id;
  std::vector<std::string> parent_ids;
  std::string expected_answer;
};

class QuestionGraph {
 public:
  /// Throws ValidationError on duplicate ids, unknown parents or a cycle.
  QuestionGraph(std::string prompt_id, std::vector<Question> questions);

  const std::string& prompt_id() const { return prompt_id_; }
  const std::vector<Question>& questions() const { return questions_; }
  /// Question indices with every parent before its children.
  const std::vector<std::size_t>& topological_order() const { return order_; }
  const std::vector<std::size_t>& parents(std::size_t q) const { return parents_[q]; }

 private:
  std::string prompt_id_;
  std::vector<Question> questions_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::size_t> order_;
};

/// question id -> answer, for one image.
using ImageAnswers = std::map<std::string, std::string, std::less<>>;

bool answer_matches(std::string_view answer, std::string_view expected);

/// Fraction of questions answered correctly. Throws CoverageError if a question
/// has no answer.
double tifa_accumulate(const QuestionGraph& graph, const ImageAnswers& answers);

/// Fraction of questions that are answered correctly and whose ancestors are
/// all satisfied too.
double dsg_accumulate(const QuestionGraph& graph, const ImageAnswers& answers);

enum class AccumulationMode { tifa, dsg };

std::string_view to_string(AccumulationMode mode);

/// Question graphs keyed by prompt id.
using QuestionGraphSet = std::map<std::string, QuestionGraph, std::less<>>;

/// Accepts a single graph object or an array of them.
QuestionGraphSet parse_question_graphs(std::string_view text, const std::string& source);
QuestionGraphSet load_question_graphs(const std::filesystem::path& path);
std::string serialize_question_graphs(const QuestionGraphSet& graphs);

/// (seg id, image id) -> answers.
using AnswerTable = std::map<std::pair<std::string, std::string>, ImageAnswers>;

inline const std::vector<std::string> kAnswerCsvHeader = {"seg_id", "image_id", "question_id",
                                                          "answer"};

AnswerTable parse_answer_csv(std::string_view text, const std::string& source);
AnswerTable load_answers(const std::filesystem::path& path);
std::string serialize_answer_csv(const AnswerTable& answers);

/// Scores every (seg, image) of `answers` with the graph whose prompt_id equals
/// the seg id. The output metric is `<base_metric>-tifa-acc` or `-dsg-acc`.
ScoreTable accumulate_scores(const QuestionGraphSet& graphs, const AnswerTable& answers,
                             AccumulationMode mode, std::string_view base_metric);

// ─── Embedding correlation ───────────────────────────────────

enum class EmbeddingKind { text, image };

struct EmbeddingVector {
  std::vector<double> values;
  EmbeddingKind kind = EmbeddingKind::text;
};

/// max(cos(text, image), 0). Throws std::invalid_argument on dimension
/// mismatch, zero norm or non-finite components.
double embedding_correlation_score(const EmbeddingVector& text, const EmbeddingVector& image);

/// id -> vector. One record per line: id followed by whitespace-separated decimals.
using EmbeddingFile = std::map<std::string, EmbeddingVector, std::less<>>;

EmbeddingFile parse_embeddings(std::string_view text, EmbeddingKind kind,
                               const std::string& source);
EmbeddingFile load_embeddings(const std::filesystem::path& path, EmbeddingKind kind);

/// Image records are keyed `<seg id>/<image id>` and paired with the text record
/// keyed by the seg id. Throws CoverageError for images without a prompt vector.
ScoreTable embedding_scores(const EmbeddingFile& texts, const EmbeddingFile& images,
                            std::string metric);

}  // namespace segeval
