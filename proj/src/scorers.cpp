// SPDX-License-Identifier: Apache-2.0

#include "segeval/scorers.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "segeval/error.hpp"
#include "segeval/io.hpp"

namespace segeval {

using nlohmann::json;

QuestionGraph::QuestionGraph(std::string prompt_id, std::vector<Question> questions)
    : prompt_id_(std::move(prompt_id)), questions_(std::move(questions)) {
  if (questions_.empty()) {
    throw ValidationError(fmt::format("question graph {} has no questions", prompt_id_));
  }
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < questions_.size(); ++i) {
    if (!index.emplace(questions_[i].id, i).second) {
      throw ValidationError(
          fmt::format("question graph {}: duplicate question id {}", prompt_id_, questions_[i].id));
    }
  }
  parents_.resize(questions_.size());
  std::vector<std::vector<std::size_t>> children(questions_.size());
  for (std::size_t i = 0; i < questions_.size(); ++i) {
    for (const auto& parent : questions_[i].parent_ids) {
      auto it = index.find(parent);
      if (it == index.end()) {
        throw ValidationError(fmt::format("question graph {}: question {} has unknown parent {}",
                                          prompt_id_, questions_[i].id, parent));
      }
      if (std::find(parents_[i].begin(), parents_[i].end(), it->second) != parents_[i].end()) {
        continue;
      }
      parents_[i].push_back(it->second);
      children[it->second].push_back(i);
    }
  }

  std::vector<std::size_t> in_degree(questions_.size());
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < questions_.size(); ++i) {
    in_degree[i] = parents_[i].size();
    if (in_degree[i] == 0) ready.push(i);
  }
  while (!ready.empty()) {
    auto q = ready.top();
    ready.pop();
    order_.push_back(q);
    for (auto c : children[q]) {
      if (--in_degree[c] == 0) ready.push(c);
    }
  }
  if (order_.size() != questions_.size()) {
    std::vector<std::string> stuck;
    for (std::size_t i = 0; i < questions_.size(); ++i) {
      if (in_degree[i] > 0) stuck.push_back(questions_[i].id);
    }
    throw ValidationError(fmt::format("question graph {}: cyclic dependency among {}", prompt_id_,
                                      fmt::join(stuck, ", ")));
  }
}

namespace {

std::string normalize_answer(std::string_view text) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  auto last = text.find_last_not_of(" \t\r\n");
  std::string out(text.substr(first, last - first + 1));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Per-question correctness in question order; throws on unanswered questions.
std::vector<bool> correctness(const QuestionGraph& graph, const ImageAnswers& answers) {
  std::vector<bool> correct;
  std::vector<std::string> missing;
  for (const auto& q : graph.questions()) {
    auto it = answers.find(q.id);
    if (it == answers.end()) {
      missing.push_back(q.id);
      correct.push_back(false);
    } else {
      correct.push_back(answer_matches(it->second, q.expected_answer));
    }
  }
  if (!missing.empty()) {
    throw CoverageError(fmt::format("question graph {}: no answer for question(s) {}",
                                    graph.prompt_id(), fmt::join(missing, ", ")),
                        std::move(missing));
  }
  return correct;
}

}  // namespace

bool answer_matches(std::string_view answer, std::string_view expected) {
  return normalize_answer(answer) == normalize_answer(expected);
}

double tifa_accumulate(const QuestionGraph& graph, const ImageAnswers& answers) {
  auto correct = correctness(graph, answers);
  auto hits = std::count(correct.begin(), correct.end(), true);
  return static_cast<double>(hits) / static_cast<double>(correct.size());
}

double dsg_accumulate(const QuestionGraph& graph, const ImageAnswers& answers) {
  auto correct = correctness(graph, answers);
  std::vector<bool> satisfied(correct.size(), false);
  std::size_t hits = 0;
  for (auto q : graph.topological_order()) {
    const auto& ps = graph.parents(q);
    satisfied[q] = correct[q] && std::all_of(ps.begin(), ps.end(),
                                             [&](auto p) { return satisfied[p]; });
    if (satisfied[q]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(correct.size());
}

std::string_view to_string(AccumulationMode mode) {
  return mode == AccumulationMode::tifa ? "tifa" : "dsg";
}

// ─── Question graph files ────────────────────────────────────

namespace {

const json& field(const json& object, const char* name, const std::string& where) {
  auto it = object.find(name);
  if (it == object.end()) {
    throw ParseError(fmt::format("{}: missing required field \"{}\"", where, name));
  }
  return *it;
}

std::string string_field(const json& object, const char* name, const std::string& where) {
  const auto& value = field(object, name, where);
  if (!value.is_string()) {
    throw ParseError(fmt::format("{}: field \"{}\": expected a string", where, name));
  }
  return value.get<std::string>();
}

QuestionGraph parse_graph(const json& doc, const std::string& where) {
  if (!doc.is_object()) throw ParseError(fmt::format("{}: expected an object", where));
  auto prompt_id = string_field(doc, "prompt_id", where);
  const auto& list = field(doc, "questions", where);
  if (!list.is_array()) {
    throw ParseError(fmt::format("{}: field \"questions\": expected an array", where));
  }
  std::vector<Question> questions;
  for (std::size_t i = 0; i < list.size(); ++i) {
    auto at = fmt::format("{}.questions[{}]", where, i);
    if (!list[i].is_object()) throw ParseError(fmt::format("{}: expected an object", at));
    Question q;
    q.id = string_field(list[i], "id", at);
    q.expected_answer = string_field(list[i], "expected_answer", at);
    if (auto it = list[i].find("parent_ids"); it != list[i].end() && !it->is_null()) {
      if (!it->is_array()) {
        throw ParseError(fmt::format("{}: field \"parent_ids\": expected an array", at));
      }
      for (const auto& p : *it) {
        if (!p.is_string()) {
          throw ParseError(fmt::format("{}: field \"parent_ids\": expected strings", at));
        }
        q.parent_ids.push_back(p.get<std::string>());
      }
    }
    questions.push_back(std::move(q));
  }
  return QuestionGraph(std::move(prompt_id), std::move(questions));
}

}  // namespace

QuestionGraphSet parse_question_graphs(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: malformed JSON: {}", source, e.what()));
  }
  std::vector<json> items;
  if (doc.is_array()) {
    items.assign(doc.begin(), doc.end());
  } else {
    items.push_back(doc);
  }
  QuestionGraphSet graphs;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto where = doc.is_array() ? fmt::format("{}[{}]", source, i) : source;
    auto graph = parse_graph(items[i], where);
    auto id = graph.prompt_id();
    if (!graphs.emplace(id, std::move(graph)).second) {
      throw ValidationError(fmt::format("{}: duplicate question graph for prompt {}", source, id));
    }
  }
  return graphs;
}

QuestionGraphSet load_question_graphs(const std::filesystem::path& path) {
  return parse_question_graphs(read_text_file(path), path.string());
}

std::string serialize_question_graphs(const QuestionGraphSet& graphs) {
  auto doc = nlohmann::ordered_json::array();
  for (const auto& [id, graph] : graphs) {
    nlohmann::ordered_json g;
    g["prompt_id"] = id;
    g["questions"] = nlohmann::ordered_json::array();
    for (const auto& q : graph.questions()) {
      nlohmann::ordered_json item;
      item["id"] = q.id;
      item["parent_ids"] = q.parent_ids;
      item["expected_answer"] = q.expected_answer;
      g["questions"].push_back(std::move(item));
    }
    doc.push_back(std::move(g));
  }
  return doc.dump(2) + "\n";
}

// ─── Answer tables ───────────────────────────────────────────

AnswerTable parse_answer_csv(std::string_view text, const std::string& source) {
  auto csv = parse_csv(text, source, kAnswerCsvHeader);
  AnswerTable table;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    auto& row = csv.rows[r];
    auto& answers = table[{row[0], row[1]}];
    if (!answers.emplace(row[2], row[3]).second) {
      throw ValidationError(fmt::format("{}:{}: duplicate answer for {}/{} question {}", source,
                                        csv.lines[r], row[0], row[1], row[2]));
    }
  }
  return table;
}

AnswerTable load_answers(const std::filesystem::path& path) {
  return parse_answer_csv(read_text_file(path), path.string());
}

std::string serialize_answer_csv(const AnswerTable& answers) {
  std::string out = "seg_id,image_id,question_id,answer\n";
  for (const auto& [key, per_image] : answers) {
    for (const auto& [question, answer] : per_image) {
      out += fmt::format("{},{},{},{}\n", csv_escape(key.first), csv_escape(key.second),
                         csv_escape(question), csv_escape(answer));
    }
  }
  return out;
}

ScoreTable accumulate_scores(const QuestionGraphSet& graphs, const AnswerTable& answers,
                             AccumulationMode mode, std::string_view base_metric) {
  ScoreTable table(fmt::format("{}-{}-acc", base_metric, to_string(mode)));
  std::vector<std::string> missing;
  for (const auto& [key, per_image] : answers) {
    const auto& [seg_id, image_id] = key;
    auto graph = graphs.find(seg_id);
    if (graph == graphs.end()) {
      missing.push_back(fmt::format("{}/{}: no question graph", seg_id, image_id));
      continue;
    }
    for (const auto& [question, _] : per_image) {
      const auto& qs = graph->second.questions();
      if (std::none_of(qs.begin(), qs.end(), [&](const auto& q) { return q.id == question; })) {
        throw ValidationError(fmt::format("{}/{}: answer for unknown question {}", seg_id,
                                          image_id, question));
      }
    }
    try {
      double score = mode == AccumulationMode::tifa ? tifa_accumulate(graph->second, per_image)
                                                    : dsg_accumulate(graph->second, per_image);
      table.set(seg_id, image_id, score);
    } catch (const CoverageError& e) {
      for (const auto& q : e.missing()) {
        missing.push_back(fmt::format("{}/{}: no answer for question {}", seg_id, image_id, q));
      }
    }
  }
  if (!missing.empty()) {
    throw CoverageError(fmt::format("{} accumulation gap(s):\n  {}", missing.size(),
                                    fmt::join(missing, "\n  ")),
                        std::move(missing));
  }
  return table;
}

// ─── Embedding correlation ───────────────────────────────────

double embedding_correlation_score(const EmbeddingVector& text, const EmbeddingVector& image) {
  if (text.values.size() != image.values.size()) {
    throw std::invalid_argument(fmt::format("embedding dimension mismatch: {} vs {}",
                                            text.values.size(), image.values.size()));
  }
  if (text.values.empty()) throw std::invalid_argument("empty embedding vector");
  double dot = 0.0, nt = 0.0, ni = 0.0;
  for (std::size_t i = 0; i < text.values.size(); ++i) {
    const double t = text.values[i];
    const double v = image.values[i];
    if (!std::isfinite(t) || !std::isfinite(v)) {
      throw std::invalid_argument("non-finite embedding component");
    }
    dot += t * v;
    nt += t * t;
    ni += v * v;
  }
  if (nt == 0.0 || ni == 0.0) throw std::invalid_argument("zero-norm embedding vector");
  const double cosine = dot / (std::sqrt(nt) * std::sqrt(ni));
  return std::clamp(cosine, 0.0, 1.0);
}

EmbeddingFile parse_embeddings(std::string_view text, EmbeddingKind kind,
                               const std::string& source) {
  EmbeddingFile out;
  std::size_t dimension = 0;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string id;
    if (!(fields >> id)) continue;
    EmbeddingVector vec;
    vec.kind = kind;
    std::string token;
    while (fields >> token) {
      double v = 0.0;
      auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc() || end != token.data() + token.size() || !std::isfinite(v)) {
        throw ParseError(fmt::format("{}:{}: not a finite number: \"{}\"", source, line_no, token));
      }
      vec.values.push_back(v);
    }
    if (vec.values.empty()) throw ParseError(fmt::format("{}:{}: record {} has no values", source, line_no, id));
    if (dimension == 0) dimension = vec.values.size();
    if (vec.values.size() != dimension) {
      throw ParseError(fmt::format("{}:{}: record {} has dimension {}, expected {}", source,
                                   line_no, id, vec.values.size(), dimension));
    }
    if (!out.emplace(id, std::move(vec)).second) {
      throw ParseError(fmt::format("{}:{}: duplicate record id {}", source, line_no, id));
    }
  }
  return out;
}

EmbeddingFile load_embeddings(const std::filesystem::path& path, EmbeddingKind kind) {
  return parse_embeddings(read_text_file(path), kind, path.string());
}

ScoreTable embedding_scores(const EmbeddingFile& texts, const EmbeddingFile& images,
                            std::string metric) {
  ScoreTable table(std::move(metric));
  std::vector<std::string> missing;
  for (const auto& [key, image_vec] : images) {
    auto slash = key.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == key.size()) {
      throw ParseError(fmt::format("image embedding id \"{}\" is not <seg id>/<image id>", key));
    }
    auto seg_id = key.substr(0, slash);
    auto text = texts.find(seg_id);
    if (text == texts.end()) {
      missing.push_back(key);
      continue;
    }
    try {
      table.set(seg_id, key.substr(slash + 1), embedding_correlation_score(text->second, image_vec));
    } catch (const std::invalid_argument& e) {
      throw ValidationError(fmt::format("{}: {}", key, e.what()));
    }
  }
  if (!missing.empty()) {
    throw CoverageError(fmt::format("no prompt embedding for {} image(s): {}", missing.size(),
                                    fmt::join(missing, ", ")),
                        std::move(missing));
  }
  return table;
}

}  // namespace segeval
