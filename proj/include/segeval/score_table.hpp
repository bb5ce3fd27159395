// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace segeval {

/// Per-image faithfulness scores of one metric, keyed by (seg id, image id).
class ScoreTable {
 public:
  using Key = std::pair<std::string, std::string>;

  explicit ScoreTable(std::string metric) : metric_(std::move(metric)) {}

  const std::string& metric() const { return metric_; }

  /// Throws ValidationError on a non-finite score or a repeated key.
  void set(std::string seg_id, std::string image_id, double score);
  std::optional<double> find(std::string_view seg_id, std::string_view image_id) const;

  std::size_t size() const { return scores_.size(); }
  const std::map<Key, double>& entries() const { return scores_; }

 private:
  std::string metric_;
  std::map<Key, double> scores_;
};

/// All metrics of one score file, by metric name.
using ScoreSet = std::map<std::string, ScoreTable, std::less<>>;

inline const std::vector<std::string> kScoreCsvHeader = {"seg_id", "image_id", "metric", "score"};

/// Parses `seg_id,image_id,metric,score` rows. Throws ParseError or ValidationError.
ScoreSet parse_score_csv(std::string_view text, const std::string& source);
ScoreSet load_scores(const std::filesystem::path& path);

/// Rows sorted by (metric, seg, image); scores in shortest round-trip form.
std::string serialize_score_csv(const std::vector<const ScoreTable*>& tables);

}  // namespace segeval
