// SPDX-License-Identifier: Apache-2.0

#include "segeval/score_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "segeval/error.hpp"
#include "segeval/io.hpp"

namespace segeval {

void ScoreTable::set(std::string seg_id, std::string image_id, double score) {
  if (!std::isfinite(score)) {
    throw ValidationError(
        fmt::format("non-finite score for {}/{} ({})", seg_id, image_id, metric_));
  }
  auto [it, inserted] = scores_.emplace(Key{std::move(seg_id), std::move(image_id)}, score);
  if (!inserted) {
    throw ValidationError(fmt::format("duplicate score for {}/{} ({})", it->first.first,
                                      it->first.second, metric_));
  }
}

std::optional<double> ScoreTable::find(std::string_view seg_id, std::string_view image_id) const {
  auto it = scores_.find(Key{seg_id, image_id});
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

ScoreSet parse_score_csv(std::string_view text, const std::string& source) {
  auto table = parse_csv(text, source, kScoreCsvHeader);
  ScoreSet set;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    auto& row = table.rows[r];
    const auto& raw = row[3];
    double score = 0.0;
    auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), score);
    if (ec != std::errc() || end != raw.data() + raw.size() || raw.empty()) {
      throw ParseError(fmt::format("{}:{}: field \"score\": not a number: \"{}\"", source,
                                   table.lines[r], raw));
    }
    if (row[0].empty() || row[1].empty() || row[2].empty()) {
      throw ParseError(fmt::format("{}:{}: empty seg_id, image_id or metric", source, table.lines[r]));
    }
    auto it = set.find(row[2]);
    if (it == set.end()) it = set.emplace(row[2], ScoreTable(row[2])).first;
    try {
      it->second.set(std::move(row[0]), std::move(row[1]), score);
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("{}:{}: {}", source, table.lines[r], e.what()));
    }
  }
  return set;
}

ScoreSet load_scores(const std::filesystem::path& path) {
  return parse_score_csv(read_text_file(path), path.string());
}

std::string serialize_score_csv(const std::vector<const ScoreTable*>& tables) {
  std::vector<const ScoreTable*> sorted(tables);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->metric() < b->metric(); });
  std::string out = "seg_id,image_id,metric,score\n";
  for (const auto* table : sorted) {
    for (const auto& [key, score] : table->entries()) {
      out += fmt::format("{},{},{},{}\n", csv_escape(key.first), csv_escape(key.second),
                         csv_escape(table->metric()), score == 0.0 ? 0.0 : score);
    }
  }
  return out;
}

}  // namespace segeval
