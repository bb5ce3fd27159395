// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace segeval {

// ─── Semantic error graph model ──────────────────────────────
// A prompt plus a DAG of image-bearing nodes. Each edge adds one or
// more semantic errors; a node's error_count is the weighted shortest
// path length back to the head node.

enum class Subset { synth, nat, real };

std::string_view to_string(Subset subset);
std::optional<Subset> parse_subset(std::string_view text);

/// Canonical error labels. Edges may also carry free-form labels.
inline constexpr std::string_view kErrorLabels[] = {"verbal", "composition", "missing_object",
                                                    "wrong_attribute"};

struct ErrorNode {
  std::string id;
  int error_count = 0;
  std::vector<std::string> images;
};

struct ErrorEdge {
  std::string from;
  std::string to;
  std::vector<std::string> error_labels;
  int weight = 1;
};

/// Weight implied by an edge's labels: one error per label, at least one.
int default_edge_weight(const std::vector<std::string>& error_labels);

struct SemanticErrorGraph {
  std::string id;
  std::string prompt;
  Subset subset = Subset::synth;
  std::vector<ErrorNode> nodes;
  std::vector<ErrorEdge> edges;

  const ErrorNode* find_node(std::string_view node_id) const;
  std::size_t image_count() const;
};

struct Violation {
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  // Lint findings that do not make the graph invalid.
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
};

/// Checks every structural invariant of a SEG. Never throws on bad data;
/// each problem becomes one violation naming the node or edge involved.
ValidationReport validate_seg(const SemanticErrorGraph& seg);

/// Index-based adjacency view over a SEG. Children are ordered by node id.
/// Only meaningful for graphs whose edges reference known nodes.
class SegIndex {
 public:
  explicit SegIndex(const SemanticErrorGraph& seg);

  std::size_t size() const { return children_.size(); }
  std::optional<std::size_t> index_of(std::string_view node_id) const;
  const std::vector<std::size_t>& children(std::size_t node) const { return children_[node]; }
  const std::vector<std::size_t>& parents(std::size_t node) const { return parents_[node]; }
  /// Unique node with in-degree 0, if there is exactly one.
  std::optional<std::size_t> head() const { return head_; }

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::vector<std::size_t>> parents_;
  std::optional<std::size_t> head_;
};

class SegCollection {
 public:
  SegCollection() = default;
  /// Sorts by id; throws ValidationError on duplicate ids.
  explicit SegCollection(std::vector<SemanticErrorGraph> segs);

  const std::vector<SemanticErrorGraph>& segs() const { return segs_; }
  std::size_t size() const { return segs_.size(); }
  bool empty() const { return segs_.empty(); }
  const SemanticErrorGraph* find(std::string_view seg_id) const;

  auto begin() const { return segs_.begin(); }
  auto end() const { return segs_.end(); }

 private:
  std::vector<SemanticErrorGraph> segs_;
};

// ─── On-disk format (JSON, one graph per file) ───────────────

/// Parses one SEG document. `source` names the origin in error messages.
/// Unknown fields are reported through `warnings` when provided.
SemanticErrorGraph parse_seg(std::string_view text, const std::string& source,
                             std::vector<std::string>* warnings = nullptr);

/// Serialises with a fixed key order and two-space indentation.
std::string serialize_seg(const SemanticErrorGraph& seg);

/// Lists the SEG files under `path`: the file itself, or every `*.json`
/// directly inside a directory, sorted by filename.
std::vector<std::filesystem::path> list_seg_files(const std::filesystem::path& path);

/// Loads and validates SEG files from a file or directory.
/// Throws ParseError, ValidationError (aggregated violations or duplicate id) or IoError.
SegCollection load_segs(const std::filesystem::path& path,
                        std::vector<std::string>* warnings = nullptr);

/// Writes `<out_dir>/<seg id>.json` for every graph.
void write_segs(const SegCollection& collection, const std::filesystem::path& out_dir);

}  // namespace segeval
