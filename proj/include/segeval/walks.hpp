// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "segeval/seg.hpp"

namespace segeval {

/// A maximal head-to-leaf path. Error counts strictly increase along it.
struct Walk {
  std::string seg_id;
  std::vector<std::string> node_ids;

  bool operator==(const Walk&) const = default;
};

struct WalkEntry {
  std::string image_id;
  int error_count = 0;

  bool operator==(const WalkEntry&) const = default;
};

/// (image, error count) for every image along a walk, in walk order.
struct WalkTriples {
  std::vector<WalkEntry> entries;
};

/// Every head-to-leaf path exactly once, in lexicographic order of node-id
/// sequences. Requires a valid SEG (ValidationError otherwise).
std::vector<Walk> enumerate_walks(const SemanticErrorGraph& seg);

/// Throws ValidationError if the walk names a node absent from `seg`.
WalkTriples walk_triples(const SemanticErrorGraph& seg, const Walk& walk);

enum class PairMode {
  per_walk,     // each consecutive pair once per walk it appears in
  unique_edge,  // each traversed edge once
};

std::string_view to_string(PairMode mode);
std::optional<PairMode> parse_pair_mode(std::string_view text);

using NodePair = std::pair<std::string, std::string>;

/// Adjacent (lower-error, higher-error) node pairs along the walks.
std::vector<NodePair> adjacent_pairs(const SemanticErrorGraph& seg, PairMode mode);

/// Same, reusing an already enumerated walk set.
std::vector<NodePair> adjacent_pairs(const std::vector<Walk>& walks, PairMode mode);

}  // namespace segeval
