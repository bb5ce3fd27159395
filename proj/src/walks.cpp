// SPDX-License-Identifier: Apache-2.0

#include "segeval/walks.hpp"

#include <set>

#include <fmt/format.h>

#include "segeval/error.hpp"

namespace segeval {

std::string_view to_string(PairMode mode) {
  return mode == PairMode::per_walk ? "per-walk" : "unique-edge";
}

std::optional<PairMode> parse_pair_mode(std::string_view text) {
  if (text == "per-walk") return PairMode::per_walk;
  if (text == "unique-edge") return PairMode::unique_edge;
  return std::nullopt;
}

std::vector<Walk> enumerate_walks(const SemanticErrorGraph& seg) {
  auto report = validate_seg(seg);
  if (!report.ok()) {
    throw ValidationError(fmt::format("cannot enumerate walks of invalid seg {}: {}", seg.id,
                                      report.violations.front().message));
  }
  SegIndex index(seg);
  std::vector<Walk> walks;

  // Iterative DFS; children are pre-sorted by id, so walks come out in lexicographic order.
  struct Frame {
    std::size_t node;
    std::size_t next_child;
  };
  std::vector<Frame> stack{{*index.head(), 0}};
  std::vector<std::string> path{seg.nodes[*index.head()].id};
  while (!stack.empty()) {
    auto& top = stack.back();
    const auto& kids = index.children(top.node);
    if (kids.empty()) {
      walks.push_back({seg.id, path});
    }
    if (top.next_child < kids.size()) {
      auto child = kids[top.next_child++];
      stack.push_back({child, 0});
      path.push_back(seg.nodes[child].id);
    } else {
      stack.pop_back();
      path.pop_back();
    }
  }
  return walks;
}

WalkTriples walk_triples(const SemanticErrorGraph& seg, const Walk& walk) {
  WalkTriples triples;
  for (const auto& node_id : walk.node_ids) {
    const auto* node = seg.find_node(node_id);
    if (!node) {
      throw ValidationError(fmt::format("walk references unknown node {} in seg {}", node_id, seg.id));
    }
    for (const auto& image : node->images) triples.entries.push_back({image, node->error_count});
  }
  return triples;
}

std::vector<NodePair> adjacent_pairs(const std::vector<Walk>& walks, PairMode mode) {
  std::vector<NodePair> pairs;
  std::set<NodePair> seen;
  for (const auto& walk : walks) {
    for (std::size_t i = 0; i + 1 < walk.node_ids.size(); ++i) {
      NodePair pair{walk.node_ids[i], walk.node_ids[i + 1]};
      if (mode == PairMode::unique_edge && !seen.insert(pair).second) continue;
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

std::vector<NodePair> adjacent_pairs(const SemanticErrorGraph& seg, PairMode mode) {
  return adjacent_pairs(enumerate_walks(seg), mode);
}

}  // namespace segeval
