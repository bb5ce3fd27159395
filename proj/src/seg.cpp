// SPDX-License-Identifier: Apache-2.0

#include "segeval/seg.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "segeval/error.hpp"
#include "segeval/io.hpp"

namespace segeval {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Subset subset) {
  switch (subset) {
    case Subset::synth:
      return "synth";
    case Subset::nat:
      return "nat";
    case Subset::real:
      return "real";
  }
  return "synth";
}

std::optional<Subset> parse_subset(std::string_view text) {
  if (text == "synth") return Subset::synth;
  if (text == "nat") return Subset::nat;
  if (text == "real") return Subset::real;
  return std::nullopt;
}

int default_edge_weight(const std::vector<std::string>& error_labels) {
  return std::max(1, static_cast<int>(error_labels.size()));
}

const ErrorNode* SemanticErrorGraph::find_node(std::string_view node_id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(),
                         [&](const ErrorNode& n) { return n.id == node_id; });
  return it == nodes.end() ? nullptr : &*it;
}

std::size_t SemanticErrorGraph::image_count() const {
  std::size_t total = 0;
  for (const auto& node : nodes) total += node.images.size();
  return total;
}

SegIndex::SegIndex(const SemanticErrorGraph& seg)
    : children_(seg.nodes.size()), parents_(seg.nodes.size()) {
  for (std::size_t i = 0; i < seg.nodes.size(); ++i) index_.emplace(seg.nodes[i].id, i);
  for (const auto& edge : seg.edges) {
    auto from = index_of(edge.from);
    auto to = index_of(edge.to);
    if (!from || !to || *from == *to) continue;
    auto& kids = children_[*from];
    if (std::find(kids.begin(), kids.end(), *to) != kids.end()) continue;
    kids.push_back(*to);
    parents_[*to].push_back(*from);
  }
  auto by_id = [&](std::size_t a, std::size_t b) { return seg.nodes[a].id < seg.nodes[b].id; };
  for (auto& kids : children_) std::sort(kids.begin(), kids.end(), by_id);
  for (auto& ps : parents_) std::sort(ps.begin(), ps.end(), by_id);

  std::optional<std::size_t> head;
  int roots = 0;
  for (std::size_t i = 0; i < parents_.size(); ++i) {
    if (parents_[i].empty()) {
      ++roots;
      head = i;
    }
  }
  if (roots == 1) head_ = head;
}

std::optional<std::size_t> SegIndex::index_of(std::string_view node_id) const {
  auto it = index_.find(std::string(node_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::string edge_name(const ErrorEdge& edge) { return fmt::format("{}->{}", edge.from, edge.to); }

// Kahn's algorithm; returns nodes in topological order, or nullopt if a cycle remains.
std::optional<std::vector<std::size_t>> topological_order(const SegIndex& index,
                                                          std::vector<std::size_t>* on_cycle) {
  std::vector<std::size_t> in_degree(index.size());
  for (std::size_t v = 0; v < index.size(); ++v) in_degree[v] = index.parents(v).size();
  std::vector<std::size_t> stack;
  for (std::size_t v = 0; v < index.size(); ++v) {
    if (in_degree[v] == 0) stack.push_back(v);
  }
  std::vector<std::size_t> order;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (auto c : index.children(v)) {
      if (--in_degree[c] == 0) stack.push_back(c);
    }
  }
  if (order.size() == index.size()) return order;
  if (on_cycle) {
    for (std::size_t v = 0; v < index.size(); ++v) {
      if (in_degree[v] > 0) on_cycle->push_back(v);
    }
  }
  return std::nullopt;
}

}  // namespace

ValidationReport validate_seg(const SemanticErrorGraph& seg) {
  ValidationReport report;
  auto violate = [&](std::string message) { report.violations.push_back({std::move(message)}); };

  if (seg.nodes.size() < 2) {
    violate(fmt::format("graph has {} node(s); at least 2 are required", seg.nodes.size()));
  }

  std::set<std::string> node_ids;
  std::unordered_map<std::string, std::string> image_owner;
  for (const auto& node : seg.nodes) {
    if (node.id.empty()) violate("node with empty id");
    if (!node_ids.insert(node.id).second) violate(fmt::format("duplicate node id {}", node.id));
    if (node.error_count < 0) {
      violate(fmt::format("negative error_count {} at node {}", node.error_count, node.id));
    }
    if (node.images.empty()) violate(fmt::format("node {} has no images", node.id));
    for (const auto& image : node.images) {
      if (image.empty()) {
        violate(fmt::format("empty image id at node {}", node.id));
        continue;
      }
      auto [it, inserted] = image_owner.emplace(image, node.id);
      if (!inserted) {
        violate(fmt::format("duplicate image id {} (nodes {}, {})", image, it->second, node.id));
      }
    }
  }

  std::set<std::pair<std::string, std::string>> seen_edges;
  for (const auto& edge : seg.edges) {
    for (const auto* end : {&edge.from, &edge.to}) {
      if (node_ids.count(*end) == 0) {
        violate(fmt::format("edge {} references unknown node {}", edge_name(edge), *end));
      }
    }
    if (edge.from == edge.to) violate(fmt::format("edge {} is a self-loop", edge_name(edge)));
    if (edge.weight < 1) {
      violate(fmt::format("edge {} has weight {}; weights must be >= 1", edge_name(edge),
                          edge.weight));
    } else if (!edge.error_labels.empty() &&
               edge.weight != static_cast<int>(edge.error_labels.size())) {
      violate(fmt::format("edge {} has weight {} but {} error label(s)", edge_name(edge),
                          edge.weight, edge.error_labels.size()));
    }
    if (!seen_edges.emplace(edge.from, edge.to).second) {
      violate(fmt::format("duplicate edge {}", edge_name(edge)));
    }
  }

  const auto total_images = seg.image_count();
  if (total_images < 4 || total_images > 76) {
    report.warnings.push_back(
        fmt::format("total image count {} outside the typical range [4, 76]", total_images));
  }

  if (seg.nodes.empty()) return report;

  SegIndex index(seg);
  std::vector<std::size_t> on_cycle;
  auto order = topological_order(index, &on_cycle);
  if (!order) {
    std::vector<std::string> names;
    for (auto v : on_cycle) names.push_back(seg.nodes[v].id);
    violate(fmt::format("edges contain a directed cycle involving nodes {}",
                        fmt::join(names, ", ")));
  }

  std::vector<std::string> roots;
  for (std::size_t v = 0; v < index.size(); ++v) {
    if (index.parents(v).empty()) roots.push_back(seg.nodes[v].id);
  }
  if (roots.empty()) {
    violate("no head node: every node has an incoming edge");
  } else if (roots.size() > 1) {
    violate(fmt::format("multiple head nodes: {}", fmt::join(roots, ", ")));
  }

  // Stored counts must increase along every edge so that walks are strictly increasing.
  for (const auto& edge : seg.edges) {
    const auto* from = seg.find_node(edge.from);
    const auto* to = seg.find_node(edge.to);
    if (from && to && from != to && to->error_count <= from->error_count) {
      violate(fmt::format("error_count does not increase along edge {} ({} -> {})",
                          edge_name(edge), from->error_count, to->error_count));
    }
  }

  if (!order || !index.head()) return report;
  const auto head = *index.head();
  if (seg.nodes[head].error_count != 0) {
    violate(fmt::format("head node {} has error_count {}; expected 0", seg.nodes[head].id,
                        seg.nodes[head].error_count));
  }

  // Weighted shortest path from the head, relaxed in topological order.
  constexpr long kUnreached = std::numeric_limits<long>::max();
  std::vector<long> distance(index.size(), kUnreached);
  distance[head] = 0;
  std::unordered_map<std::string, int> weight_of;
  for (const auto& edge : seg.edges) {
    auto key = edge.from + '\n' + edge.to;
    auto it = weight_of.find(key);
    if (it == weight_of.end() || edge.weight < it->second) weight_of[key] = edge.weight;
  }
  for (auto u : *order) {
    if (distance[u] == kUnreached) continue;
    for (auto v : index.children(u)) {
      auto w = std::max(1, weight_of.at(seg.nodes[u].id + '\n' + seg.nodes[v].id));
      distance[v] = std::min(distance[v], distance[u] + w);
    }
  }
  for (std::size_t v = 0; v < index.size(); ++v) {
    if (distance[v] == kUnreached) {
      violate(fmt::format("node {} is unreachable from head {}", seg.nodes[v].id,
                          seg.nodes[head].id));
    } else if (v != head && distance[v] != seg.nodes[v].error_count) {
      violate(fmt::format("error_count mismatch at node {}: expected {}", seg.nodes[v].id,
                          distance[v]));
    }
  }
  return report;
}

SegCollection::SegCollection(std::vector<SemanticErrorGraph> segs) : segs_(std::move(segs)) {
  std::stable_sort(segs_.begin(), segs_.end(),
                   [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < segs_.size(); ++i) {
    if (segs_[i].id == segs_[i - 1].id) {
      throw ValidationError(fmt::format("duplicate seg id {}", segs_[i].id));
    }
  }
}

const SemanticErrorGraph* SegCollection::find(std::string_view seg_id) const {
  auto it = std::lower_bound(segs_.begin(), segs_.end(), seg_id,
                             [](const auto& seg, std::string_view id) { return seg.id < id; });
  if (it == segs_.end() || it->id != seg_id) return nullptr;
  return &*it;
}

// ─── JSON ────────────────────────────────────────────────────

namespace {

class FieldReader {
 public:
  FieldReader(const json& object, std::string path, const std::string& source,
              std::vector<std::string>* warnings)
      : object_(object), path_(std::move(path)), source_(source), warnings_(warnings) {
    if (!object_.is_object()) fail(path_.empty() ? "document" : path_, "expected an object");
  }

  const json& required(const char* name, json::value_t type, const char* type_name) {
    used_.insert(name);
    auto it = object_.find(name);
    if (it == object_.end()) {
      throw ParseError(fmt::format("{}: missing required field \"{}\"", source_, qualified(name)));
    }
    if (!matches(*it, type)) fail(qualified(name), fmt::format("expected {}", type_name));
    return *it;
  }

  const json* optional(const char* name, json::value_t type, const char* type_name) {
    used_.insert(name);
    auto it = object_.find(name);
    if (it == object_.end() || it->is_null()) return nullptr;
    if (!matches(*it, type)) fail(qualified(name), fmt::format("expected {}", type_name));
    return &*it;
  }

  std::string string(const char* name) {
    return required(name, json::value_t::string, "a string").get<std::string>();
  }

  int integer(const json& value, const std::string& field) const {
    if (!value.is_number_integer()) fail(field, "expected an integer");
    auto v = value.get<long long>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      fail(field, "integer out of range");
    }
    return static_cast<int>(v);
  }

  std::vector<std::string> strings(const json& array, const std::string& field) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < array.size(); ++i) {
      if (!array[i].is_string()) fail(fmt::format("{}[{}]", field, i), "expected a string");
      out.push_back(array[i].get<std::string>());
    }
    return out;
  }

  std::string qualified(const std::string& name) const {
    return path_.empty() ? name : path_ + "." + name;
  }

  void warn_unknown() const {
    if (!warnings_) return;
    for (const auto& [key, _] : object_.items()) {
      if (used_.count(key) == 0) {
        warnings_->push_back(
            fmt::format("{}: ignoring unknown field \"{}\"", source_, qualified(key)));
      }
    }
  }

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw ParseError(fmt::format("{}: field \"{}\": {}", source_, field, what));
  }

 private:
  static bool matches(const json& value, json::value_t type) {
    if (type == json::value_t::number_integer) return value.is_number_integer();
    return value.type() == type;
  }

  const json& object_;
  std::string path_;
  const std::string& source_;
  std::vector<std::string>* warnings_;
  std::set<std::string> used_;
};

}  // namespace

SemanticErrorGraph parse_seg(std::string_view text, const std::string& source,
                             std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: malformed JSON: {}", source, e.what()));
  }

  SemanticErrorGraph seg;
  FieldReader top(doc, "", source, warnings);
  seg.id = top.string("id");
  seg.prompt = top.string("prompt");
  auto subset_text = top.string("subset");
  auto subset = parse_subset(subset_text);
  if (!subset) {
    top.fail("subset", fmt::format("expected one of synth, nat, real; got \"{}\"", subset_text));
  }
  seg.subset = *subset;

  const auto& nodes = top.required("nodes", json::value_t::array, "an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    FieldReader r(nodes[i], fmt::format("nodes[{}]", i), source, warnings);
    ErrorNode node;
    node.id = r.string("id");
    node.error_count = r.integer(r.required("error_count", json::value_t::number_integer,
                                            "an integer"),
                                 r.qualified("error_count"));
    node.images = r.strings(r.required("images", json::value_t::array, "an array"),
                            r.qualified("images"));
    r.warn_unknown();
    seg.nodes.push_back(std::move(node));
  }

  const auto& edges = top.required("edges", json::value_t::array, "an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    FieldReader r(edges[i], fmt::format("edges[{}]", i), source, warnings);
    ErrorEdge edge;
    edge.from = r.string("from");
    edge.to = r.string("to");
    edge.error_labels = r.strings(r.required("error_labels", json::value_t::array, "an array"),
                                  r.qualified("error_labels"));
    if (const auto* weight = r.optional("weight", json::value_t::number_integer, "an integer")) {
      edge.weight = r.integer(*weight, r.qualified("weight"));
    } else {
      edge.weight = default_edge_weight(edge.error_labels);
    }
    r.warn_unknown();
    seg.edges.push_back(std::move(edge));
  }
  top.warn_unknown();
  return seg;
}

std::string serialize_seg(const SemanticErrorGraph& seg) {
  nlohmann::ordered_json doc;
  doc["id"] = seg.id;
  doc["prompt"] = seg.prompt;
  doc["subset"] = std::string(to_string(seg.subset));
  doc["nodes"] = nlohmann::ordered_json::array();
  for (const auto& node : seg.nodes) {
    nlohmann::ordered_json n;
    n["id"] = node.id;
    n["error_count"] = node.error_count;
    n["images"] = node.images;
    doc["nodes"].push_back(std::move(n));
  }
  doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& edge : seg.edges) {
    nlohmann::ordered_json e;
    e["from"] = edge.from;
    e["to"] = edge.to;
    e["error_labels"] = edge.error_labels;
    e["weight"] = edge.weight;
    doc["edges"].push_back(std::move(e));
  }
  return doc.dump(2) + "\n";
}

std::vector<fs::path> list_seg_files(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw IoError(fmt::format("{}: no such file or directory", path.string()));
  if (!fs::is_directory(path, ec)) return {path};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  if (ec) throw IoError(fmt::format("{}: {}", path.string(), ec.message()));
  std::sort(files.begin(), files.end());
  return files;
}

SegCollection load_segs(const fs::path& path, std::vector<std::string>* warnings) {
  auto files = list_seg_files(path);
  if (files.empty()) throw IoError(fmt::format("{}: no SEG files found", path.string()));

  std::vector<SemanticErrorGraph> segs;
  std::unordered_map<std::string, std::string> origin;
  std::vector<std::string> problems;
  for (const auto& file : files) {
    auto seg = parse_seg(read_text_file(file), file.string(), warnings);
    auto report = validate_seg(seg);
    for (const auto& v : report.violations) {
      problems.push_back(fmt::format("{} (seg {}): {}", file.string(), seg.id, v.message));
    }
    if (warnings) {
      for (const auto& w : report.warnings) {
        warnings->push_back(fmt::format("{} (seg {}): {}", file.string(), seg.id, w));
      }
    }
    auto [it, inserted] = origin.emplace(seg.id, file.string());
    if (!inserted) {
      throw ValidationError(
          fmt::format("duplicate seg id {} ({}, {})", seg.id, it->second, file.string()));
    }
    segs.push_back(std::move(seg));
  }
  if (!problems.empty()) {
    throw ValidationError(fmt::format("{} violation(s):\n  {}", problems.size(),
                                      fmt::join(problems, "\n  ")));
  }
  return SegCollection(std::move(segs));
}

void write_segs(const SegCollection& collection, const fs::path& out_dir) {
  for (const auto& seg : collection) write_text_file(out_dir / (seg.id + ".json"), serialize_seg(seg));
}

}  // namespace segeval
