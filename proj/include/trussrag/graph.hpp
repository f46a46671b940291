#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace trussrag {

using NodeIndex = std::uint32_t;
using EdgeId = std::uint32_t;

// Sorted, duplicate-free list of node indices.
using NodeSet = std::vector<NodeIndex>;

enum class NodeKind { entity, chunk };

struct NodeRecord {
  std::string id;
  NodeKind kind = NodeKind::entity;
  std::string name;
  std::string description;
  // Unit-normalized when present. Either every node has one of the same
  // dimension or none do.
  std::vector<float> embedding;

  bool operator==(const NodeRecord&) const = default;
};

struct EdgeAttr {
  std::string label;
  double weight = 1.0;

  bool operator==(const EdgeAttr&) const = default;
};

// Undirected edge, always stored with u < v.
struct Edge {
  NodeIndex u;
  NodeIndex v;

  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

// Immutable undirected attributed graph. Edges are numbered in lexicographic
// (u, v) order so EdgeId order is the canonical tie-break everywhere.
class AttributedGraph {
 public:
  AttributedGraph() = default;

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  const NodeRecord& node(NodeIndex v) const { return nodes_.at(v); }
  std::span<const NodeRecord> nodes() const noexcept { return nodes_; }
  std::optional<NodeIndex> find(std::string_view id) const;

  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  const EdgeAttr& edge_attr(EdgeId e) const { return attrs_.at(e); }
  std::optional<EdgeId> find_edge(NodeIndex a, NodeIndex b) const;

  // Neighbors in ascending order; incident_edges(v)[i] is the edge to
  // neighbors(v)[i].
  std::span<const NodeIndex> neighbors(NodeIndex v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  std::span<const EdgeId> incident_edges(NodeIndex v) const {
    return {adj_edges_.data() + offsets_[v], adj_edges_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeIndex v) const { return offsets_[v + 1] - offsets_[v]; }

  // Embedding dimension, 0 when the graph carries no embeddings.
  std::size_t dimension() const noexcept { return dimension_; }
  std::span<const float> embedding(NodeIndex v) const { return nodes_.at(v).embedding; }

  bool operator==(const AttributedGraph& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_ && attrs_ == other.attrs_;
  }

 private:
  friend class GraphBuilder;

  std::vector<NodeRecord> nodes_;
  std::unordered_map<std::string, NodeIndex> by_id_;
  std::vector<Edge> edges_;
  std::vector<EdgeAttr> attrs_;
  // CSR adjacency.
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeIndex> adj_;
  std::vector<EdgeId> adj_edges_;
  std::size_t dimension_ = 0;
};

// Single-writer construction. Node order is insertion order; node ids must be
// unique. Duplicate edges keep the first attribute seen.
class GraphBuilder {
 public:
  NodeIndex add_node(NodeRecord record);
  // Convenience for plain graphs: id = decimal index, no embedding.
  NodeIndex add_plain_node();
  void add_edge(NodeIndex a, NodeIndex b, EdgeAttr attr = {});
  void add_edge(std::string_view a, std::string_view b, EdgeAttr attr = {});

  std::size_t node_count() const noexcept { return nodes_.size(); }

  AttributedGraph build() &&;

 private:
  std::vector<NodeRecord> nodes_;
  std::unordered_map<std::string, NodeIndex> by_id_;
  std::vector<std::pair<Edge, EdgeAttr>> edges_;
  std::optional<std::size_t> dimension_;
};

// Plain graph on nodes 0..n-1 with the given edges (ids "0", "1", ...).
AttributedGraph make_plain_graph(std::size_t n, std::span<const Edge> edges,
                                 std::span<const std::vector<float>> embeddings = {});

// Subgraph of `g` induced by `nodes` (sorted). Node i of the result is
// nodes[i] of `g`; records and edge attributes are copied.
AttributedGraph induced_subgraph(const AttributedGraph& g, std::span<const NodeIndex> nodes);

// Subgraph made of the given edges and their endpoints, endpoints kept in
// ascending index order.
AttributedGraph edge_subgraph(const AttributedGraph& g, std::span<const EdgeId> edges);

// Maps node ids of `nodes` in `g` to their ids, preserving order.
std::vector<std::string> node_ids(const AttributedGraph& g, std::span<const NodeIndex> nodes);

}  // namespace trussrag
