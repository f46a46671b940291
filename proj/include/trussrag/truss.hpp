#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "trussrag/graph.hpp"

namespace trussrag {

// Number of triangles containing edge (a, b). Throws NotFound if absent.
std::size_t edge_support(const AttributedGraph& g, NodeIndex a, NodeIndex b);

// Per-edge truss numbers (>= 2), indexed by EdgeId.
struct TrussIndex {
  std::vector<std::uint32_t> truss_number;

  // Largest truss number, 2 for a triangle-free graph, 0 when edgeless.
  std::uint32_t max_truss() const;
  // Edges with truss number >= k, ascending.
  std::vector<EdgeId> edges_at_least(int k) const;

  bool operator==(const TrussIndex&) const = default;
};

// Bucket-queue peeling over initial supports from edge_supports().
TrussIndex truss_decomposition(const AttributedGraph& g);

// Edges with truss number >= k plus their endpoints. Empty graph if none.
AttributedGraph maximal_k_truss(const AttributedGraph& g, int k);
AttributedGraph maximal_k_truss(const AttributedGraph& g, const TrussIndex& truss, int k);

// Connected components ordered by their smallest node; each part sorted.
// Isolated nodes form singleton components.
std::vector<NodeSet> connected_components(const AttributedGraph& g);

// Components of the graph formed by `edges` alone (nodes without a listed
// edge are not reported).
std::vector<NodeSet> edge_components(const AttributedGraph& g, std::span<const EdgeId> edges);

// True iff G[s] contains a connected k-truss spanning every node of s. When
// G[s] is itself a k-truss this is "connected and every induced edge lies in
// >= k-2 induced triangles". Empty s is false; a single node only qualifies
// for k <= 2.
bool is_connected_k_truss(const AttributedGraph& g, std::span<const NodeIndex> s, int k);

struct GraphMetrics {
  double density = 0.0;
  // Longest shortest path between pairs of s that are reachable in the ambient
  // graph.
  int diameter = 0;
  bool all_pairs_reachable = true;
};

// Density of G[s]; diameter by shortest paths in g itself.
GraphMetrics graph_metrics(const AttributedGraph& g, std::span<const NodeIndex> s);
// Same, but distances measured in `ambient`, matched by node id.
GraphMetrics graph_metrics(const AttributedGraph& g, std::span<const NodeIndex> s,
                           const AttributedGraph& ambient);

// Node sets are expected sorted and in range; throws InvalidInput otherwise.
void require_node_set(const AttributedGraph& g, std::span<const NodeIndex> s);

}  // namespace trussrag
