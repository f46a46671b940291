#include "trussrag/graph.hpp"

#include <algorithm>
#include <cmath>

#include "trussrag/error.hpp"

namespace trussrag {

std::optional<NodeIndex> AttributedGraph::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeId> AttributedGraph::find_edge(NodeIndex a, NodeIndex b) const {
  if (a >= nodes_.size() || b >= nodes_.size()) return std::nullopt;
  if (degree(a) > degree(b)) std::swap(a, b);
  auto nbrs = neighbors(a);
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), b);
  if (it == nbrs.end() || *it != b) return std::nullopt;
  return incident_edges(a)[static_cast<std::size_t>(it - nbrs.begin())];
}

NodeIndex GraphBuilder::add_node(NodeRecord record) {
  if (by_id_.count(record.id)) throw InvalidInput("duplicate node id '" + record.id + "'");
  const std::size_t dim = record.embedding.size();
  if (!dimension_) {
    dimension_ = dim;
  } else if (*dimension_ != dim) {
    throw InvalidInput("node '" + record.id + "' has embedding dimension " + std::to_string(dim) +
                       ", expected " + std::to_string(*dimension_));
  }
  if (dim > 0) {
    double sq = 0.0;
    for (float x : record.embedding) sq += static_cast<double>(x) * x;
    const double norm = std::sqrt(sq);
    if (std::abs(norm - 1.0) > 1e-6)
      throw InvalidInput("node '" + record.id + "' embedding is not unit-normalized");
  }
  auto idx = static_cast<NodeIndex>(nodes_.size());
  by_id_.emplace(record.id, idx);
  nodes_.push_back(std::move(record));
  return idx;
}

NodeIndex GraphBuilder::add_plain_node() {
  NodeRecord r;
  r.id = std::to_string(nodes_.size());
  r.name = r.id;
  return add_node(std::move(r));
}

void GraphBuilder::add_edge(NodeIndex a, NodeIndex b, EdgeAttr attr) {
  if (a >= nodes_.size() || b >= nodes_.size()) throw NotFound("edge endpoint not in graph");
  if (a == b) throw InvalidInput("self-loop on node '" + nodes_[a].id + "'");
  if (a > b) std::swap(a, b);
  edges_.push_back({Edge{a, b}, std::move(attr)});
}

void GraphBuilder::add_edge(std::string_view a, std::string_view b, EdgeAttr attr) {
  auto ia = by_id_.find(std::string(a));
  auto ib = by_id_.find(std::string(b));
  if (ia == by_id_.end() || ib == by_id_.end())
    throw NotFound("edge endpoint '" + std::string(ia == by_id_.end() ? a : b) + "' not in graph");
  add_edge(ia->second, ib->second, std::move(attr));
}

AttributedGraph GraphBuilder::build() && {
  AttributedGraph g;
  g.dimension_ = dimension_.value_or(0);
  g.nodes_ = std::move(nodes_);
  g.by_id_ = std::move(by_id_);

  std::stable_sort(edges_.begin(), edges_.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  for (auto& [e, attr] : edges_) {
    if (!g.edges_.empty() && g.edges_.back() == e) continue;
    g.edges_.push_back(e);
    g.attrs_.push_back(std::move(attr));
  }

  const std::size_t n = g.nodes_.size();
  std::vector<std::size_t> deg(n, 0);
  for (const Edge& e : g.edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + deg[v];
  g.adj_.resize(g.offsets_[n]);
  g.adj_edges_.resize(g.offsets_[n]);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  // Edges are sorted by (u, v), so writing in edge order leaves every list sorted:
  // for a fixed node w, entries with w as `v` (neighbors u < w) come from
  // earlier edges than entries with w as `u` (neighbors > w).
  for (EdgeId id = 0; id < g.edges_.size(); ++id) {
    const Edge& e = g.edges_[id];
    g.adj_[fill[e.v]] = e.u;
    g.adj_edges_[fill[e.v]++] = id;
  }
  for (EdgeId id = 0; id < g.edges_.size(); ++id) {
    const Edge& e = g.edges_[id];
    g.adj_[fill[e.u]] = e.v;
    g.adj_edges_[fill[e.u]++] = id;
  }
  return g;
}

AttributedGraph make_plain_graph(std::size_t n, std::span<const Edge> edges,
                                 std::span<const std::vector<float>> embeddings) {
  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) {
    NodeRecord r;
    r.id = std::to_string(i);
    r.name = r.id;
    if (!embeddings.empty()) r.embedding = embeddings[i];
    b.add_node(std::move(r));
  }
  for (const Edge& e : edges) b.add_edge(e.u, e.v);
  return std::move(b).build();
}

AttributedGraph induced_subgraph(const AttributedGraph& g, std::span<const NodeIndex> nodes) {
  GraphBuilder b;
  std::vector<NodeIndex> local(g.node_count(), static_cast<NodeIndex>(-1));
  for (NodeIndex v : nodes) local[v] = b.add_node(g.node(v));
  for (NodeIndex v : nodes) {
    auto nbrs = g.neighbors(v);
    auto eids = g.incident_edges(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      NodeIndex w = nbrs[i];
      if (w > v && local[w] != static_cast<NodeIndex>(-1))
        b.add_edge(local[v], local[w], g.edge_attr(eids[i]));
    }
  }
  return std::move(b).build();
}

AttributedGraph edge_subgraph(const AttributedGraph& g, std::span<const EdgeId> edges) {
  std::vector<char> keep(g.node_count(), 0);
  for (EdgeId e : edges) {
    keep[g.edge(e).u] = 1;
    keep[g.edge(e).v] = 1;
  }
  GraphBuilder b;
  std::vector<NodeIndex> local(g.node_count(), 0);
  for (NodeIndex v = 0; v < g.node_count(); ++v)
    if (keep[v]) local[v] = b.add_node(g.node(v));
  for (EdgeId e : edges) b.add_edge(local[g.edge(e).u], local[g.edge(e).v], g.edge_attr(e));
  return std::move(b).build();
}

std::vector<std::string> node_ids(const AttributedGraph& g, std::span<const NodeIndex> nodes) {
  std::vector<std::string> out;
  out.reserve(nodes.size());
  for (NodeIndex v : nodes) out.push_back(g.node(v).id);
  return out;
}

}  // namespace trussrag
