#include "trussrag/truss.hpp"

#include <algorithm>
#include <deque>

#include "trussrag/error.hpp"
#include "trussrag/kernels.hpp"

namespace trussrag {

std::size_t edge_support(const AttributedGraph& g, NodeIndex a, NodeIndex b) {
  if (!g.find_edge(a, b)) throw NotFound("edge (" + std::to_string(a) + ", " + std::to_string(b) + ") not in graph");
  auto x = g.neighbors(a);
  auto y = g.neighbors(b);
  std::size_t count = 0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i] < y[j]) ++i;
    else if (x[i] > y[j]) ++j;
    else { ++count; ++i; ++j; }
  }
  return count;
}

std::uint32_t TrussIndex::max_truss() const {
  std::uint32_t best = 0;
  for (auto t : truss_number) best = std::max(best, t);
  return best;
}

std::vector<EdgeId> TrussIndex::edges_at_least(int k) const {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < truss_number.size(); ++e)
    if (static_cast<int>(truss_number[e]) >= k) out.push_back(e);
  return out;
}

TrussIndex truss_decomposition(const AttributedGraph& g) {
  const std::size_t m = g.edge_count();
  TrussIndex out;
  out.truss_number.assign(m, 2);
  if (m == 0) return out;

  std::vector<std::uint32_t> sup = edge_supports(g);
  const std::uint32_t max_sup = *std::max_element(sup.begin(), sup.end());

  // Bin sort by support; within a bin edges start in EdgeId order.
  std::vector<std::size_t> bin(max_sup + 2, 0);
  for (auto s : sup) ++bin[s + 1];
  for (std::size_t s = 1; s < bin.size(); ++s) bin[s] += bin[s - 1];
  std::vector<EdgeId> order(m);
  std::vector<std::size_t> pos(m);
  {
    std::vector<std::size_t> next(bin.begin(), bin.end() - 1);
    for (EdgeId e = 0; e < m; ++e) {
      pos[e] = next[sup[e]]++;
      order[pos[e]] = e;
    }
  }

  std::vector<char> removed(m, 0);
  auto decrement = [&](EdgeId f, std::uint32_t floor) {
    if (sup[f] <= floor) return;
    const std::uint32_t s = sup[f];
    const std::size_t first = bin[s];
    const EdgeId other = order[first];
    if (other != f) {
      std::swap(order[first], order[pos[f]]);
      pos[other] = pos[f];
      pos[f] = first;
    }
    ++bin[s];
    --sup[f];
  };

  for (std::size_t i = 0; i < m; ++i) {
    const EdgeId e = order[i];
    const std::uint32_t s = sup[e];
    out.truss_number[e] = s + 2;
    const Edge& uv = g.edge(e);
    auto nu = g.neighbors(uv.u);
    auto eu = g.incident_edges(uv.u);
    auto nv = g.neighbors(uv.v);
    auto ev = g.incident_edges(uv.v);
    std::size_t a = 0, b = 0;
    while (a < nu.size() && b < nv.size()) {
      if (nu[a] < nv[b]) { ++a; continue; }
      if (nu[a] > nv[b]) { ++b; continue; }
      const EdgeId f1 = eu[a], f2 = ev[b];
      if (!removed[f1] && !removed[f2]) {
        decrement(f1, s);
        decrement(f2, s);
      }
      ++a;
      ++b;
    }
    removed[e] = 1;
  }
  return out;
}

AttributedGraph maximal_k_truss(const AttributedGraph& g, const TrussIndex& truss, int k) {
  if (k < 2) throw InvalidInput("k must be >= 2");
  auto edges = truss.edges_at_least(k);
  return edge_subgraph(g, edges);
}

AttributedGraph maximal_k_truss(const AttributedGraph& g, int k) {
  return maximal_k_truss(g, truss_decomposition(g), k);
}

std::vector<NodeSet> connected_components(const AttributedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<char> seen(n, 0);
  std::vector<NodeSet> out;
  std::vector<NodeIndex> stack;
  for (NodeIndex s = 0; s < n; ++s) {
    if (seen[s]) continue;
    NodeSet part;
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeIndex v = stack.back();
      stack.pop_back();
      part.push_back(v);
      for (NodeIndex w : g.neighbors(v))
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    std::sort(part.begin(), part.end());
    out.push_back(std::move(part));
  }
  return out;
}

std::vector<NodeSet> edge_components(const AttributedGraph& g, std::span<const EdgeId> edges) {
  const std::size_t n = g.node_count();
  // Union-find over the listed edges.
  std::vector<NodeIndex> parent(n);
  for (NodeIndex v = 0; v < n; ++v) parent[v] = v;
  auto find = [&](NodeIndex v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::vector<char> touched(n, 0);
  for (EdgeId e : edges) {
    const Edge& uv = g.edge(e);
    touched[uv.u] = touched[uv.v] = 1;
    NodeIndex a = find(uv.u), b = find(uv.v);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::int64_t> slot(n, -1);
  std::vector<NodeSet> out;
  for (NodeIndex v = 0; v < n; ++v) {
    if (!touched[v]) continue;
    NodeIndex r = find(v);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::int64_t>(out.size());
      out.emplace_back();
    }
    out[slot[r]].push_back(v);
  }
  return out;
}

void require_node_set(const AttributedGraph& g, std::span<const NodeIndex> s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] >= g.node_count()) throw InvalidInput("node index " + std::to_string(s[i]) + " out of range");
    if (i > 0 && s[i] <= s[i - 1]) throw InvalidInput("node set must be sorted and duplicate-free");
  }
}

bool is_connected_k_truss(const AttributedGraph& g, std::span<const NodeIndex> s, int k) {
  require_node_set(g, s);
  if (s.empty()) return false;
  if (s.size() == 1) return k <= 2;
  AttributedGraph h = induced_subgraph(g, s);
  std::vector<EdgeId> kept;
  if (k <= 2) {
    kept.resize(h.edge_count());
    for (EdgeId e = 0; e < kept.size(); ++e) kept[e] = e;
  } else {
    kept = truss_decomposition(h).edges_at_least(k);
  }
  auto parts = edge_components(h, kept);
  return parts.size() == 1 && parts.front().size() == s.size();
}

namespace {

GraphMetrics metrics_impl(const AttributedGraph& g, std::span<const NodeIndex> s,
                          const AttributedGraph& ambient, std::span<const NodeIndex> in_ambient) {
  GraphMetrics m;
  if (s.size() > 1) {
    std::vector<char> member(g.node_count(), 0);
    for (NodeIndex v : s) member[v] = 1;
    std::size_t edges = 0;
    for (NodeIndex v : s)
      for (NodeIndex w : g.neighbors(v))
        if (w > v && member[w]) ++edges;
    const double n = static_cast<double>(s.size());
    m.density = 2.0 * static_cast<double>(edges) / (n * (n - 1.0));
  }
  std::vector<int> dist(ambient.node_count());
  std::vector<char> target(ambient.node_count(), 0);
  for (NodeIndex v : in_ambient) target[v] = 1;
  std::deque<NodeIndex> queue;
  for (NodeIndex src : in_ambient) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[src] = 0;
    queue.assign(1, src);
    std::size_t found = 1;
    while (!queue.empty() && found < in_ambient.size()) {
      NodeIndex v = queue.front();
      queue.pop_front();
      for (NodeIndex w : ambient.neighbors(v)) {
        if (dist[w] >= 0) continue;
        dist[w] = dist[v] + 1;
        if (target[w]) {
          ++found;
          m.diameter = std::max(m.diameter, dist[w]);
        }
        queue.push_back(w);
      }
    }
    if (found < in_ambient.size()) m.all_pairs_reachable = false;
  }
  return m;
}

}  // namespace

GraphMetrics graph_metrics(const AttributedGraph& g, std::span<const NodeIndex> s) {
  require_node_set(g, s);
  if (s.empty()) throw InvalidInput("graph_metrics of an empty node set");
  return metrics_impl(g, s, g, s);
}

GraphMetrics graph_metrics(const AttributedGraph& g, std::span<const NodeIndex> s,
                           const AttributedGraph& ambient) {
  require_node_set(g, s);
  if (s.empty()) throw InvalidInput("graph_metrics of an empty node set");
  std::vector<NodeIndex> mapped;
  mapped.reserve(s.size());
  for (NodeIndex v : s) {
    auto a = ambient.find(g.node(v).id);
    if (!a) throw InvalidInput("node '" + g.node(v).id + "' not in ambient graph");
    mapped.push_back(*a);
  }
  return metrics_impl(g, s, ambient, mapped);
}

}  // namespace trussrag
