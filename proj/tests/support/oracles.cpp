#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>

namespace oracle {

std::vector<std::vector<char>> adjacency(const AttributedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<char>> a(n, std::vector<char>(n, 0));
  for (const auto& e : g.edges()) a[e.u][e.v] = a[e.v][e.u] = 1;
  return a;
}

std::size_t support(const AttributedGraph& g, NodeIndex u, NodeIndex v) {
  const auto a = adjacency(g);
  std::size_t c = 0;
  for (std::size_t w = 0; w < g.node_count(); ++w) c += a[u][w] && a[v][w];
  return c;
}

namespace {

// Iterative deletion on an alive mask over g's edges.
void peel_to_k(const AttributedGraph& g, std::vector<char>& alive, int k) {
  const std::size_t n = g.node_count();
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::vector<char>> a(n, std::vector<char>(n, 0));
    for (std::size_t e = 0; e < alive.size(); ++e)
      if (alive[e]) a[g.edge(e).u][g.edge(e).v] = a[g.edge(e).v][g.edge(e).u] = 1;
    for (std::size_t e = 0; e < alive.size(); ++e) {
      if (!alive[e]) continue;
      int s = 0;
      for (std::size_t w = 0; w < n; ++w) s += a[g.edge(e).u][w] && a[g.edge(e).v][w];
      if (s < k - 2) {
        alive[e] = 0;
        changed = true;
      }
    }
  }
}

}  // namespace

std::vector<std::uint32_t> k_truss_edges(const AttributedGraph& g, int k) {
  std::vector<char> alive(g.edge_count(), 1);
  peel_to_k(g, alive, k);
  std::vector<std::uint32_t> out;
  for (std::uint32_t e = 0; e < alive.size(); ++e)
    if (alive[e]) out.push_back(e);
  return out;
}

std::vector<int> truss_numbers(const AttributedGraph& g) {
  std::vector<int> t(g.edge_count(), 2);
  std::vector<char> alive(g.edge_count(), 1);
  for (int k = 3;; ++k) {
    peel_to_k(g, alive, k);
    bool any = false;
    for (std::size_t e = 0; e < alive.size(); ++e)
      if (alive[e]) {
        t[e] = k;
        any = true;
      }
    if (!any) break;
  }
  return t;
}

std::vector<NodeSet> components(const AttributedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (const auto& e : g.edges()) parent[find(e.u)] = find(e.v);
  std::vector<NodeSet> groups(n);
  for (NodeIndex v = 0; v < n; ++v) groups[find(v)].push_back(v);
  std::vector<NodeSet> out;
  for (auto& gr : groups)
    if (!gr.empty()) out.push_back(gr);
  std::sort(out.begin(), out.end(), [](const NodeSet& a, const NodeSet& b) { return a[0] < b[0]; });
  return out;
}

std::vector<std::vector<int>> all_pairs_distances(const AttributedGraph& g) {
  const std::size_t n = g.node_count();
  const auto a = adjacency(g);
  std::vector<std::vector<int>> d(n, std::vector<int>(n, -1));
  for (std::size_t s = 0; s < n; ++s) {
    std::queue<std::size_t> q;
    d[s][s] = 0;
    q.push(s);
    while (!q.empty()) {
      const auto x = q.front();
      q.pop();
      for (std::size_t y = 0; y < n; ++y)
        if (a[x][y] && d[s][y] < 0) {
          d[s][y] = d[s][x] + 1;
          q.push(y);
        }
    }
  }
  return d;
}

namespace {

// Edges of G[s] as index pairs into s, plus the local adjacency matrix.
struct Local {
  std::vector<std::vector<char>> a;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

Local local_graph(const AttributedGraph& g, const NodeSet& s) {
  const auto full = adjacency(g);
  Local l;
  l.a.assign(s.size(), std::vector<char>(s.size(), 0));
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if (full[s[i]][s[j]]) {
        l.a[i][j] = l.a[j][i] = 1;
        l.edges.emplace_back(i, j);
      }
  return l;
}

bool connected_on(const std::vector<std::vector<char>>& a, std::size_t n) {
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto x = stack.back();
    stack.pop_back();
    for (std::size_t y = 0; y < n; ++y)
      if (a[x][y] && !seen[y]) {
        seen[y] = 1;
        ++count;
        stack.push_back(y);
      }
  }
  return count == n;
}

}  // namespace

bool spanning_k_truss(const AttributedGraph& g, const NodeSet& s, int k) {
  if (s.empty()) return false;
  if (s.size() == 1) return k <= 2;
  Local l = local_graph(g, s);
  const std::size_t n = s.size();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!l.a[i][j]) continue;
        int t = 0;
        for (std::size_t w = 0; w < n; ++w) t += l.a[i][w] && l.a[j][w];
        if (t < k - 2) {
          l.a[i][j] = l.a[j][i] = 0;
          changed = true;
        }
      }
  }
  return connected_on(l.a, n);
}

bool induced_k_truss(const AttributedGraph& g, const NodeSet& s, int k) {
  if (s.empty()) return false;
  if (s.size() == 1) return k <= 2;
  const Local l = local_graph(g, s);
  if (!connected_on(l.a, s.size())) return false;
  for (auto [i, j] : l.edges) {
    int t = 0;
    for (std::size_t w = 0; w < s.size(); ++w) t += l.a[i][w] && l.a[j][w];
    if (t < k - 2) return false;
  }
  return true;
}

double mean_relevance(const std::vector<double>& rel, const NodeSet& s) {
  double sum = 0;
  for (auto v : s) sum += rel[v];
  return sum / static_cast<double>(s.size());
}

Optimum brute_force(const AttributedGraph& g, const std::vector<double>& rel, int k) {
  Optimum best;
  NodeSet current;
  const std::size_t n = g.node_count();
  std::function<void(std::size_t)> visit = [&](std::size_t next) {
    if (next == n) {
      if (current.empty() || !spanning_k_truss(g, current, k)) return;
      const double score = mean_relevance(rel, current);
      bool better = !best.found || score > best.score + 1e-12;
      if (!better && std::abs(score - best.score) <= 1e-12) {
        if (current.size() != best.nodes.size()) better = current.size() > best.nodes.size();
        else better = current < best.nodes;
      }
      if (better) {
        best.nodes = current;
        best.score = score;
        best.found = true;
      }
      return;
    }
    current.push_back(static_cast<NodeIndex>(next));
    visit(next + 1);
    current.pop_back();
    visit(next + 1);
  };
  visit(0);
  return best;
}

std::vector<std::size_t> greedy_pack(const std::vector<trussrag::CandidateReport>& c,
                                     std::size_t budget) {
  std::vector<std::size_t> order(c.size());
  std::iota(order.begin(), order.end(), 0);
  // Insertion sort by the stated key, to stay independent of std::sort.
  auto before = [&](std::size_t a, std::size_t b) {
    if (c[a].relevance != c[b].relevance) return c[a].relevance > c[b].relevance;
    if (c[a].k != c[b].k) return c[a].k < c[b].k;
    return c[a].community.nodes < c[b].community.nodes;
  };
  for (std::size_t i = 1; i < order.size(); ++i)
    for (std::size_t j = i; j > 0 && before(order[j], order[j - 1]); --j) std::swap(order[j], order[j - 1]);
  std::vector<std::size_t> out;
  std::size_t left = budget;
  for (auto i : order)
    if (c[i].report_tokens <= left) {
      out.push_back(i);
      left -= c[i].report_tokens;
    }
  return out;
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += double(a[i]) * b[i];
    na += double(a[i]) * a[i];
    nb += double(b[i]) * b[i];
  }
  if (na == 0 || nb == 0) return 0;
  return dot / std::sqrt(na * nb);
}

std::vector<std::vector<NodeIndex>> knn(const AttributedGraph& g, std::size_t k) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<NodeIndex>> out(n);
  for (NodeIndex u = 0; u < n; ++u) {
    std::vector<std::pair<double, NodeIndex>> all;
    for (NodeIndex v = 0; v < n; ++v) {
      if (v == u) continue;
      const auto& a = g.node(u).embedding;
      const auto& b = g.node(v).embedding;
      all.emplace_back(-cosine(a, b), v);
    }
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < std::min(k, all.size()); ++i) out[u].push_back(all[i].second);
  }
  return out;
}

bool has_clique(const AttributedGraph& g, int size) {
  if (size <= 0) return true;
  const auto a = adjacency(g);
  const std::size_t n = g.node_count();
  std::vector<std::size_t> chosen;
  std::function<bool(std::size_t)> extend = [&](std::size_t from) {
    if (static_cast<int>(chosen.size()) == size) return true;
    for (std::size_t v = from; v < n; ++v) {
      bool ok = true;
      for (auto c : chosen) ok = ok && a[c][v];
      if (!ok) continue;
      chosen.push_back(v);
      if (extend(v + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  return extend(0);
}

}  // namespace oracle
