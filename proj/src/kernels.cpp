#include "trussrag/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace trussrag {

double cosine(std::span<const float> a, std::span<const float> b) {
  const std::size_t n = std::min(a.size(), b.size());
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::uint32_t> edge_supports(const AttributedGraph& g) {
  const auto edges = g.edges();
  const auto m = static_cast<std::int64_t>(edges.size());
  std::vector<std::uint32_t> support(edges.size(), 0);
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t e = 0; e < m; ++e) {
    auto a = g.neighbors(edges[e].u);
    auto b = g.neighbors(edges[e].v);
    std::uint32_t count = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] < b[j]) {
        ++i;
      } else if (a[i] > b[j]) {
        ++j;
      } else {
        ++count;
        ++i;
        ++j;
      }
    }
    support[e] = count;
  }
  return support;
}

std::vector<std::uint32_t> edge_supports_serial(const AttributedGraph& g) {
  std::vector<std::uint32_t> support(g.edge_count(), 0);
  const std::size_t n = g.node_count();
  // Mark the higher neighbors of u with their edge ids, then scan each
  // higher neighbor's higher neighbors: every triangle u < v < w once.
  std::vector<EdgeId> mark(n, static_cast<EdgeId>(-1));
  for (NodeIndex u = 0; u < n; ++u) {
    auto nu = g.neighbors(u);
    auto eu = g.incident_edges(u);
    for (std::size_t i = 0; i < nu.size(); ++i)
      if (nu[i] > u) mark[nu[i]] = eu[i];
    for (std::size_t i = 0; i < nu.size(); ++i) {
      NodeIndex v = nu[i];
      if (v <= u) continue;
      auto nv = g.neighbors(v);
      auto ev = g.incident_edges(v);
      for (std::size_t j = 0; j < nv.size(); ++j) {
        NodeIndex w = nv[j];
        if (w <= v || mark[w] == static_cast<EdgeId>(-1)) continue;
        ++support[eu[i]];
        ++support[ev[j]];
        ++support[mark[w]];
      }
    }
    for (NodeIndex v : nu) mark[v] = static_cast<EdgeId>(-1);
  }
  return support;
}

std::vector<double> cosine_relevance(const AttributedGraph& g, std::span<const float> q) {
  const auto n = static_cast<std::int64_t>(g.node_count());
  std::vector<double> rel(g.node_count(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t v = 0; v < n; ++v) rel[v] = cosine(g.embedding(static_cast<NodeIndex>(v)), q);
  return rel;
}

std::vector<double> cosine_relevance_serial(const AttributedGraph& g, std::span<const float> q) {
  std::vector<double> rel;
  rel.reserve(g.node_count());
  for (const NodeRecord& r : g.nodes()) rel.push_back(cosine(r.embedding, q));
  return rel;
}

namespace {

// Best-first with index tie-break.
bool better(const std::pair<double, NodeIndex>& a, const std::pair<double, NodeIndex>& b) {
  if (a.first != b.first) return a.first > b.first;
  return a.second < b.second;
}

}  // namespace

std::vector<std::vector<NodeIndex>> knn_top_k(const AttributedGraph& g, std::size_t k) {
  const auto n = static_cast<std::int64_t>(g.node_count());
  std::vector<std::vector<NodeIndex>> out(g.node_count());
  if (k == 0) return out;
#pragma omp parallel
  {
    std::vector<std::pair<double, NodeIndex>> heap;
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t u = 0; u < n; ++u) {
      heap.clear();
      auto eu = g.embedding(static_cast<NodeIndex>(u));
      // Max-heap under `better` keeps the worst retained candidate on top.
      for (NodeIndex v = 0; v < static_cast<NodeIndex>(n); ++v) {
        if (v == u) continue;
        std::pair<double, NodeIndex> cand{cosine(eu, g.embedding(v)), v};
        if (heap.size() < k) {
          heap.push_back(cand);
          std::push_heap(heap.begin(), heap.end(), better);
        } else if (better(cand, heap.front())) {
          std::pop_heap(heap.begin(), heap.end(), better);
          heap.back() = cand;
          std::push_heap(heap.begin(), heap.end(), better);
        }
      }
      std::sort(heap.begin(), heap.end(), better);
      auto& row = out[u];
      row.reserve(heap.size());
      for (const auto& [sim, v] : heap) row.push_back(v);
    }
  }
  return out;
}

std::vector<std::vector<NodeIndex>> knn_top_k_serial(const AttributedGraph& g, std::size_t k) {
  const std::size_t n = g.node_count();
  std::vector<double> sim(n * n, 0.0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      sim[u * n + v] = sim[v * n + u] =
          cosine(g.embedding(static_cast<NodeIndex>(u)), g.embedding(static_cast<NodeIndex>(v)));
  std::vector<std::vector<NodeIndex>> out(n);
  for (std::size_t u = 0; u < n; ++u) {
    std::vector<std::pair<double, NodeIndex>> row;
    for (std::size_t v = 0; v < n; ++v)
      if (v != u) row.emplace_back(sim[u * n + v], static_cast<NodeIndex>(v));
    std::sort(row.begin(), row.end(), better);
    for (std::size_t i = 0; i < std::min(k, row.size()); ++i) out[u].push_back(row[i].second);
  }
  return out;
}

int kernel_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_kernel_threads(int threads) {
#ifdef _OPENMP
  omp_set_num_threads(std::max(1, threads));
#else
  (void)threads;
#endif
}

}  // namespace trussrag
