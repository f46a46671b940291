#include "trussrag/eacs.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <optional>

#include "trussrag/error.hpp"
#include "trussrag/kernels.hpp"
#include "trussrag/small_graph.hpp"

namespace trussrag {

const char* layer_name(Layer layer) {
  switch (layer) {
    case Layer::chunk: return "chunk";
    case Layer::kg: return "kg";
    case Layer::sim: return "sim";
  }
  return "?";
}

std::vector<double> query_relevance(const AttributedGraph& g, const QueryEmbedding& q) {
  if (g.node_count() > 0 && g.dimension() == 0) throw InvalidInput("graph carries no embeddings");
  if (g.node_count() > 0 && q.vector.size() != g.dimension())
    throw InvalidInput("query dimension " + std::to_string(q.vector.size()) +
                       " does not match graph dimension " + std::to_string(g.dimension()));
  return cosine_relevance(g, q.vector);
}

double qr_score(std::span<const double> relevance, std::span<const NodeIndex> s) {
  if (s.empty()) throw InvalidInput("QRScore of an empty node set");
  double sum = 0.0;
  for (NodeIndex v : s) sum += relevance[v];
  return sum / static_cast<double>(s.size());
}

double qr_score(const AttributedGraph& g, std::span<const NodeIndex> s, const QueryEmbedding& q) {
  if (s.empty()) throw InvalidInput("QRScore of an empty node set");
  if (g.dimension() == 0) throw InvalidInput("graph carries no embeddings");
  double sum = 0.0;
  for (NodeIndex v : s) sum += cosine(g.embedding(v), q.vector);
  return sum / static_cast<double>(s.size());
}

namespace {

// Mutable peeling state for one T_k component. Edge supports count triangles
// whose three edges are all in T_k and inside the current node set.
class ComponentPeeler {
 public:
  ComponentPeeler(const AttributedGraph& g, const std::vector<char>& in_tk,
                  std::span<const double> relevance, int k)
      : g_(g), in_tk_(in_tk), rel_(relevance), k_(k),
        member_(g.node_count(), 0), sup_(g.edge_count(), 0), mark_(g.node_count(), 0) {}

  PeelTrace run(const NodeSet& component) {
    PeelTrace trace;
    trace.initial = component;
    for (NodeIndex v : component) member_[v] = 1;
    members_left_ = component.size();
    init_supports(component);

    NodeSet current = component;
    trace.initial_score = qr_score(rel_, current);
    double score = trace.initial_score;

    std::vector<NodeIndex> order = component;
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeIndex a, NodeIndex b) { return rel_[a] < rel_[b]; });

    bool updated = true;
    while (updated) {
      updated = false;
      const double sum = score * static_cast<double>(current.size());
      const double remaining = static_cast<double>(current.size() - 1);
      for (NodeIndex v : order) {
        if (!member_[v]) continue;
        // Monotone in rel_[v]; nothing later in the order can improve either.
        if (!((sum - rel_[v]) / remaining > score)) break;
        if (!removal_keeps_truss(v)) continue;
        NodeSet next;
        next.reserve(current.size() - 1);
        for (NodeIndex w : current)
          if (w != v) next.push_back(w);
        const double next_score = qr_score(rel_, next);
        if (!(next_score > score)) continue;
        remove(v);
        current = std::move(next);
        score = next_score;
        trace.removed.push_back(v);
        trace.score_after.push_back(score);
        updated = true;
        break;
      }
    }
    for (NodeIndex v : component) member_[v] = 0;
    trace.final_nodes = std::move(current);
    trace.final_score = score;
    return trace;
  }

 private:
  bool live(EdgeId e, NodeIndex other) const { return in_tk_[e] && member_[other]; }

  // Calls fn(edge a-w) for each triangle (v, a, w) with a < w inside the
  // current T_k node set.
  template <typename Fn>
  void for_each_opposite_edge(NodeIndex v, Fn&& fn) {
    auto nv = g_.neighbors(v);
    auto ev = g_.incident_edges(v);
    for (std::size_t i = 0; i < nv.size(); ++i)
      if (live(ev[i], nv[i])) mark_[nv[i]] = 1;
    for (std::size_t i = 0; i < nv.size(); ++i) {
      const NodeIndex a = nv[i];
      if (!mark_[a]) continue;
      auto na = g_.neighbors(a);
      auto ea = g_.incident_edges(a);
      for (std::size_t j = 0; j < na.size(); ++j) {
        const NodeIndex w = na[j];
        if (w > a && mark_[w] && live(ea[j], w)) fn(ea[j]);
      }
    }
    for (NodeIndex a : nv) mark_[a] = 0;
  }

  void init_supports(const NodeSet& component) {
    for (NodeIndex u : component) {
      auto nu = g_.neighbors(u);
      auto eu = g_.incident_edges(u);
      for (std::size_t i = 0; i < nu.size(); ++i) {
        const NodeIndex w = nu[i];
        if (w <= u || !live(eu[i], w)) continue;
        auto nw = g_.neighbors(w);
        auto ew = g_.incident_edges(w);
        std::uint32_t count = 0;
        std::size_t a = 0, b = 0;
        while (a < nu.size() && b < nw.size()) {
          if (nu[a] < nw[b]) { ++a; continue; }
          if (nu[a] > nw[b]) { ++b; continue; }
          if (live(eu[a], nu[a]) && live(ew[b], nw[b])) ++count;
          ++a;
          ++b;
        }
        sup_[eu[i]] = count;
      }
    }
  }

  bool removal_keeps_truss(NodeIndex v) {
    const std::uint32_t need = static_cast<std::uint32_t>(k_ - 2);
    bool ok = true;
    for_each_opposite_edge(v, [&](EdgeId e) {
      if (sup_[e] < need + 1) ok = false;
    });
    if (!ok) return false;

    // Connectivity of the rest through T_k edges.
    member_[v] = 0;
    NodeIndex start = v;
    std::size_t total = 0;
    for (NodeIndex w : g_.neighbors(v))
      if (member_[w]) { start = w; break; }
    std::vector<NodeIndex> stack;
    std::vector<NodeIndex> seen;
    if (start != v) {
      stack.push_back(start);
      mark_[start] = 1;
      seen.push_back(start);
      while (!stack.empty()) {
        NodeIndex x = stack.back();
        stack.pop_back();
        ++total;
        auto nx = g_.neighbors(x);
        auto ex = g_.incident_edges(x);
        for (std::size_t i = 0; i < nx.size(); ++i) {
          NodeIndex y = nx[i];
          if (!mark_[y] && live(ex[i], y)) {
            mark_[y] = 1;
            seen.push_back(y);
            stack.push_back(y);
          }
        }
      }
    }
    for (NodeIndex x : seen) mark_[x] = 0;
    member_[v] = 1;
    const std::size_t expected = members_left_ - 1;
    return total == expected && expected >= 2;
  }

  void remove(NodeIndex v) {
    for_each_opposite_edge(v, [&](EdgeId e) { --sup_[e]; });
    member_[v] = 0;
    --members_left_;
  }

  const AttributedGraph& g_;
  const std::vector<char>& in_tk_;
  std::span<const double> rel_;
  int k_;
  std::vector<char> member_;
  std::vector<std::uint32_t> sup_;
  std::vector<char> mark_;
  std::size_t members_left_ = 0;
};

}  // namespace

PeelResult q_peel_traced(const AttributedGraph& g, std::span<const double> relevance, int k,
                         const TrussIndex* truss) {
  if (k < 3) throw InvalidInput("q_peel requires k >= 3");
  if (relevance.size() != g.node_count()) throw InvalidInput("relevance size does not match graph");
  std::optional<TrussIndex> local;
  if (!truss) truss = &local.emplace(truss_decomposition(g));

  std::vector<EdgeId> tk = truss->edges_at_least(k);
  if (tk.empty()) throw EmptyTruss(k);
  std::vector<char> in_tk(g.edge_count(), 0);
  for (EdgeId e : tk) in_tk[e] = 1;

  PeelResult result;
  result.best.k = k;
  ComponentPeeler peeler(g, in_tk, relevance, k);
  for (const NodeSet& component : edge_components(g, tk)) {
    PeelTrace trace = peeler.run(component);
    if (result.best.score < trace.final_score) {
      result.best.nodes = trace.final_nodes;
      result.best.score = trace.final_score;
    }
    result.components.push_back(std::move(trace));
  }
  return result;
}

Community q_peel(const AttributedGraph& g, const QueryEmbedding& q, int k) {
  auto rel = query_relevance(g, q);
  return q_peel_traced(g, rel, k).best;
}

Community brute_force_eacs(const AttributedGraph& g, std::span<const double> relevance, int k,
                           std::size_t cap) {
  if (g.node_count() > std::min(cap, SmallGraph::kMaxNodes))
    throw CapExceeded(g.node_count(), std::min(cap, SmallGraph::kMaxNodes));
  if (relevance.size() != g.node_count()) throw InvalidInput("relevance size does not match graph");
  const SmallGraph sg(g);
  std::optional<NodeSet> best;
  double best_score = 0.0;
  for (SmallGraph::Mask s = 1; s <= sg.all() && s != 0; ++s) {
    if (!sg.spanning_k_truss(s, k)) continue;
    NodeSet nodes = SmallGraph::to_nodes(s);
    const double score = qr_score(relevance, nodes);
    bool take = false;
    if (!best || score > best_score + kScoreTieTolerance) {
      take = true;
    } else if (std::abs(score - best_score) <= kScoreTieTolerance) {
      if (nodes.size() != best->size()) take = nodes.size() > best->size();
      else take = nodes < *best;
    }
    if (take) {
      best = std::move(nodes);
      best_score = score;
    }
  }
  if (!best) throw EmptyTruss(k);
  return Community{std::move(*best), k, best_score, Layer::kg};
}

Community brute_force_eacs(const AttributedGraph& g, const QueryEmbedding& q, int k,
                           std::size_t cap) {
  auto rel = query_relevance(g, q);
  return brute_force_eacs(g, rel, k, cap);
}

int infer_k_max(const AttributedGraph& g, int cap) {
  const auto top = static_cast<int>(truss_decomposition(g).max_truss());
  return std::max(2, std::min(cap, top));
}

std::vector<Community> generate_candidates(const AttributedGraph& g,
                                           std::span<const double> relevance, int k_max) {
  std::vector<Community> out;
  if (k_max < 3) return out;
  const TrussIndex truss = truss_decomposition(g);
  const int levels = k_max - 2;
  std::vector<std::optional<Community>> slots(static_cast<std::size_t>(levels));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < levels; ++i) {
    try {
      slots[i] = q_peel_traced(g, relevance, i + 3, &truss).best;
    } catch (const EmptyTruss&) {
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  for (auto& slot : slots) {
    if (!slot) continue;
    auto dup = std::find_if(out.begin(), out.end(),
                            [&](const Community& c) { return c.nodes == slot->nodes; });
    if (dup != out.end()) {
      *dup = std::move(*slot);
    } else {
      out.push_back(std::move(*slot));
    }
  }
  return out;
}

std::vector<Community> generate_candidates(const AttributedGraph& g, const QueryEmbedding& q,
                                           int k_max) {
  auto rel = query_relevance(g, q);
  return generate_candidates(g, rel, k_max);
}

std::vector<CandidateReport> adaptive_k_select(std::vector<CandidateReport> candidates,
                                               std::size_t budget) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const CandidateReport& a, const CandidateReport& b) {
                     if (a.relevance != b.relevance) return a.relevance > b.relevance;
                     if (a.k != b.k) return a.k < b.k;
                     return a.community.nodes < b.community.nodes;
                   });
  std::vector<CandidateReport> selected;
  std::size_t remaining = budget;
  for (auto& c : candidates) {
    if (c.report_tokens > remaining) continue;
    remaining -= c.report_tokens;
    selected.push_back(std::move(c));
  }
  return selected;
}

}  // namespace trussrag
