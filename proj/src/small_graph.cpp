#include "trussrag/small_graph.hpp"

#include <array>

#include "trussrag/error.hpp"

namespace trussrag {

SmallGraph::SmallGraph(const AttributedGraph& g) {
  if (g.node_count() > kMaxNodes) throw CapExceeded(g.node_count(), kMaxNodes);
  adj_.assign(g.node_count(), 0);
  for (const Edge& e : g.edges()) {
    adj_[e.u] |= Mask{1} << e.v;
    adj_[e.v] |= Mask{1} << e.u;
  }
}

bool SmallGraph::spanning_k_truss(Mask s, int k) const {
  if (s == 0) return false;
  if (std::has_single_bit(s)) return k <= 2;
  if (k >= 3 && std::popcount(s) < k) return false;

  std::array<Mask, kMaxNodes> nb{};
  for (Mask rest = s; rest; rest &= rest - 1) {
    int v = std::countr_zero(rest);
    nb[v] = adj_[v] & s;
  }
  if (k >= 3) {
    const int need = k - 2;
    bool changed = true;
    while (changed) {
      changed = false;
      for (Mask rest = s; rest; rest &= rest - 1) {
        int u = std::countr_zero(rest);
        for (Mask hi = nb[u] & ~((Mask{2} << u) - 1); hi; hi &= hi - 1) {
          int w = std::countr_zero(hi);
          if (std::popcount(nb[u] & nb[w]) < need) {
            nb[u] &= ~(Mask{1} << w);
            nb[w] &= ~(Mask{1} << u);
            changed = true;
          }
        }
      }
    }
  }
  const int start = std::countr_zero(s);
  Mask seen = Mask{1} << start;
  Mask frontier = seen;
  while (frontier) {
    Mask next = 0;
    for (Mask rest = frontier; rest; rest &= rest - 1) next |= nb[std::countr_zero(rest)];
    next &= ~seen;
    seen |= next;
    frontier = next;
  }
  return seen == s;
}

NodeSet SmallGraph::to_nodes(Mask s) {
  NodeSet out;
  for (; s; s &= s - 1) out.push_back(static_cast<NodeIndex>(std::countr_zero(s)));
  return out;
}

}  // namespace trussrag
