#pragma once

// Bitmask graph for exhaustive oracles on tiny inputs (n <= 31).

#include <bit>
#include <cstdint>
#include <vector>

#include "trussrag/graph.hpp"

namespace trussrag {

class SmallGraph {
 public:
  using Mask = std::uint32_t;
  static constexpr std::size_t kMaxNodes = 31;

  explicit SmallGraph(const AttributedGraph& g);

  std::size_t size() const noexcept { return adj_.size(); }
  Mask all() const noexcept { return size() == 0 ? 0 : (Mask{1} << size()) - 1; }

  // G[s] contains a connected k-truss spanning all of s.
  bool spanning_k_truss(Mask s, int k) const;

  static NodeSet to_nodes(Mask s);

 private:
  std::vector<Mask> adj_;
};

}  // namespace trussrag
