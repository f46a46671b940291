#pragma once

// Slow, definition-level reimplementations used only to check the library.
// None of these call into the library's algorithms; they only read graphs.

#include <cstdint>
#include <limits>
#include <vector>

#include "trussrag/eacs.hpp"
#include "trussrag/graph.hpp"

namespace oracle {

using trussrag::AttributedGraph;
using trussrag::NodeIndex;
using trussrag::NodeSet;

// Adjacency matrix view.
std::vector<std::vector<char>> adjacency(const AttributedGraph& g);

// Triangles through edge (u, v): common neighbours by a full scan.
std::size_t support(const AttributedGraph& g, NodeIndex u, NodeIndex v);

// Truss number per edge (EdgeId order): for k = 3, 4, ... delete edges with
// fewer than k-2 triangles among surviving edges until nothing changes.
std::vector<int> truss_numbers(const AttributedGraph& g);

// Edges (EdgeId) of the maximal k-truss by iterative deletion.
std::vector<std::uint32_t> k_truss_edges(const AttributedGraph& g, int k);

// Components by union-find, each sorted, ordered by smallest node.
std::vector<NodeSet> components(const AttributedGraph& g);

// BFS distance matrix; -1 for unreachable.
std::vector<std::vector<int>> all_pairs_distances(const AttributedGraph& g);

// The maximal k-truss of G[s] covers s and is connected.
bool spanning_k_truss(const AttributedGraph& g, const NodeSet& s, int k);

// G[s] is connected and every induced edge has >= k-2 induced triangles.
bool induced_k_truss(const AttributedGraph& g, const NodeSet& s, int k);

double mean_relevance(const std::vector<double>& rel, const NodeSet& s);

struct Optimum {
  NodeSet nodes;
  double score = -std::numeric_limits<double>::infinity();
  bool found = false;
};

// Subset enumeration by recursion: best score, then more nodes, then
// lexicographically smaller node list.
Optimum brute_force(const AttributedGraph& g, const std::vector<double>& rel, int k);

// Greedy packing re-derived from its description.
std::vector<std::size_t> greedy_pack(const std::vector<trussrag::CandidateReport>& candidates,
                                     std::size_t budget);

// Top-k nearest by cosine computed with a full sort per node.
std::vector<std::vector<NodeIndex>> knn(const AttributedGraph& g, std::size_t k);

// Does g contain a clique on `size` nodes (recursive extension).
bool has_clique(const AttributedGraph& g, int size);

double cosine(const std::vector<float>& a, const std::vector<float>& b);

}  // namespace oracle
