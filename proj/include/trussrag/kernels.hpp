#pragma once

// Data-parallel kernels. Each OpenMP kernel has a serial reference that takes
// a different route to the same answer; tests hold them equal and the bench
// target times them against each other. Results never depend on the thread
// count.

#include <cstdint>
#include <span>
#include <vector>

#include "trussrag/graph.hpp"

namespace trussrag {

// Cosine similarity accumulated in double. Zero vectors give 0.
double cosine(std::span<const float> a, std::span<const float> b);

// Triangle count per edge, indexed by EdgeId. Parallel over edges, sorted
// adjacency intersection.
std::vector<std::uint32_t> edge_supports(const AttributedGraph& g);
// Node-iterator triangle listing, each triangle credited to its three edges.
std::vector<std::uint32_t> edge_supports_serial(const AttributedGraph& g);

// cos(A(v), q) for every node.
std::vector<double> cosine_relevance(const AttributedGraph& g, std::span<const float> q);
std::vector<double> cosine_relevance_serial(const AttributedGraph& g, std::span<const float> q);

// Top-k most cosine-similar other nodes per node, best first, ties broken by
// smaller node index. Parallel kernel keeps a bounded selection per row.
std::vector<std::vector<NodeIndex>> knn_top_k(const AttributedGraph& g, std::size_t k);
// Builds the full similarity matrix and sorts each row.
std::vector<std::vector<NodeIndex>> knn_top_k_serial(const AttributedGraph& g, std::size_t k);

// Number of OpenMP threads kernels will use (1 when built without OpenMP).
int kernel_threads();
void set_kernel_threads(int threads);

}  // namespace trussrag
