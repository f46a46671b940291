#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "trussrag/graph.hpp"
#include "trussrag/truss.hpp"

namespace trussrag {

struct QueryEmbedding {
  std::vector<float> vector;  // unit-normalized, same dimension as the graph
  std::string text;
};

enum class Layer { chunk, kg, sim };

const char* layer_name(Layer layer);

// A retrieved node set. `k` is the truss level it satisfies (0 for the coarse
// fallback, which carries no structural guarantee).
struct Community {
  NodeSet nodes;
  int k = 0;
  double score = -std::numeric_limits<double>::infinity();
  Layer layer = Layer::kg;

  bool empty() const noexcept { return nodes.empty(); }
  bool operator==(const Community&) const = default;
};

struct CandidateReport {
  int k = 0;
  Community community;
  double relevance = 0.0;  // in [0, 1]
  std::string report;
  std::size_t report_tokens = 0;
};

// Mean cosine between node embeddings and the query. Throws InvalidInput on
// an empty set or a graph without embeddings.
double qr_score(const AttributedGraph& g, std::span<const NodeIndex> s, const QueryEmbedding& q);
// Same, over precomputed per-node relevance; summed in the order of `s`.
double qr_score(std::span<const double> relevance, std::span<const NodeIndex> s);

// Per-node cos(A(v), q), validated against the graph's dimension.
std::vector<double> query_relevance(const AttributedGraph& g, const QueryEmbedding& q);

// What happened to one connected component of T_k during peeling.
struct PeelTrace {
  NodeSet initial;
  double initial_score = 0.0;
  std::vector<NodeIndex> removed;     // in removal order
  std::vector<double> score_after;    // QRScore after each removal
  NodeSet final_nodes;
  double final_score = 0.0;
};

struct PeelResult {
  Community best;
  std::vector<PeelTrace> components;  // ordered by smallest node
};

// Query-aware peeling over the maximal k-truss (k >= 3). Throws EmptyTruss
// when the k-truss is empty. `truss` may be passed to reuse a decomposition
// of `g`.
Community q_peel(const AttributedGraph& g, const QueryEmbedding& q, int k);
PeelResult q_peel_traced(const AttributedGraph& g, std::span<const double> relevance, int k,
                         const TrussIndex* truss = nullptr);

// Exhaustive optimum over node subsets: max QRScore, then most nodes, then
// lexicographically smallest sorted node list. Score ties use absolute
// tolerance kScoreTieTolerance.
inline constexpr std::size_t kDefaultOracleCap = 14;
inline constexpr double kScoreTieTolerance = 1e-12;
Community brute_force_eacs(const AttributedGraph& g, const QueryEmbedding& q, int k,
                           std::size_t cap = kDefaultOracleCap);
Community brute_force_eacs(const AttributedGraph& g, std::span<const double> relevance, int k,
                           std::size_t cap = kDefaultOracleCap);

// Largest k <= cap with a nonempty maximal k-truss; 2 without triangles.
int infer_k_max(const AttributedGraph& g, int cap);

// One q_peel community per k in [3, k_max]; k values with an empty truss are
// skipped and identical node sets collapse onto the largest k. Ascending k.
std::vector<Community> generate_candidates(const AttributedGraph& g, const QueryEmbedding& q,
                                           int k_max);
std::vector<Community> generate_candidates(const AttributedGraph& g,
                                           std::span<const double> relevance, int k_max);

// Greedy packing: relevance descending (ties: smaller k, then node ids),
// taking each candidate that still fits the remaining budget.
std::vector<CandidateReport> adaptive_k_select(std::vector<CandidateReport> candidates,
                                               std::size_t budget);

}  // namespace trussrag
