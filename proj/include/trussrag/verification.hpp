#pragma once

// Executable checks for the structural guarantees of connected k-trusses and
// EACS: density and diameter bounds, free-rider mitigation, the clique
// reduction, and an empirical scaling probe for q_peel.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "trussrag/eacs.hpp"
#include "trussrag/graph.hpp"

namespace trussrag {

inline constexpr double kBoundTolerance = 1e-12;

struct BoundCheck {
  bool holds = true;
  double value = 0.0;  // measured density or diameter
  double bound = 0.0;
};

// density(h) >= (k-1)/(|h|-1) - 1e-12, h being the community subgraph itself.
// Requires |h| >= 2.
BoundCheck density_bound(const AttributedGraph& h, int k);
bool check_density_bound(const AttributedGraph& h, int k);

// diameter(h) <= floor((2|h|-2)/k). Throws InvalidInput if h is disconnected.
BoundCheck diameter_bound(const AttributedGraph& h, int k);
bool check_diameter_bound(const AttributedGraph& h, int k);

struct FreeRiderReport {
  NodeSet optimum;
  double optimum_score = 0.0;
  std::size_t sampled = 0;     // supersets examined
  std::size_t testable = 0;    // of those, valid connected k-trusses
  std::size_t violations = 0;  // testable supersets scoring >= the optimum
  bool exhaustive = false;
  // Largest QRScore(superset) - QRScore(optimum) among testable supersets.
  std::optional<double> worst_margin;
};

// Samples `trials` node sets S outside the optimum (all of them when trials
// covers every subset) and checks QRScore(G[S ∪ V_h]) < QRScore(H) for each
// superset that is itself a connected k-truss.
FreeRiderReport check_free_rider(const AttributedGraph& g, const QueryEmbedding& q, int k,
                                 std::size_t trials, std::uint64_t seed = 1,
                                 std::size_t cap = kDefaultOracleCap);

struct ReductionInstance {
  AttributedGraph graph;  // every embedding is e1
  QueryEmbedding query;   // e1
  int k_t = 0;
  double delta = 1.0;
  int source_clique_size = 0;
};

// Copies the structure of `plain` and attaches the attribute vector e1 (of
// dimension `dim`) to every node.
ReductionInstance build_reduction_instance(const AttributedGraph& plain, int k_prime,
                                           std::size_t dim = 2);

// Exhaustive: is there a connected k_t-truss with QRScore >= delta?
bool eacs_decision(const ReductionInstance& inst, std::size_t cap = kDefaultOracleCap);

// Brute-force clique oracle.
bool clique_exists(const AttributedGraph& g, int size);

// Seeded generators shared by the suites and tests.
AttributedGraph random_graph(std::size_t n, double p, std::mt19937_64& rng,
                             std::size_t embedding_dim = 0);
std::vector<float> random_unit_vector(std::size_t dim, std::mt19937_64& rng);

// Planted-block graph with a constant expected average degree: blocks of 32
// nodes with intra-block edge probability 0.3, two bridge triangles chaining
// each block to the next, and two random cross edges per node; embeddings
// scatter around one centroid per block.
AttributedGraph synthetic_probe_graph(std::size_t n, std::uint64_t seed, std::size_t dim = 32);

struct ComplexityReport {
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> edges;
  std::vector<double> seconds;  // best of `repeats` runs
  std::optional<double> slope;  // least-squares slope of log(seconds) vs log(n)
};

ComplexityReport complexity_probe(const std::vector<std::size_t>& sizes, std::uint64_t seed,
                                  int k = 3, int repeats = 3);

// Least-squares slope of log(y) against log(x); nullopt for fewer than two points.
std::optional<double> log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

// One machine-readable record per suite run.
struct SuiteReport {
  std::string name;
  std::size_t instances = 0;
  std::size_t failures = 0;
  std::map<std::string, double> worst;
  std::vector<std::string> notes;
};

inline const std::vector<std::string>& verification_suites() {
  static const std::vector<std::string> names{"bounds", "oracle", "freerider", "reduction",
                                              "complexity"};
  return names;
}

// Throws InvalidInput for an unknown suite. `trials` of 0 picks the suite's
// default instance count.
SuiteReport run_verification_suite(const std::string& suite, std::uint64_t seed,
                                   std::size_t trials = 0);

}  // namespace trussrag
