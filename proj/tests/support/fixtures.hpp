#pragma once

#include <string>
#include <vector>

#include "trussrag/eacs.hpp"
#include "trussrag/graph.hpp"
#include "trussrag/index.hpp"

namespace fixture {

using trussrag::AttributedGraph;
using trussrag::Edge;

// Unit basis vector e_axis of dimension dim.
std::vector<float> basis(std::size_t dim, std::size_t axis);

std::vector<Edge> clique_edges(std::size_t n, std::size_t offset = 0);

AttributedGraph plain(std::size_t n, const std::vector<Edge>& edges);
AttributedGraph attributed(std::size_t n, const std::vector<Edge>& edges,
                           const std::vector<std::vector<float>>& embeddings);

// K4 where nodes 0..2 carry e1 and node 3 carries e2; query e1.
AttributedGraph k4_with_orthogonal_node();
trussrag::QueryEmbedding e1_query(std::size_t dim = 2);

// The octahedron K_{2,2,2}: a 4-truss without a K4.
AttributedGraph octahedron();

std::string source_dir();
std::string toy_corpus_dir();
std::string toy_config_path();

// Defaults plus data/toy.conf, deterministic providers.
trussrag::Config toy_config(int workers = 16);
trussrag::LayeredIndex build_toy_index(const trussrag::Config& config);
inline const char* kToyQuestion = "Who maintains the Calder tidal turbines and what happened during the storm?";

// Compares `actual` with tests/golden/<name>. With TRUSSRAG_UPDATE_GOLDEN set
// the file is rewritten instead and the check passes.
bool matches_golden(const std::string& name, const std::string& actual);

std::string temp_path(const std::string& name);

struct CommandResult {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs `binary args...` through the shell with optional "NAME=value" env
// prefixes, capturing stdout, stderr and the exit code.
CommandResult run_command(const std::string& binary, const std::vector<std::string>& args,
                          const std::string& env = "");

}  // namespace fixture
