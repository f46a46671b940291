#include "fixtures.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "trussrag/text.hpp"

namespace fixture {

std::vector<float> basis(std::size_t dim, std::size_t axis) {
  std::vector<float> v(dim, 0.0f);
  v.at(axis) = 1.0f;
  return v;
}

std::vector<Edge> clique_edges(std::size_t n, std::size_t offset) {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      out.push_back({static_cast<trussrag::NodeIndex>(offset + i), static_cast<trussrag::NodeIndex>(offset + j)});
  return out;
}

AttributedGraph plain(std::size_t n, const std::vector<Edge>& edges) {
  return trussrag::make_plain_graph(n, edges);
}

AttributedGraph attributed(std::size_t n, const std::vector<Edge>& edges,
                           const std::vector<std::vector<float>>& embeddings) {
  return trussrag::make_plain_graph(n, edges, embeddings);
}

AttributedGraph k4_with_orthogonal_node() {
  return attributed(4, clique_edges(4), {basis(2, 0), basis(2, 0), basis(2, 0), basis(2, 1)});
}

trussrag::QueryEmbedding e1_query(std::size_t dim) { return {basis(dim, 0), "e1"}; }

AttributedGraph octahedron() {
  // Opposite pairs (0,1), (2,3), (4,5) are the only non-edges.
  std::vector<Edge> edges;
  for (trussrag::NodeIndex i = 0; i < 6; ++i)
    for (trussrag::NodeIndex j = i + 1; j < 6; ++j)
      if (!(i % 2 == 0 && j == i + 1)) edges.push_back({i, j});
  return plain(6, edges);
}

std::string source_dir() { return TRUSSRAG_SOURCE_DIR; }
std::string toy_corpus_dir() { return source_dir() + "/data/toy_corpus"; }
std::string toy_config_path() { return source_dir() + "/data/toy.conf"; }

trussrag::Config toy_config(int workers) {
  trussrag::Config c;
  trussrag::apply_config_file(c, toy_config_path());
  c.workers = workers;
  c.max_parallel = workers;
  return c;
}

trussrag::LayeredIndex build_toy_index(const trussrag::Config& config) {
  return trussrag::build_index(trussrag::load_corpus(toy_corpus_dir()), config,
                               trussrag::make_providers(config));
}

bool matches_golden(const std::string& name, const std::string& actual) {
  const std::string path = source_dir() + "/tests/golden/" + name;
  if (std::getenv("TRUSSRAG_UPDATE_GOLDEN")) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream(path, std::ios::binary) << actual;
    return true;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "missing golden file " << path << " (set TRUSSRAG_UPDATE_GOLDEN=1 to create)\n";
    return false;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (buf.str() == actual) return true;
  std::cerr << "golden mismatch: " << path << "\n";
  return false;
}

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("trussrag_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

namespace {

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

}  // namespace

CommandResult run_command(const std::string& binary, const std::vector<std::string>& args,
                          const std::string& env) {
  const auto err_path = temp_path("command_stderr.txt");
  std::string cmd = env.empty() ? "" : env + " ";
  cmd += quote(binary);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>" + quote(err_path);
  CommandResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = trussrag::read_file(err_path);
  return r;
}

}  // namespace fixture
