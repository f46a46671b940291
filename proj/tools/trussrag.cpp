// Command-line entry point: index build, query, verify, bench, config.
// Exit codes: 0 success, 2 usage/input error, 3 provider/runtime error.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "trussrag/error.hpp"
#include "trussrag/index.hpp"
#include "trussrag/kernels.hpp"
#include "trussrag/retrieval.hpp"
#include "trussrag/verification.hpp"

using namespace trussrag;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

struct Flags {
  std::string config_file;
  std::vector<std::string> settings;  // key=value overrides
  bool verbose = false;
  std::string mode;
  int workers = 0;
};

// defaults <- file <- env <- flags
Config resolve_config(const Flags& f, const std::map<std::string, std::string>& index_settings = {}) {
  Config c;
  for (const auto& [k, v] : index_settings) apply_setting(c, k, v);
  if (!f.config_file.empty()) apply_config_file(c, f.config_file);
  apply_env(c, process_env());
  for (const auto& kv : f.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidInput("--set expects key=value, got '" + kv + "'");
    apply_setting(c, std::string(trim(kv.substr(0, eq))), kv.substr(eq + 1));
  }
  if (!f.mode.empty()) apply_setting(c, "provider", f.mode);
  if (f.workers > 0) c.workers = f.workers;
  validate(c);
  return c;
}

void log_config(const Flags& f, const Config& c) {
  if (f.verbose) std::cerr << "resolved config:\n" << describe_text(c);
}

std::string fmt_seconds(double s) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << s << "s";
  return out.str();
}

int cmd_index_build(const Flags& f, const std::string& corpus, const std::string& out) {
  const Config c = resolve_config(f);
  log_config(f, c);
  const auto docs = load_corpus(corpus);
  const Providers providers = make_providers(c);
  BuildStats stats;
  const auto t0 = std::chrono::steady_clock::now();
  const LayeredIndex idx = build_index(docs, c, providers, &stats);
  save_index(idx, out);
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "documents: " << docs.size() << "\n"
            << "chunk layer: " << idx.chunk_layer.node_count() << " nodes, "
            << idx.chunk_layer.edge_count() << " edges\n"
            << "kg layer: " << idx.kg_layer.node_count() << " nodes, " << idx.kg_layer.edge_count()
            << " edges\n"
            << "similarity layer: " << idx.sim_layer.node_count() << " nodes, "
            << idx.sim_layer.edge_count() << " edges\n"
            << "timings: chunk " << fmt_seconds(stats.chunk_seconds) << ", extract "
            << fmt_seconds(stats.extract_seconds) << ", merge " << fmt_seconds(stats.merge_seconds)
            << ", layers " << fmt_seconds(stats.layer_seconds) << ", total " << fmt_seconds(total)
            << "\n"
            << "content hash: " << content_hash(idx) << "\n"
            << "written: " << out << "\n";
  return 0;
}

int cmd_query(const Flags& f, const std::string& index_path, const std::string& question,
              std::optional<int> budget, const std::string& k_max, bool as_json) {
  const LayeredIndex idx = load_index(index_path);
  Config c = resolve_config(f, idx.config);
  if (budget) apply_setting(c, "context_budget", std::to_string(*budget));
  if (!k_max.empty()) apply_setting(c, "k_max", k_max);
  validate(c);
  log_config(f, c);
  const Providers providers = make_providers(c);
  const RetrievalResult r = retrieve(idx, question, providers, retrieval_options(c));
  if (as_json) std::cout << result_json(r);
  else std::cout << r.answer << (r.answer.empty() || r.answer.back() == '\n' ? "" : "\n");
  return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, std::size_t trials) {
  const SuiteReport rep = run_verification_suite(suite, seed, trials);
  nlohmann::json j;
  j["suite"] = rep.name;
  j["seed"] = seed;
  j["instances"] = rep.instances;
  j["failures"] = rep.failures;
  j["worst"] = rep.worst;
  j["notes"] = rep.notes;
  j["passed"] = rep.failures == 0;
  std::cout << j.dump(2) << "\n";
  return rep.failures == 0 ? 0 : 1;
}

int cmd_bench(const std::vector<std::size_t>& sizes, std::uint64_t seed) {
  const ComplexityReport rep = complexity_probe(sizes, seed);
  std::cout << std::left << std::setw(10) << "n" << std::setw(12) << "edges" << "seconds\n";
  for (std::size_t i = 0; i < rep.sizes.size(); ++i)
    std::cout << std::setw(10) << rep.sizes[i] << std::setw(12) << rep.edges[i] << std::fixed
              << std::setprecision(6) << rep.seconds[i] << "\n";
  if (rep.slope) std::cout << "log-log slope: " << std::setprecision(3) << *rep.slope << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph retrieval over k-truss communities"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--config", flags.config_file, "Config file (key = value lines)");
  app.add_option("--set", flags.settings, "Override one setting, key=value (repeatable)");
  app.add_flag("-v,--verbose", flags.verbose, "Print the resolved config to stderr");

  auto* index = app.add_subcommand("index", "Index commands");
  index->require_subcommand(1);
  auto* build = index->add_subcommand("build", "Build an index from a corpus directory");
  std::string corpus, out;
  build->add_option("--corpus", corpus, "Directory of UTF-8 text files")->required();
  build->add_option("--out", out, "Index file to write")->required();
  build->add_option("--mode", flags.mode, "deterministic|remote")
      ->check(CLI::IsMember({"deterministic", "remote"}));
  build->add_option("--workers", flags.workers, "Extraction workers")->check(CLI::PositiveNumber);

  auto* query = app.add_subcommand("query", "Answer a question from an index");
  std::string index_path, question, k_max;
  std::optional<int> budget;
  bool as_json = false;
  query->add_option("--index", index_path, "Index file")->required();
  query->add_option("--question", question, "Question text")->required();
  query->add_option("--budget", budget, "Context budget in tokens (default 4800)")
      ->check(CLI::NonNegativeNumber);
  query->add_option("--k-max", k_max, "auto or an integer >= 3");
  query->add_option("--mode", flags.mode, "deterministic|remote")
      ->check(CLI::IsMember({"deterministic", "remote"}));
  query->add_flag("--json", as_json, "Print the full retrieval result as JSON");

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  std::string suite;
  std::uint64_t seed = 1;
  std::size_t trials = 0;
  verify->add_option("suite", suite, "bounds|oracle|freerider|reduction|complexity")->required();
  verify->add_option("--seed", seed, "Seed");
  verify->add_option("--trials", trials, "Instance count (0 = suite default)");

  auto* bench = app.add_subcommand("bench", "Time q_peel on synthetic graphs");
  std::vector<std::size_t> sizes{1000, 2000, 4000, 8000};
  std::uint64_t bench_seed = 1;
  bench->add_option("--sizes", sizes, "Node counts, ascending")->delimiter(',');
  bench->add_option("--seed", bench_seed, "Seed");

  auto* config = app.add_subcommand("config", "Print the resolved config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (build->parsed()) return cmd_index_build(flags, corpus, out);
    if (query->parsed()) return cmd_query(flags, index_path, question, budget, k_max, as_json);
    if (verify->parsed()) return cmd_verify(suite, seed, trials);
    if (bench->parsed()) return cmd_bench(sizes, bench_seed);
    if (config->parsed()) {
      std::cout << describe_text(resolve_config(flags));
      return 0;
    }
  } catch (const ProviderError& e) {
    std::cerr << "error: " << e.what() << " (attempts: " << e.attempts() << ")\n";
    return kExitRuntime;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NotFound& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const UnsupportedVersion& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitInput;
}
