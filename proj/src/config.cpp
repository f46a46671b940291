#include "trussrag/config.hpp"

#include <charconv>
#include <cstdlib>
#include <sstream>

#include "trussrag/error.hpp"
#include "trussrag/text.hpp"

namespace trussrag {

const char* to_string(ProviderMode mode) {
  return mode == ProviderMode::remote ? "remote" : "deterministic";
}

const char* to_string(ChunkerMode mode) { return mode == ChunkerMode::fixed ? "fixed" : "semantic"; }

namespace {

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw InvalidInput("setting '" + key + "' expects an integer, got '" + value + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  double out = 0;
  in >> out;
  if (!in || !in.eof()) throw InvalidInput("setting '" + key + "' expects a number, got '" + value + "'");
  return out;
}

std::string format_double(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

void apply_setting(Config& c, const std::string& key, const std::string& raw) {
  const std::string value(trim(raw));
  if (key == "chunker") {
    if (value == "semantic") c.chunker = ChunkerMode::semantic;
    else if (value == "fixed") c.chunker = ChunkerMode::fixed;
    else throw InvalidInput("chunker must be semantic or fixed, got '" + value + "'");
  } else if (key == "chunk_size") {
    c.chunk_size = parse_int(key, value);
  } else if (key == "chunk_overlap") {
    c.chunk_overlap = parse_int(key, value);
  } else if (key == "semantic_percentile") {
    c.semantic_percentile = parse_int(key, value);
  } else if (key == "min_chunk_tokens") {
    c.min_chunk_tokens = parse_int(key, value);
  } else if (key == "max_chunk_tokens") {
    c.max_chunk_tokens = parse_int(key, value);
  } else if (key == "k_neighbor") {
    c.k_neighbor = parse_int(key, value);
  } else if (key == "embedding_dim") {
    c.embedding_dim = parse_int(key, value);
  } else if (key == "max_gleaning") {
    c.max_gleaning = parse_int(key, value);
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "context_budget") {
    c.context_budget = parse_int(key, value);
  } else if (key == "community_report_budget") {
    c.community_report_budget = parse_int(key, value);
  } else if (key == "text_unit_budget") {
    c.text_unit_budget = parse_int(key, value);
  } else if (key == "k_max") {
    c.k_max = value == "auto" ? 0 : parse_int(key, value);
  } else if (key == "k_max_cap") {
    c.k_max_cap = parse_int(key, value);
  } else if (key == "fallback_top_m") {
    c.fallback_top_m = parse_int(key, value);
  } else if (key == "provider") {
    if (value == "deterministic") c.provider = ProviderMode::deterministic;
    else if (value == "remote") c.provider = ProviderMode::remote;
    else throw InvalidInput("provider must be deterministic or remote, got '" + value + "'");
  } else if (key == "api_base") {
    c.api_base = value;
  } else if (key == "language_model") {
    c.language_model = value;
  } else if (key == "embedding_model") {
    c.embedding_model = value;
  } else if (key == "temperature") {
    c.temperature = parse_double(key, value);
  } else if (key == "timeout_seconds") {
    c.timeout_seconds = parse_int(key, value);
  } else if (key == "max_retries") {
    c.max_retries = parse_int(key, value);
  } else if (key == "retry_base_ms") {
    c.retry_base_ms = parse_int(key, value);
  } else if (key == "max_parallel") {
    c.max_parallel = parse_int(key, value);
  } else if (key == "workers") {
    c.workers = parse_int(key, value);
  } else if (key == "api_key") {
    throw InvalidInput(std::string("api_key is read from ") + kApiKeyEnv + " only");
  } else {
    throw InvalidInput("unknown setting '" + key + "'");
  }
}

void apply_config_text(Config& config, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw InvalidInput("config line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(config, std::string(trim(body.substr(0, eq))), std::string(body.substr(eq + 1)));
  }
}

void apply_config_file(Config& config, const std::string& path) {
  apply_config_text(config, read_file(path));
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str()); v && *v) return std::string(v);
    return std::nullopt;
  };
}

void apply_env(Config& config, const EnvLookup& env) {
  if (auto key = env(kApiKeyEnv)) config.api_key = *key;
  if (auto base = env(kApiBaseEnv)) config.api_base = *base;
}

std::map<std::string, std::string> describe(const Config& c) {
  std::map<std::string, std::string> out = build_settings(c);
  out["context_budget"] = std::to_string(c.context_budget);
  out["community_report_budget"] = std::to_string(c.community_report_budget);
  out["text_unit_budget"] = std::to_string(c.text_unit_budget);
  out["k_max"] = c.k_max == 0 ? "auto" : std::to_string(c.k_max);
  out["k_max_cap"] = std::to_string(c.k_max_cap);
  out["fallback_top_m"] = std::to_string(c.fallback_top_m);
  out["api_base"] = c.api_base;
  out["api_key"] = c.api_key.empty() ? "" : "<redacted>";
  out["temperature"] = format_double(c.temperature);
  out["timeout_seconds"] = std::to_string(c.timeout_seconds);
  out["max_retries"] = std::to_string(c.max_retries);
  out["retry_base_ms"] = std::to_string(c.retry_base_ms);
  out["max_parallel"] = std::to_string(c.max_parallel);
  out["workers"] = std::to_string(c.workers);
  return out;
}

std::string describe_text(const Config& config) {
  std::string out;
  for (const auto& [k, v] : describe(config)) out += k + " = " + v + "\n";
  return out;
}

std::map<std::string, std::string> build_settings(const Config& c) {
  return {
      {"chunker", to_string(c.chunker)},
      {"chunk_size", std::to_string(c.chunk_size)},
      {"chunk_overlap", std::to_string(c.chunk_overlap)},
      {"semantic_percentile", std::to_string(c.semantic_percentile)},
      {"min_chunk_tokens", std::to_string(c.min_chunk_tokens)},
      {"max_chunk_tokens", std::to_string(c.max_chunk_tokens)},
      {"k_neighbor", std::to_string(c.k_neighbor)},
      {"embedding_dim", std::to_string(c.embedding_dim)},
      {"max_gleaning", std::to_string(c.max_gleaning)},
      {"seed", std::to_string(c.seed)},
      {"provider", to_string(c.provider)},
      {"language_model", c.language_model},
      {"embedding_model", c.embedding_model},
  };
}

void validate(const Config& c) {
  auto positive = [](const char* key, int v) {
    if (v < 1) throw InvalidInput(std::string(key) + " must be >= 1");
  };
  positive("chunk_size", c.chunk_size);
  positive("k_neighbor", c.k_neighbor);
  positive("embedding_dim", c.embedding_dim);
  positive("max_parallel", c.max_parallel);
  positive("workers", c.workers);
  positive("timeout_seconds", c.timeout_seconds);
  if (c.chunk_overlap < 0 || c.chunk_overlap >= c.chunk_size)
    throw InvalidInput("chunk_overlap must be in [0, chunk_size)");
  if (c.semantic_percentile < 0 || c.semantic_percentile > 100)
    throw InvalidInput("semantic_percentile must be in [0, 100]");
  if (c.min_chunk_tokens < 0 || c.max_chunk_tokens < c.min_chunk_tokens || c.max_chunk_tokens < 1)
    throw InvalidInput("need 0 <= min_chunk_tokens <= max_chunk_tokens");
  if (c.context_budget < 0 || c.community_report_budget < 0 || c.text_unit_budget < 0)
    throw InvalidInput("token budgets must be >= 0");
  if (c.max_retries < 0) throw InvalidInput("max_retries must be >= 0");
  positive("retry_base_ms", c.retry_base_ms);
  if (c.k_max != 0 && c.k_max < 3) throw InvalidInput("k_max must be auto or >= 3");
  if (c.k_max_cap < 3) throw InvalidInput("k_max_cap must be >= 3");
  if (c.fallback_top_m < 0) throw InvalidInput("fallback_top_m must be >= 0");
  if (c.provider == ProviderMode::remote) {
    if (c.api_base.empty())
      throw InvalidInput(std::string("remote mode needs api_base (or ") + kApiBaseEnv + ")");
    if (c.api_key.empty()) throw InvalidInput(std::string("remote mode needs ") + kApiKeyEnv);
  }
}

}  // namespace trussrag
