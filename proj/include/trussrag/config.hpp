#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace trussrag {

enum class ProviderMode { deterministic, remote };
enum class ChunkerMode { semantic, fixed };

// Everything tunable, with the defaults used by the published system.
struct Config {
  // Chunking.
  ChunkerMode chunker = ChunkerMode::semantic;
  int chunk_size = 1200;  // fixed mode, tokens
  int chunk_overlap = 100;
  int semantic_percentile = 25;
  int min_chunk_tokens = 200;
  int max_chunk_tokens = 1800;

  // Index.
  int k_neighbor = 5;
  int embedding_dim = 1536;
  int max_gleaning = 1;
  std::uint64_t seed = 42;

  // Retrieval budgets (tokens).
  int context_budget = 4800;
  int community_report_budget = 3200;
  int text_unit_budget = 4000;
  int k_max = 0;  // 0 = infer per layer
  int k_max_cap = 10;
  int fallback_top_m = 5;

  // Providers.
  ProviderMode provider = ProviderMode::deterministic;
  std::string api_base;
  std::string api_key;  // environment only; never echoed or persisted
  std::string language_model = "gpt-4o-mini";
  std::string embedding_model = "text-embedding-3-small";
  double temperature = 0.0;
  int timeout_seconds = 60;
  int max_retries = 3;
  int retry_base_ms = 500;
  int max_parallel = 16;
  int workers = 16;
};

inline constexpr const char* kApiKeyEnv = "DARAG_API_KEY";
inline constexpr const char* kApiBaseEnv = "DARAG_API_BASE";

// Sets one key from its text form. Unknown keys and malformed values throw
// InvalidInput. `api_key` is not settable this way.
void apply_setting(Config& config, const std::string& key, const std::string& value);

// "key = value" lines; '#' starts a comment; blank lines ignored.
void apply_config_text(Config& config, const std::string& text);
void apply_config_file(Config& config, const std::string& path);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();
void apply_env(Config& config, const EnvLookup& env);

// Every key in stable order, api_key redacted.
std::map<std::string, std::string> describe(const Config& config);
std::string describe_text(const Config& config);

// Keys that shape a built index (persisted with it).
std::map<std::string, std::string> build_settings(const Config& config);

// Remote mode needs a base URL and key; counts must be positive.
void validate(const Config& config);

const char* to_string(ProviderMode mode);
const char* to_string(ChunkerMode mode);

}  // namespace trussrag
