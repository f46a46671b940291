#pragma once

// Remote providers over the chat-completions / embeddings HTTP protocol
// (POST {base}/chat/completions, POST {base}/embeddings).

#include <atomic>
#include <memory>
#include <semaphore>
#include <string>
#include <vector>

#include "trussrag/config.hpp"
#include "trussrag/providers.hpp"

namespace trussrag {

struct RemoteOptions {
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string api_key;
  int timeout_seconds = 60;
  int max_retries = 3;
  int retry_base_ms = 500;
  int max_parallel = 16;
};

RemoteOptions remote_options(const Config& config);

struct ChatMessage {
  std::string role;
  std::string content;
};

// Thread-safe; at most max_parallel requests in flight. Transient failures
// (connection errors, 429, 5xx) are retried up to max_retries times with
// delays retry_base_ms * 2^i.
class ChatClient {
 public:
  explicit ChatClient(RemoteOptions options);

  std::vector<std::vector<float>> embeddings(const std::string& model,
                                             const std::vector<std::string>& input);
  std::string chat(const std::string& model, const std::vector<ChatMessage>& messages,
                   double temperature);

  // Delay before retry i (0-based), in milliseconds.
  std::vector<int> backoff_schedule() const;
  const RemoteOptions& options() const noexcept { return options_; }
  // Total HTTP requests issued so far.
  int requests_issued() const noexcept { return requests_.load(); }

 private:
  struct Outcome;
  Outcome post(const std::string& path, const std::string& body);

  RemoteOptions options_;
  std::string scheme_host_;
  std::string path_prefix_;
  std::counting_semaphore<1024> slots_;
  std::atomic<int> requests_{0};
};

class RemoteEmbedder final : public Embedder {
 public:
  RemoteEmbedder(std::shared_ptr<ChatClient> client, std::string model, std::size_t dim)
      : client_(std::move(client)), model_(std::move(model)), dim_(dim) {}
  std::size_t dimension() const override { return dim_; }
  std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override;

 private:
  std::shared_ptr<ChatClient> client_;
  std::string model_;
  std::size_t dim_;
};

// Parses "entity<|>NAME<|>DESC" and "relation<|>SRC<|>DST<|>LABEL<|>DESC"
// lines; malformed lines are skipped. Returns nullopt when the text holds no
// record and no NONE line.
std::optional<ExtractionPayload> parse_extraction(const std::string& text);

// Parses "SCORE: x" (x in [0, 1]) followed by the report body.
std::optional<ScoreResult> parse_score(const std::string& text);

class RemoteExtractor final : public Extractor {
 public:
  RemoteExtractor(std::shared_ptr<ChatClient> client, std::string model, double temperature,
                  int max_gleaning)
      : client_(std::move(client)), model_(std::move(model)), temperature_(temperature),
        max_gleaning_(max_gleaning) {}
  ExtractionPayload extract(std::string_view text) override;
  ChunkSummary describe_chunk(std::string_view text) override;

 private:
  std::shared_ptr<ChatClient> client_;
  std::string model_;
  double temperature_;
  int max_gleaning_;
};

class RemoteScorer final : public Scorer {
 public:
  RemoteScorer(std::shared_ptr<ChatClient> client, std::string model, double temperature,
               std::size_t report_budget, const Tokenizer& tokenizer)
      : client_(std::move(client)), model_(std::move(model)), temperature_(temperature),
        report_budget_(report_budget), tokenizer_(tokenizer) {}
  ScoreResult score(const std::string& question, const std::string& rendered,
                    double qr_score) override;

 private:
  std::shared_ptr<ChatClient> client_;
  std::string model_;
  double temperature_;
  std::size_t report_budget_;
  const Tokenizer& tokenizer_;
};

class RemoteGenerator final : public Generator {
 public:
  RemoteGenerator(std::shared_ptr<ChatClient> client, std::string model, double temperature)
      : client_(std::move(client)), model_(std::move(model)), temperature_(temperature) {}
  std::string generate(const std::string& question, const std::string& context) override;

 private:
  std::shared_ptr<ChatClient> client_;
  std::string model_;
  double temperature_;
};

// Replaces each "{name}" in `tmpl` with the matching value.
std::string fill_prompt(std::string_view tmpl,
                        const std::vector<std::pair<std::string, std::string>>& values);

}  // namespace trussrag
