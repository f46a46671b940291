#pragma once

// Provider contracts for everything that would otherwise need a model:
// embeddings, entity/relation extraction, community scoring and answer
// generation. Each has a deterministic local implementation (pure function of
// input and seed) and a remote one speaking the chat-completions/embeddings
// HTTP protocol (remote.hpp).

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "trussrag/config.hpp"
#include "trussrag/text.hpp"

namespace trussrag {

// Bump whenever a file under assets/prompts changes.
inline constexpr const char* kPromptVersion = "prompts-v1";

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dimension() const = 0;
  // One unit vector per input text, same order.
  virtual std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) = 0;
};

struct ExtractedEntity {
  std::string name;
  std::string description;

  bool operator==(const ExtractedEntity&) const = default;
};

struct ExtractedRelation {
  std::string source;
  std::string target;
  std::string label;
  std::string description;

  bool operator==(const ExtractedRelation&) const = default;
};

// Relation endpoints always name an entity in `entities` (normalized match).
struct ExtractionPayload {
  std::vector<ExtractedEntity> entities;
  std::vector<ExtractedRelation> relations;

  bool operator==(const ExtractionPayload&) const = default;
};

struct ChunkSummary {
  std::string title;
  std::string description;
};

class Extractor {
 public:
  virtual ~Extractor() = default;
  virtual ExtractionPayload extract(std::string_view text) = 0;
  virtual ChunkSummary describe_chunk(std::string_view text) = 0;
};

struct ScoreResult {
  double relevance = 0.0;  // [0, 1]
  std::string report;
};

class Scorer {
 public:
  virtual ~Scorer() = default;
  // `rendered` is the textual community; `qr_score` its QRScore, which the
  // deterministic scorer passes through.
  virtual ScoreResult score(const std::string& question, const std::string& rendered,
                            double qr_score) = 0;
};

class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string generate(const std::string& question, const std::string& context) = 0;
};

// Seeded hashing of character trigrams and words into `dim` signed buckets.
class HashEmbedder final : public Embedder {
 public:
  HashEmbedder(std::size_t dim, std::uint64_t seed);
  std::size_t dimension() const override { return dim_; }
  std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override;
  std::vector<float> embed_one(std::string_view text) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

// Entities are maximal runs of capitalized words (leading function words
// dropped) and double-quoted phrases; every pair of entities sharing a
// sentence gets a relation labelled with the first content word between them,
// or "related_to".
class RuleExtractor final : public Extractor {
 public:
  ExtractionPayload extract(std::string_view text) override;
  ChunkSummary describe_chunk(std::string_view text) override;
};

// relevance = clamp(qr_score, 0, 1); report = rendered text cut to budget.
class PassThroughScorer final : public Scorer {
 public:
  PassThroughScorer(std::size_t report_budget, const Tokenizer& tokenizer)
      : report_budget_(report_budget), tokenizer_(tokenizer) {}
  ScoreResult score(const std::string& question, const std::string& rendered,
                    double qr_score) override;

 private:
  std::size_t report_budget_;
  const Tokenizer& tokenizer_;
};

inline constexpr std::string_view kEchoHeader = "Answer (offline echo mode)\n\n";
inline constexpr std::string_view kRefusal =
    "I could not find information in the indexed corpus that answers this question.";

// Echoes the context after kEchoHeader; kRefusal for an empty context.
class EchoGenerator final : public Generator {
 public:
  std::string generate(const std::string& question, const std::string& context) override;
};

struct Providers {
  std::shared_ptr<Embedder> embedder;
  std::shared_ptr<Extractor> extractor;
  std::shared_ptr<Scorer> scorer;
  std::shared_ptr<Generator> generator;
  const Tokenizer* tokenizer = &default_tokenizer();
};

// Deterministic or remote set per config.provider. Validates the config.
Providers make_providers(const Config& config);

// Clamps into [0, 1]; NaN becomes 0.
double clamp_unit(double x);

}  // namespace trussrag
