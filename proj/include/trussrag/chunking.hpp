#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "trussrag/config.hpp"
#include "trussrag/providers.hpp"
#include "trussrag/text.hpp"

namespace trussrag {

struct Document {
  std::string id;  // path relative to the corpus root
  std::string text;
};

// A piece of one document before enrichment. Spans are byte offsets.
struct ChunkSpan {
  std::string source_doc;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string text;

  bool operator==(const ChunkSpan&) const = default;
};

class Chunker {
 public:
  virtual ~Chunker() = default;
  // Ordered spans for one document; whitespace-only documents yield none.
  virtual std::vector<ChunkSpan> chunk(const Document& doc) = 0;
};

// Token windows of `size` with `overlap` tokens shared between neighbours.
class FixedChunker final : public Chunker {
 public:
  FixedChunker(std::size_t size, std::size_t overlap, const Tokenizer& tokenizer);
  std::vector<ChunkSpan> chunk(const Document& doc) override;

 private:
  std::size_t size_;
  std::size_t overlap_;
  const Tokenizer& tokenizer_;
};

// Sentences grouped greedily; a boundary falls where the cosine between
// adjacent sentence embeddings is below the given percentile of all adjacent
// cosines, subject to min/max chunk sizes in tokens. Spans do not overlap and
// cover the document.
class SemanticChunker final : public Chunker {
 public:
  SemanticChunker(Embedder& embedder, int percentile, std::size_t min_tokens,
                  std::size_t max_tokens, const Tokenizer& tokenizer);
  std::vector<ChunkSpan> chunk(const Document& doc) override;

 private:
  Embedder& embedder_;
  int percentile_;
  std::size_t min_tokens_;
  std::size_t max_tokens_;
  const Tokenizer& tokenizer_;
};

std::unique_ptr<Chunker> make_chunker(const Config& config, Embedder& embedder,
                                      const Tokenizer& tokenizer);

// Every chunk of every document, in document order. Throws InvalidInput when
// the corpus is empty or holds no text.
std::vector<ChunkSpan> chunk_corpus(const std::vector<Document>& docs, Chunker& chunker);

// Regular files under `dir`, recursively, sorted by relative path. Files
// that are not valid UTF-8 are rejected with InvalidInput.
std::vector<Document> load_corpus(const std::string& dir);

bool valid_utf8(std::string_view text);

}  // namespace trussrag
