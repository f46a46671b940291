#include "trussrag/chunking.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "trussrag/error.hpp"
#include "trussrag/kernels.hpp"

namespace trussrag {

namespace fs = std::filesystem;

FixedChunker::FixedChunker(std::size_t size, std::size_t overlap, const Tokenizer& tokenizer)
    : size_(size), overlap_(overlap), tokenizer_(tokenizer) {
  if (size == 0 || overlap >= size) throw InvalidInput("fixed chunker needs 0 <= overlap < size");
}

std::vector<ChunkSpan> FixedChunker::chunk(const Document& doc) {
  std::vector<ChunkSpan> out;
  const std::string_view text = doc.text;
  if (trim(text).empty()) return out;
  std::size_t begin = 0;
  while (true) {
    const std::string_view rest = text.substr(begin);
    std::size_t len = tokenizer_.truncate(rest, size_).size();
    if (len == 0) len = rest.size();
    out.push_back({doc.id, begin, begin + len, std::string(rest.substr(0, len))});
    if (begin + len >= text.size()) break;
    std::size_t step = tokenizer_.truncate(rest, size_ - overlap_).size();
    if (step == 0) step = len;
    begin += step;
  }
  return out;
}

SemanticChunker::SemanticChunker(Embedder& embedder, int percentile, std::size_t min_tokens,
                                 std::size_t max_tokens, const Tokenizer& tokenizer)
    : embedder_(embedder), percentile_(percentile), min_tokens_(min_tokens),
      max_tokens_(max_tokens), tokenizer_(tokenizer) {
  if (max_tokens == 0 || min_tokens > max_tokens)
    throw InvalidInput("semantic chunker needs 0 <= min_tokens <= max_tokens, max_tokens >= 1");
}

namespace {

// Linear-interpolation percentile of `values` (p in [0, 100]).
double percentile_of(std::vector<double> values, int p) {
  std::sort(values.begin(), values.end());
  const double rank = (static_cast<double>(p) / 100.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (values[hi] - values[lo]) * (rank - static_cast<double>(lo));
}

}  // namespace

std::vector<ChunkSpan> SemanticChunker::chunk(const Document& doc) {
  std::vector<ChunkSpan> out;
  const std::string_view text = doc.text;
  if (trim(text).empty()) return out;

  // Sentences, with any sentence above max_tokens split into windows.
  std::vector<std::pair<std::size_t, std::size_t>> units;
  for (auto [b, e] : sentence_spans(text)) {
    while (tokenizer_.count(text.substr(b, e - b)) > max_tokens_) {
      std::size_t len = tokenizer_.truncate(text.substr(b, e - b), max_tokens_).size();
      if (len == 0) break;
      units.emplace_back(b, b + len);
      b += len;
    }
    if (b < e) units.emplace_back(b, e);
  }
  if (units.size() == 1) {
    out.push_back({doc.id, units[0].first, units[0].second,
                   std::string(text.substr(units[0].first, units[0].second - units[0].first))});
    return out;
  }

  std::vector<std::string> sentences;
  sentences.reserve(units.size());
  for (auto [b, e] : units) sentences.emplace_back(trim(text.substr(b, e - b)));
  const auto vectors = embedder_.embed(sentences);
  std::vector<double> gaps(units.size() - 1);
  for (std::size_t i = 0; i + 1 < units.size(); ++i) gaps[i] = cosine(vectors[i], vectors[i + 1]);
  const double threshold = percentile_of(gaps, percentile_);

  std::vector<std::pair<std::size_t, std::size_t>> groups;
  std::size_t begin = units[0].first;
  for (std::size_t i = 0; i < units.size(); ++i) {
    const std::size_t end = units[i].second;
    if (i + 1 == units.size()) {
      groups.emplace_back(begin, end);
      break;
    }
    const std::size_t current = tokenizer_.count(text.substr(begin, end - begin));
    const std::size_t with_next = tokenizer_.count(text.substr(begin, units[i + 1].second - begin));
    const bool semantic_break = gaps[i] < threshold && current >= min_tokens_;
    if (semantic_break || with_next > max_tokens_) {
      groups.emplace_back(begin, end);
      begin = end;
    }
  }
  // A short tail joins its predecessor when that stays within max_tokens.
  if (groups.size() >= 2) {
    const auto [tb, te] = groups.back();
    const auto pb = groups[groups.size() - 2].first;
    if (tokenizer_.count(text.substr(tb, te - tb)) < min_tokens_ &&
        tokenizer_.count(text.substr(pb, te - pb)) <= max_tokens_) {
      groups.pop_back();
      groups.back().second = te;
    }
  }
  for (auto [b, e] : groups) out.push_back({doc.id, b, e, std::string(text.substr(b, e - b))});
  return out;
}

std::unique_ptr<Chunker> make_chunker(const Config& config, Embedder& embedder,
                                      const Tokenizer& tokenizer) {
  if (config.chunker == ChunkerMode::fixed)
    return std::make_unique<FixedChunker>(static_cast<std::size_t>(config.chunk_size),
                                          static_cast<std::size_t>(config.chunk_overlap), tokenizer);
  return std::make_unique<SemanticChunker>(embedder, config.semantic_percentile,
                                           static_cast<std::size_t>(config.min_chunk_tokens),
                                           static_cast<std::size_t>(config.max_chunk_tokens), tokenizer);
}

std::vector<ChunkSpan> chunk_corpus(const std::vector<Document>& docs, Chunker& chunker) {
  if (docs.empty()) throw InvalidInput("empty corpus");
  std::vector<ChunkSpan> out;
  for (const auto& doc : docs) {
    auto spans = chunker.chunk(doc);
    out.insert(out.end(), std::make_move_iterator(spans.begin()), std::make_move_iterator(spans.end()));
  }
  if (out.empty()) throw InvalidInput("empty corpus: no document contains text");
  return out;
}

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t j = 1; j < len; ++j) {
      const auto cc = static_cast<unsigned char>(s[i + j]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    static constexpr std::uint32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += len;
  }
  return true;
}

std::vector<Document> load_corpus(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw NotFound("corpus directory not found: " + dir);
  std::vector<Document> docs;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    Document doc;
    doc.id = fs::relative(entry.path(), dir).generic_string();
    doc.text = read_file(entry.path().string());
    if (!valid_utf8(doc.text)) throw InvalidInput("not UTF-8 text: " + doc.id);
    docs.push_back(std::move(doc));
  }
  std::sort(docs.begin(), docs.end(), [](const Document& a, const Document& b) { return a.id < b.id; });
  return docs;
}

}  // namespace trussrag
