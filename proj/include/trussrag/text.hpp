#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace trussrag {

// Token counting contract used for every budget. Providers may supply a real
// tokenizer; the default counts ceil(bytes / 4).
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::size_t count(std::string_view text) const = 0;
  // Longest prefix of `text` whose count is <= max_tokens, cut on a UTF-8
  // boundary.
  virtual std::string_view truncate(std::string_view text, std::size_t max_tokens) const = 0;
};

class ByteTokenizer final : public Tokenizer {
 public:
  static constexpr std::size_t kBytesPerToken = 4;
  std::size_t count(std::string_view text) const override;
  std::string_view truncate(std::string_view text, std::size_t max_tokens) const override;
};

const Tokenizer& default_tokenizer();

// Largest position <= pos that does not split a UTF-8 sequence.
std::size_t utf8_floor(std::string_view text, std::size_t pos);

std::string_view trim(std::string_view s);
// Case-folded (ASCII), whitespace collapsed to single spaces, trimmed.
std::string normalize_name(std::string_view s);
// Whitespace runs collapsed, trimmed; case kept.
std::string collapse_whitespace(std::string_view s);

// Sentence spans [begin, end) over `text`. A sentence ends after '.', '!' or
// '?' followed by whitespace, or at a blank line. Spans are contiguous and
// cover the text; leading whitespace of a sentence belongs to the previous
// span.
std::vector<std::pair<std::size_t, std::size_t>> sentence_spans(std::string_view text);

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);  // throws InvalidInput on bad input

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace trussrag
