#include "trussrag/text.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "trussrag/error.hpp"

namespace trussrag {

std::size_t ByteTokenizer::count(std::string_view text) const {
  return (text.size() + kBytesPerToken - 1) / kBytesPerToken;
}

std::string_view ByteTokenizer::truncate(std::string_view text, std::size_t max_tokens) const {
  const std::size_t limit = max_tokens * kBytesPerToken;
  if (text.size() <= limit) return text;
  return text.substr(0, utf8_floor(text, limit));
}

const Tokenizer& default_tokenizer() {
  static const ByteTokenizer tokenizer;
  return tokenizer;
}

std::size_t utf8_floor(std::string_view text, std::size_t pos) {
  if (pos >= text.size()) return text.size();
  while (pos > 0 && (static_cast<unsigned char>(text[pos]) & 0xC0) == 0x80) --pos;
  return pos;
}

namespace {
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
}  // namespace

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : trim(s)) {
    if (is_space(c)) {
      pending = true;
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

std::string normalize_name(std::string_view s) {
  std::string out = collapse_whitespace(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

namespace {

// True when the word ending at `dot` is an honorific or a single initial.
bool abbreviation_before(std::string_view text, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && std::isalpha(static_cast<unsigned char>(text[b - 1]))) --b;
  const std::string_view word = text.substr(b, dot - b);
  if (word.size() == 1 && std::isupper(static_cast<unsigned char>(word[0]))) return true;
  static constexpr std::string_view kAbbrev[] = {"Dr", "Mr", "Mrs", "Ms", "Prof", "St",
                                                 "Capt", "Gen", "Jr", "Sr", "vs"};
  for (auto a : kAbbrev)
    if (word == a) return true;
  return false;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> sentence_spans(std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t start = 0;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const char c = text[i];
    bool boundary = false;
    std::size_t end = i + 1;
    if ((c == '.' || c == '!' || c == '?') && (i + 1 == n || is_space(text[i + 1]))) {
      boundary = c != '.' || !abbreviation_before(text, i);
    } else if (c == '\n' && i + 1 < n && text[i + 1] == '\n') {
      boundary = true;
    }
    if (boundary) {
      // Swallow trailing whitespace into this span.
      while (end < n && is_space(text[end])) ++end;
      if (!trim(text.substr(start, end - start)).empty()) {
        spans.emplace_back(start, end);
        start = end;
      }
      i = end;
      continue;
    }
    ++i;
  }
  if (start < n) {
    if (trim(text.substr(start)).empty() && !spans.empty()) spans.back().second = n;
    else if (!trim(text.substr(start)).empty()) spans.emplace_back(start, n);
  }
  return spans;
}

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int written = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                      reinterpret_cast<const unsigned char*>(bytes.data()),
                                      static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(written));
  return out;
}

std::string base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw InvalidInput("base64 length is not a multiple of 4");
  if (text.empty()) return {};
  std::string out(3 * (text.size() / 4), '\0');
  const int written = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                      reinterpret_cast<const unsigned char*>(text.data()),
                                      static_cast<int>(text.size()));
  if (written < 0) throw InvalidInput("malformed base64");
  std::size_t pad = 0;
  if (text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(written) - pad);
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw InvalidInput("failed writing '" + path + "'");
}

}  // namespace trussrag
