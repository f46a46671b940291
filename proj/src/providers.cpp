#include "trussrag/providers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <unordered_set>

#include "trussrag/error.hpp"
#include "trussrag/remote.hpp"

namespace trussrag {

double clamp_unit(double x) {
  if (std::isnan(x)) return 0.0;
  return std::clamp(x, 0.0, 1.0);
}

HashEmbedder::HashEmbedder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim == 0) throw InvalidInput("embedding dimension must be >= 1");
}

std::vector<float> HashEmbedder::embed_one(std::string_view text) const {
  const std::string norm = normalize_name(text);
  const std::uint64_t base = fnv1a64(std::to_string(seed_));
  std::vector<double> acc(dim_, 0.0);
  auto add = [&](std::string_view feature, double weight) {
    const std::uint64_t h = fnv1a64(feature, base);
    const double sign = (h >> 40 & 1) ? -1.0 : 1.0;
    acc[h % dim_] += sign * weight;
  };
  const std::string padded = " " + norm + " ";
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) add(std::string_view(padded).substr(i, 3), 1.0);
  std::string word;
  for (char c : norm + " ") {
    if (std::isalnum(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80) {
      word.push_back(c);
    } else if (!word.empty()) {
      add("w:" + word, 2.0);
      word.clear();
    }
  }
  double sq = 0.0;
  for (double x : acc) sq += x * x;
  std::vector<float> out(dim_, 0.0f);
  if (sq == 0.0) {
    out[fnv1a64(norm, base) % dim_] = 1.0f;
    return out;
  }
  const double norm_len = std::sqrt(sq);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = static_cast<float>(acc[i] / norm_len);
  return out;
}

std::vector<std::vector<float>> HashEmbedder::embed(const std::vector<std::string>& texts) {
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

namespace {

const std::unordered_set<std::string>& leading_stopwords() {
  static const std::unordered_set<std::string> words{
      "The", "A", "An", "In", "On", "At", "It", "Its", "He", "She", "They", "We", "I", "You",
      "This", "That", "These", "Those", "His", "Her", "Their", "Our", "My", "Your", "After",
      "Before", "When", "While", "During", "But", "And", "Or", "If", "As", "By", "For", "From",
      "With", "Without", "Under", "Over", "Then", "There", "Here", "Each", "Every", "Some",
      "Many", "Most", "All", "Both", "Also", "However", "Meanwhile", "Later", "Today",
      "Although", "Because", "Since", "Until", "Unlike", "Despite", "Among", "Between",
      "Through", "Into", "Within", "Across", "Of", "To", "Not", "No", "So", "Such", "Once",
      "One", "Two", "Three", "Several", "Few", "Other", "Another", "Last", "Next", "First",
      "Who", "What", "Where", "Which", "Why", "How", "Yet", "Still", "Even", "Only", "Now",
      "Dr", "Mr", "Mrs", "Ms", "Prof", "Captain", "Capt", "St"};
  return words;
}

const std::unordered_set<std::string>& label_stopwords() {
  static const std::unordered_set<std::string> words{
      "the", "a", "an", "and", "or", "but", "of", "to", "in", "on", "at", "for", "with", "by",
      "from", "as", "his", "her", "their", "its", "our", "that", "which", "who", "whom", "this",
      "these", "those", "then", "also", "both", "while", "into", "onto", "upon", "about", "over",
      "under", "after", "before", "s"};
  return words;
}

bool word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '\'' || c == '-' || u >= 0x80;
}

struct Token {
  std::size_t begin;
  std::size_t end;
  std::string text;
};

struct Mention {
  std::size_t begin;
  std::size_t end;
  std::string name;
};

std::string strip_possessive(std::string s) {
  if (s.size() > 2 && s.compare(s.size() - 2, 2, "'s") == 0) s.resize(s.size() - 2);
  while (!s.empty() && (s.back() == '\'' || s.back() == '-')) s.pop_back();
  return s;
}

bool capitalized(const std::string& t) {
  return !t.empty() && t[0] >= 'A' && t[0] <= 'Z';
}

bool lowercase_word(const std::string& t) {
  return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

// Mentions in one sentence, ordered by position.
std::vector<Mention> find_mentions(std::string_view s, std::vector<Token>& tokens) {
  std::vector<Mention> mentions;
  std::vector<char> quoted(s.size(), 0);
  // Straight quotes only; the closing quote must exist.
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '"') continue;
    const std::size_t close = s.find('"', i + 1);
    if (close == std::string_view::npos) break;
    const std::string name = collapse_whitespace(s.substr(i + 1, close - i - 1));
    if (!name.empty() && name.size() <= 80) mentions.push_back({i, close + 1, name});
    std::fill(quoted.begin() + static_cast<std::ptrdiff_t>(i),
              quoted.begin() + static_cast<std::ptrdiff_t>(close + 1), 1);
    i = close;
  }

  tokens.clear();
  for (std::size_t i = 0; i < s.size();) {
    if (!word_byte(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && word_byte(s[j])) ++j;
    if (!quoted[i]) tokens.push_back({i, j, std::string(s.substr(i, j - i))});
    i = j;
  }

  // Runs of capitalized tokens separated only by spaces.
  std::size_t t = 0;
  while (t < tokens.size()) {
    if (!capitalized(tokens[t].text)) {
      ++t;
      continue;
    }
    std::size_t end = t + 1;
    while (end < tokens.size() && capitalized(tokens[end].text)) {
      const auto gap = s.substr(tokens[end - 1].end, tokens[end].begin - tokens[end - 1].end);
      if (gap != " ") break;
      // A possessive closes the name: "Alice's Bob" is two mentions.
      if (tokens[end - 1].text.size() > 2 &&
          tokens[end - 1].text.compare(tokens[end - 1].text.size() - 2, 2, "'s") == 0)
        break;
      ++end;
    }
    std::size_t first = t;
    while (first < end && leading_stopwords().count(tokens[first].text)) ++first;
    if (first < end) {
      std::string name;
      for (std::size_t x = first; x < end; ++x) {
        if (!name.empty()) name += ' ';
        name += tokens[x].text;
      }
      name = strip_possessive(name);
      if (!name.empty()) mentions.push_back({tokens[first].begin, tokens[end - 1].end, name});
    }
    t = end;
  }
  std::sort(mentions.begin(), mentions.end(),
            [](const Mention& a, const Mention& b) { return a.begin < b.begin; });
  return mentions;
}

std::string connecting_label(const std::vector<Token>& tokens, std::size_t from, std::size_t to) {
  for (const Token& t : tokens) {
    if (t.begin < from || t.end > to) continue;
    if (lowercase_word(t.text) && !label_stopwords().count(t.text)) return t.text;
  }
  return "related_to";
}

}  // namespace

ExtractionPayload RuleExtractor::extract(std::string_view text) {
  ExtractionPayload out;
  std::set<std::string> seen_entities;
  std::set<std::pair<std::string, std::string>> seen_relations;
  std::vector<Token> tokens;
  for (const auto& [b, e] : sentence_spans(text)) {
    const std::string_view sentence = text.substr(b, e - b);
    const std::string described = collapse_whitespace(sentence);
    const std::vector<Mention> mentions = find_mentions(sentence, tokens);
    for (const Mention& m : mentions) {
      if (seen_entities.insert(normalize_name(m.name)).second)
        out.entities.push_back({m.name, described});
    }
    for (std::size_t i = 0; i < mentions.size(); ++i) {
      for (std::size_t j = i + 1; j < mentions.size(); ++j) {
        std::string a = normalize_name(mentions[i].name);
        std::string c = normalize_name(mentions[j].name);
        if (a == c) continue;
        auto key = std::minmax(a, c);
        if (!seen_relations.insert({key.first, key.second}).second) continue;
        out.relations.push_back({mentions[i].name, mentions[j].name,
                                 connecting_label(tokens, mentions[i].end, mentions[j].begin),
                                 described});
      }
    }
  }
  return out;
}

ChunkSummary RuleExtractor::describe_chunk(std::string_view text) {
  ChunkSummary s;
  const auto spans = sentence_spans(text);
  if (spans.empty()) return {"(empty)", "(empty)"};
  const std::string first = collapse_whitespace(text.substr(spans[0].first, spans[0].second - spans[0].first));
  std::size_t words = 0;
  for (std::size_t i = 0; i <= first.size(); ++i) {
    if (i == first.size() || first[i] == ' ') {
      if (++words == 8 || i == first.size()) {
        s.title = first.substr(0, i);
        break;
      }
    }
  }
  while (!s.title.empty() && std::ispunct(static_cast<unsigned char>(s.title.back()))) s.title.pop_back();
  if (s.title.empty()) s.title = first;
  std::string desc = first;
  if (spans.size() > 1)
    desc += " " + collapse_whitespace(text.substr(spans[1].first, spans[1].second - spans[1].first));
  s.description = desc.substr(0, utf8_floor(desc, 300));
  return s;
}

ScoreResult PassThroughScorer::score(const std::string&, const std::string& rendered,
                                     double qr_score) {
  return {clamp_unit(qr_score), std::string(tokenizer_.truncate(rendered, report_budget_))};
}

std::string EchoGenerator::generate(const std::string&, const std::string& context) {
  if (trim(context).empty()) return std::string(kRefusal);
  return std::string(kEchoHeader) + context;
}

Providers make_providers(const Config& config) {
  validate(config);
  Providers p;
  if (config.provider == ProviderMode::deterministic) {
    p.embedder = std::make_shared<HashEmbedder>(config.embedding_dim, config.seed);
    p.extractor = std::make_shared<RuleExtractor>();
    p.scorer = std::make_shared<PassThroughScorer>(config.community_report_budget, *p.tokenizer);
    p.generator = std::make_shared<EchoGenerator>();
    return p;
  }
  auto client = std::make_shared<ChatClient>(remote_options(config));
  p.embedder = std::make_shared<RemoteEmbedder>(client, config.embedding_model, config.embedding_dim);
  p.extractor = std::make_shared<RemoteExtractor>(client, config.language_model, config.temperature,
                                                  config.max_gleaning);
  p.scorer = std::make_shared<RemoteScorer>(client, config.language_model, config.temperature,
                                            config.community_report_budget, *p.tokenizer);
  p.generator = std::make_shared<RemoteGenerator>(client, config.language_model, config.temperature);
  return p;
}

}  // namespace trussrag
