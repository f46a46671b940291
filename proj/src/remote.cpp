#include "trussrag/remote.hpp"

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "trussrag/error.hpp"
#include "trussrag/prompts_generated.hpp"
#include "trussrag/text.hpp"

namespace trussrag {

using json = nlohmann::json;

RemoteOptions remote_options(const Config& c) {
  return {c.api_base, c.api_key, c.timeout_seconds, c.max_retries, c.retry_base_ms, c.max_parallel};
}

struct ChatClient::Outcome {
  bool ok = false;
  bool retryable = false;
  int attempts = 0;
  std::string body;
  std::string error;
};

ChatClient::ChatClient(RemoteOptions options)
    : options_(std::move(options)), slots_(std::clamp(options_.max_parallel, 1, 1024)) {
  if (options_.max_parallel < 1) throw InvalidInput("max_parallel must be >= 1");
  std::string url = options_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw InvalidInput("api_base must start with http:// or https://");
  const auto slash = url.find('/', scheme + 3);
  scheme_host_ = url.substr(0, slash);
  path_prefix_ = slash == std::string::npos ? "" : url.substr(slash);
}

std::vector<int> ChatClient::backoff_schedule() const {
  std::vector<int> out;
  const int base = std::max(1, options_.retry_base_ms);
  for (int i = 0; i < options_.max_retries; ++i) out.push_back(base << std::min(i, 20));
  return out;
}

ChatClient::Outcome ChatClient::post(const std::string& path, const std::string& body) {
  Outcome out;
  const auto delays = backoff_schedule();
  slots_.acquire();
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delays[attempt - 1]));
    ++out.attempts;
    ++requests_;
    httplib::Client cli(scheme_host_);
    cli.set_connection_timeout(options_.timeout_seconds, 0);
    cli.set_read_timeout(options_.timeout_seconds, 0);
    cli.set_write_timeout(options_.timeout_seconds, 0);
    const httplib::Headers headers{{"Authorization", "Bearer " + options_.api_key}};
    auto res = cli.Post(path_prefix_ + path, headers, body, "application/json");
    if (!res) {
      out.error = "connection failed: " + httplib::to_string(res.error());
      out.retryable = true;
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      out.ok = true;
      out.body = res->body;
      break;
    }
    out.error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
    out.retryable = res->status == 429 || res->status >= 500;
    if (!out.retryable) break;
  }
  slots_.release();
  return out;
}

std::vector<std::vector<float>> ChatClient::embeddings(const std::string& model,
                                                       const std::vector<std::string>& input) {
  const json request{{"model", model}, {"input", input}};
  Outcome r = post("/embeddings", request.dump());
  if (!r.ok)
    throw EmbeddingError("embeddings request failed after " + std::to_string(r.attempts) +
                             " attempt(s): " + r.error,
                         r.attempts, r.retryable);
  try {
    const json doc = json::parse(r.body);
    std::vector<std::vector<float>> out(input.size());
    std::vector<char> filled(input.size(), 0);
    for (const auto& item : doc.at("data")) {
      const auto index = item.value("index", std::size_t{0});
      if (index >= input.size()) throw EmbeddingError("embedding index out of range", r.attempts, false);
      out[index] = item.at("embedding").get<std::vector<float>>();
      filled[index] = 1;
    }
    for (char f : filled)
      if (!f) throw EmbeddingError("embeddings response is missing items", r.attempts, false);
    return out;
  } catch (const json::exception& e) {
    throw EmbeddingError(std::string("malformed embeddings response: ") + e.what(), r.attempts, false);
  }
}

std::string ChatClient::chat(const std::string& model, const std::vector<ChatMessage>& messages,
                             double temperature) {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  const json request{{"model", model}, {"messages", msgs}, {"temperature", temperature}};
  Outcome r = post("/chat/completions", request.dump());
  if (!r.ok)
    throw GenerationError("chat request failed after " + std::to_string(r.attempts) +
                              " attempt(s): " + r.error,
                          r.attempts, r.retryable);
  try {
    const json doc = json::parse(r.body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw GenerationError(std::string("malformed chat response: ") + e.what(), r.attempts, false);
  }
}

std::vector<std::vector<float>> RemoteEmbedder::embed(const std::vector<std::string>& texts) {
  constexpr std::size_t kBatch = 64;
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += kBatch) {
    std::vector<std::string> batch(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                   texts.begin() + static_cast<std::ptrdiff_t>(std::min(texts.size(), start + kBatch)));
    for (auto& v : client_->embeddings(model_, batch)) {
      if (v.size() != dim_)
        throw EmbeddingError("provider returned dimension " + std::to_string(v.size()) +
                                 ", configured " + std::to_string(dim_),
                             1, false);
      double sq = 0.0;
      for (float x : v) sq += static_cast<double>(x) * x;
      if (sq > 0.0) {
        const double norm = std::sqrt(sq);
        for (auto& x : v) x = static_cast<float>(x / norm);
      }
      out.push_back(std::move(v));
    }
  }
  return out;
}

std::string fill_prompt(std::string_view tmpl,
                        const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out(tmpl);
  for (const auto& [name, value] : values) {
    const std::string key = "{" + name + "}";
    std::size_t pos = 0;
    while ((pos = out.find(key, pos)) != std::string::npos) {
      out.replace(pos, key.size(), value);
      pos += value.size();
    }
  }
  return out;
}

namespace {

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  constexpr std::string_view sep = "<|>";
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    fields.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + sep.size();
  }
  return fields;
}

void merge_payload(ExtractionPayload& into, const ExtractionPayload& extra) {
  for (const auto& e : extra.entities) {
    const auto key = normalize_name(e.name);
    bool dup = std::any_of(into.entities.begin(), into.entities.end(),
                           [&](const ExtractedEntity& x) { return normalize_name(x.name) == key; });
    if (!dup) into.entities.push_back(e);
  }
  for (const auto& r : extra.relations) into.relations.push_back(r);
}

}  // namespace

namespace {

// Relations may also point at entities in `known` (earlier gleaning rounds).
std::optional<ExtractionPayload> parse_records(const std::string& text,
                                               const std::vector<ExtractedEntity>& known_before) {
  ExtractionPayload out;
  bool none = false;
  std::vector<ExtractedRelation> relations;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line == "NONE") {
      none = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields[0] == "entity" && fields.size() == 3 && !fields[1].empty()) {
      const auto key = normalize_name(fields[1]);
      bool dup = std::any_of(out.entities.begin(), out.entities.end(),
                             [&](const ExtractedEntity& e) { return normalize_name(e.name) == key; });
      if (!dup) out.entities.push_back({fields[1], fields[2]});
    } else if (fields[0] == "relation" && fields.size() == 5 && !fields[1].empty() &&
               !fields[2].empty()) {
      relations.push_back({fields[1], fields[2], fields[3].empty() ? "related_to" : fields[3], fields[4]});
    }
  }
  for (auto& r : relations) {
    const auto a = normalize_name(r.source), b = normalize_name(r.target);
    auto named = [&](const std::vector<ExtractedEntity>& list, const std::string& key) {
      return std::any_of(list.begin(), list.end(),
                         [&](const ExtractedEntity& e) { return normalize_name(e.name) == key; });
    };
    auto known = [&](const std::string& key) { return named(out.entities, key) || named(known_before, key); };
    if (a != b && known(a) && known(b)) out.relations.push_back(std::move(r));
  }
  if (out.entities.empty() && relations.empty() && !none) return std::nullopt;
  return out;
}

}  // namespace

std::optional<ExtractionPayload> parse_extraction(const std::string& text) { return parse_records(text, {}); }

std::optional<ScoreResult> parse_score(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.rfind("SCORE:", 0) != 0) return std::nullopt;
    std::istringstream num{std::string(trim(line.substr(6)))};
    double score = 0.0;
    num >> score;
    if (!num || !num.eof() || !(score >= 0.0 && score <= 1.0)) return std::nullopt;
    std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return ScoreResult{score, std::string(trim(rest))};
  }
  return std::nullopt;
}

ExtractionPayload RemoteExtractor::extract(std::string_view text) {
  const std::string prompt = fill_prompt(prompts::extract_entities, {{"text", std::string(text)}});
  const int attempts = client_->options().max_retries + 1;
  for (int i = 0; i < attempts; ++i) {
    const std::string first = client_->chat(model_, {{"user", prompt}}, temperature_);
    auto parsed = parse_extraction(first);
    if (!parsed) continue;
    for (int round = 0; round < max_gleaning_; ++round) {
      const std::string more = client_->chat(
          model_,
          {{"user", prompt}, {"assistant", first}, {"user", std::string(prompts::extract_gleaning)}},
          temperature_);
      if (auto extra = parse_records(more, parsed->entities)) merge_payload(*parsed, *extra);
    }
    return *parsed;
  }
  throw ExtractionError("extraction output unparseable after " + std::to_string(attempts) +
                            " attempt(s)",
                        attempts, true);
}

ChunkSummary RemoteExtractor::describe_chunk(std::string_view text) {
  const std::string prompt = fill_prompt(prompts::describe_chunk, {{"text", std::string(text)}});
  const int attempts = client_->options().max_retries + 1;
  for (int i = 0; i < attempts; ++i) {
    const std::string reply = client_->chat(model_, {{"user", prompt}}, temperature_);
    ChunkSummary s;
    std::istringstream in(reply);
    std::string raw;
    while (std::getline(in, raw)) {
      std::string_view line = trim(raw);
      if (line.rfind("TITLE:", 0) == 0) s.title = trim(line.substr(6));
      else if (line.rfind("DESCRIPTION:", 0) == 0) s.description = trim(line.substr(12));
    }
    if (!s.title.empty() && !s.description.empty()) return s;
  }
  throw ExtractionError("chunk description unparseable after " + std::to_string(attempts) +
                            " attempt(s)",
                        attempts, true);
}

ScoreResult RemoteScorer::score(const std::string& question, const std::string& rendered, double) {
  const std::string prompt =
      fill_prompt(prompts::score_community, {{"question", question}, {"community", rendered}});
  const int attempts = client_->options().max_retries + 1;
  for (int i = 0; i < attempts; ++i) {
    const std::string reply = client_->chat(model_, {{"user", prompt}}, temperature_);
    if (auto parsed = parse_score(reply)) {
      parsed->report = std::string(tokenizer_.truncate(parsed->report, report_budget_));
      return *parsed;
    }
  }
  throw ScoreParseError("no valid SCORE line after " + std::to_string(attempts) + " attempt(s)",
                        attempts, true);
}

std::string RemoteGenerator::generate(const std::string& question, const std::string& context) {
  const std::string prompt =
      fill_prompt(prompts::answer, {{"question", question}, {"context", context}});
  return client_->chat(model_, {{"user", prompt}}, temperature_);
}

}  // namespace trussrag
