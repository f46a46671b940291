#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include "fixtures.hpp"
#include "trussrag/config.hpp"
#include "trussrag/error.hpp"
#include "trussrag/parallel.hpp"
#include "trussrag/providers.hpp"
#include "trussrag/remote.hpp"
#include "trussrag/text.hpp"

using namespace trussrag;

namespace {

double norm(const std::vector<float>& v) {
  double s = 0;
  for (float x : v) s += double(x) * x;
  return std::sqrt(s);
}

EnvLookup fake_env(std::map<std::string, std::string> values) {
  return [values](const std::string& k) -> std::optional<std::string> {
    auto it = values.find(k);
    if (it == values.end()) return std::nullopt;
    return it->second;
  };
}

}  // namespace

TEST_CASE("default configuration snapshot") {
  const auto d = describe(Config{});
  CHECK(d.at("k_neighbor") == "5");
  CHECK(d.at("context_budget") == "4800");
  CHECK(d.at("community_report_budget") == "3200");
  CHECK(d.at("text_unit_budget") == "4000");
  CHECK(d.at("embedding_dim") == "1536");
  CHECK(d.at("temperature") == "0");
  CHECK(d.at("chunk_size") == "1200");
  CHECK(d.at("chunk_overlap") == "100");
  CHECK(d.at("api_key") == "");
  CHECK(fixture::matches_golden("default_config.txt", describe_text(Config{})));
}

TEST_CASE("config text and precedence") {
  Config c;
  apply_config_text(c, "# comment\n\nk_neighbor = 7  # trailing\ncontext_budget=100\nk_max = auto\n");
  CHECK(c.k_neighbor == 7);
  CHECK(c.context_budget == 100);
  CHECK(c.k_max == 0);
  CHECK_THROWS_AS(apply_config_text(c, "no equals sign"), InvalidInput);
  CHECK_THROWS_AS(apply_setting(c, "bogus", "1"), InvalidInput);
  CHECK_THROWS_AS(apply_setting(c, "k_neighbor", "five"), InvalidInput);
  CHECK_THROWS_AS(apply_setting(c, "provider", "cloud"), InvalidInput);
  CHECK_THROWS_AS(apply_setting(c, "api_key", "sk-x"), InvalidInput);
  CHECK_THROWS_AS(apply_config_text(c, "api_key = sk-x"), InvalidInput);

  apply_config_text(c, "api_base = http://file\n");
  apply_env(c, fake_env({{kApiBaseEnv, "http://env"}, {kApiKeyEnv, "sk-env"}}));
  CHECK(c.api_base == "http://env");
  CHECK(c.api_key == "sk-env");
  apply_setting(c, "api_base", "http://flag");
  CHECK(c.api_base == "http://flag");
  CHECK(describe(c).at("api_key") == "<redacted>");
  CHECK(describe_text(c).find("sk-env") == std::string::npos);
  CHECK(build_settings(c).count("api_key") == 0);
}

TEST_CASE("config validation") {
  Config c;
  CHECK_NOTHROW(validate(c));
  c.provider = ProviderMode::remote;
  CHECK_THROWS_AS(validate(c), InvalidInput);
  c.api_base = "http://localhost:1";
  CHECK_THROWS_AS(validate(c), InvalidInput);
  c.api_key = "k";
  CHECK_NOTHROW(validate(c));
  Config bad;
  bad.chunk_overlap = bad.chunk_size;
  CHECK_THROWS_AS(validate(bad), InvalidInput);
  bad = Config{};
  bad.k_max = 2;
  CHECK_THROWS_AS(validate(bad), InvalidInput);
  bad = Config{};
  bad.retry_base_ms = 0;
  CHECK_THROWS_AS(validate(bad), InvalidInput);
}

TEST_CASE("byte tokenizer") {
  const auto& t = default_tokenizer();
  CHECK(t.count("") == 0);
  CHECK(t.count("abc") == 1);
  CHECK(t.count("abcd") == 1);
  CHECK(t.count("abcde") == 2);
  CHECK(t.truncate("abcdefghij", 2) == "abcdefgh");
  // "é" is two bytes; a cut may not split it.
  CHECK(t.truncate("abc\xc3\xa9z", 1) == "abc");
  CHECK(utf8_floor("a\xc3\xa9", 2) == 1);
}

TEST_CASE("text utilities") {
  CHECK(normalize_name("  Port   CALDER ") == "port calder");
  CHECK(collapse_whitespace(" a \n b ") == "a b");
  const std::string text = "Dr. Sol arrived. She left!  Then\n\nnew para";
  const auto spans = sentence_spans(text);
  REQUIRE(spans.size() == 4);
  CHECK(spans.front().first == 0);
  CHECK(spans.back().second == text.size());
  for (std::size_t i = 1; i < spans.size(); ++i) CHECK(spans[i].first == spans[i - 1].second);
  CHECK(text.substr(spans[0].first, spans[0].second - spans[0].first).rfind("Dr. Sol arrived.", 0) == 0);
  CHECK(base64_encode("hello") == "aGVsbG8=");
  CHECK(base64_decode("aGVsbG8=") == "hello");
  CHECK_THROWS_AS(base64_decode("***"), InvalidInput);
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("hash embedder") {
  HashEmbedder e(64, 42);
  const auto a = e.embed({"tidal turbine", "tidal turbine", "harbour master"});
  CHECK(a[0] == a[1]);
  CHECK(a[0] != a[2]);
  for (const auto& v : a) {
    CHECK(v.size() == 64);
    CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK(HashEmbedder(64, 43).embed_one("tidal turbine") != a[0]);

  HashEmbedder small(8, 42);
  std::ostringstream golden;
  for (const char* text : {"Alice manages Bob.", "Port Calder", "tidal turbine", "x"}) {
    golden << text << ':';
    for (float x : small.embed_one(text)) {
      char buf[32];
      std::snprintf(buf, sizeof buf, " %.6f", x);
      golden << buf;
    }
    golden << '\n';
  }
  CHECK(fixture::matches_golden("hash_vectors.txt", golden.str()));
}

TEST_CASE("rule extractor") {
  RuleExtractor x;
  const auto p = x.extract("Alice manages Bob.");
  REQUIRE(p.entities.size() == 2);
  CHECK(p.entities[0].name == "Alice");
  CHECK(p.entities[1].name == "Bob");
  REQUIRE(p.relations.size() == 1);
  CHECK(p.relations[0] == ExtractedRelation{"Alice", "Bob", "manages", p.relations[0].description});

  CHECK(x.extract("all of this is lowercase.") == ExtractionPayload{});
  const auto quoted = x.extract("The crew called it \"the long night\" afterwards.");
  bool found = false;
  for (const auto& e : quoted.entities) found = found || e.name == "the long night";
  CHECK(found);
  const auto dr = x.extract("Dr. Anika Sol joined Ferro Dynamics.");
  REQUIRE(dr.entities.size() == 2);
  CHECK(dr.entities[0].name == "Anika Sol");
  const auto fallback = x.extract("Alice and Bob.");
  REQUIRE(fallback.relations.size() == 1);
  CHECK(fallback.relations[0].label == "related_to");
  const auto s = x.describe_chunk("Alice manages Bob. Later text follows.");
  CHECK_FALSE(s.title.empty());
  CHECK_FALSE(s.description.empty());
}

TEST_CASE("pass-through scorer and echo generator") {
  PassThroughScorer scorer(10, default_tokenizer());
  const auto r = scorer.score("q", std::string(100, 'a'), 0.42);
  CHECK(r.relevance == 0.42);
  CHECK(r.report.size() == 40);
  CHECK(scorer.score("q", "x", -0.3).relevance == 0.0);
  CHECK(scorer.score("q", "x", 1.7).relevance == 1.0);
  CHECK(clamp_unit(std::nan("")) == 0.0);
  EchoGenerator g;
  CHECK(g.generate("q", "ctx") == std::string(kEchoHeader) + "ctx");
  CHECK(g.generate("q", "") == kRefusal);
}

TEST_CASE("provider factory") {
  const auto p = make_providers(Config{});
  CHECK(p.embedder->dimension() == 1536);
  Config remote;
  remote.provider = ProviderMode::remote;
  CHECK_THROWS_AS(make_providers(remote), InvalidInput);
}

TEST_CASE("remote record parsing") {
  const auto p = parse_extraction(
      "entity<|>Alice<|>A manager\n"
      "garbage line\n"
      "entity<|>Bob<|>An engineer\n"
      "relation<|>Alice<|>Bob<|>manages<|>Alice manages Bob\n"
      "relation<|>Alice<|>Carol<|>knows<|>unknown endpoint\n"
      "relation<|>short\n");
  REQUIRE(p.has_value());
  CHECK(p->entities.size() == 2);
  REQUIRE(p->relations.size() == 1);
  CHECK(p->relations[0].label == "manages");
  CHECK_FALSE(parse_extraction("nothing useful here").has_value());
  const auto none = parse_extraction("NONE");
  REQUIRE(none.has_value());
  CHECK(none->entities.empty());

  const auto s = parse_score("SCORE: 0.9\nThe body.\n");
  REQUIRE(s.has_value());
  CHECK(s->relevance == 0.9);
  CHECK(s->report.find("The body.") != std::string::npos);
  CHECK_FALSE(parse_score("SCORE: 1.5\nbody").has_value());
  CHECK_FALSE(parse_score("no score").has_value());
  CHECK_FALSE(parse_score("SCORE: abc").has_value());

  CHECK(fill_prompt("Q: {question} / {question} {missing}", {{"question", "why"}}) == "Q: why / why {missing}");
}

TEST_CASE("parallel_map keeps order and rethrows the lowest failing index") {
  const auto squares = parallel_map(100, 8, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < 100; ++i) CHECK(squares[i] == i * i);
  try {
    parallel_map(50, 4, [](std::size_t i) -> int {
      if (i == 7 || i == 30) throw InvalidInput(std::to_string(i));
      return 0;
    });
    FAIL("expected a throw");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()) == "7");
  }
  CHECK(parallel_map(0, 4, [](std::size_t) { return 1; }).empty());
}
