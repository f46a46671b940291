#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "trussrag/chunking.hpp"
#include "trussrag/error.hpp"
#include "trussrag/index.hpp"
#include "trussrag/verification.hpp"

using namespace trussrag;

namespace {

const LayeredIndex& toy_index() {
  static const LayeredIndex idx = fixture::build_toy_index(fixture::toy_config());
  return idx;
}

LocalKG local(const std::string& chunk, std::vector<std::string> names,
              std::vector<LocalRelation> relations = {}) {
  LocalKG kg;
  kg.chunk_id = chunk;
  for (auto& n : names) kg.entities.push_back({normalize_name(n), NodeKind::entity, n, n + " desc", {}});
  kg.relations = std::move(relations);
  return kg;
}

}  // namespace

TEST_CASE("one-sentence document gives one chunk") {
  HashEmbedder embedder(16, 1);
  SemanticChunker chunker(embedder, 25, 200, 1800, default_tokenizer());
  const Document doc{"a.txt", "The harbour opens at dawn."};
  const auto spans = chunker.chunk(doc);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].begin == 0);
  CHECK(spans[0].end == doc.text.size());
  CHECK(spans[0].text == doc.text);
  CHECK(chunker.chunk({"b.txt", "  \n\t "}).empty());
}

TEST_CASE("fixed chunking of a 2500-token document with size 1200 and overlap 100") {
  FixedChunker chunker(1200, 100, default_tokenizer());
  const Document doc{"long.txt", std::string(2500 * ByteTokenizer::kBytesPerToken, 'x')};
  const auto spans = chunker.chunk(doc);
  REQUIRE(spans.size() == 3);
  CHECK(spans[0].begin == 0);
  CHECK(spans[1].begin < spans[0].end);
  CHECK(spans.back().end == doc.text.size());
  for (const auto& s : spans) CHECK(default_tokenizer().count(s.text) <= 1200);
}

TEST_CASE("chunk_corpus and load_corpus errors") {
  FixedChunker chunker(100, 10, default_tokenizer());
  CHECK_THROWS_AS(chunk_corpus({}, chunker), InvalidInput);
  CHECK_THROWS_AS(chunk_corpus({{"a", "   "}}, chunker), InvalidInput);
  CHECK_THROWS_AS(load_corpus(fixture::temp_path("no_such_corpus")), NotFound);

  const auto dir = fixture::temp_path("binary_corpus");
  std::filesystem::create_directories(dir);
  std::ofstream(dir + "/bad.txt", std::ios::binary) << std::string("ok\xff\xfe", 4);
  CHECK_THROWS_AS(load_corpus(dir), InvalidInput);
  std::filesystem::remove_all(dir);
}

TEST_CASE("semantic chunks tile each toy document") {
  const auto docs = load_corpus(fixture::toy_corpus_dir());
  REQUIRE(docs.size() == 10);
  const Config config = fixture::toy_config();
  HashEmbedder embedder(config.embedding_dim, config.seed);
  auto chunker = make_chunker(config, embedder, default_tokenizer());
  const auto spans = chunk_corpus(docs, *chunker);
  std::ostringstream golden;
  std::size_t d = 0, expected_begin = 0;
  for (const auto& s : spans) {
    while (docs[d].id != s.source_doc) {
      CHECK(expected_begin == docs[d].text.size());
      ++d;
      expected_begin = 0;
    }
    CHECK(s.begin == expected_begin);
    CHECK(s.text == docs[d].text.substr(s.begin, s.end - s.begin));
    CHECK(default_tokenizer().count(s.text) <= static_cast<std::size_t>(config.max_chunk_tokens));
    expected_begin = s.end;
    golden << s.source_doc << ' ' << s.begin << ' ' << s.end << '\n';
  }
  CHECK(expected_begin == docs.back().text.size());
  CHECK(spans.size() >= 15);
  CHECK(spans.size() <= 25);
  CHECK(fixture::matches_golden("toy_chunks.txt", golden.str()));
}

TEST_CASE("extract_chunk_kg with the rule extractor") {
  RuleExtractor extractor;
  const auto kg = extract_chunk_kg("c00000", "Alice manages Bob.", extractor);
  REQUIRE(kg.entities.size() == 2);
  CHECK(kg.entities[0].id == "alice");
  CHECK(kg.entities[0].name == "Alice");
  CHECK(kg.entities[1].id == "bob");
  REQUIRE(kg.relations.size() == 1);
  CHECK(kg.relations[0].source == "alice");
  CHECK(kg.relations[0].target == "bob");
  CHECK(kg.relations[0].label == "manages");
  CHECK(kg == extract_chunk_kg("c00000", "Alice manages Bob.", extractor));

  const auto none = extract_chunk_kg("c00001", "the tide came in slowly over the flats.", extractor);
  CHECK(none.entities.empty());
  CHECK(none.relations.empty());
}

TEST_CASE("merge_global_kg") {
  HashEmbedder embedder(16, 1);
  const auto merged = merge_global_kg({local("c1", {"ACME"}), local("c2", {"Acme "})}, embedder);
  REQUIRE(merged.kg_layer.node_count() == 1);
  CHECK(merged.kg_layer.node(0).id == "acme");
  CHECK(merged.kg_layer.node(0).description == "ACME desc Acme  desc");
  CHECK(merged.provenance.at("acme") == std::vector<std::string>{"c1", "c2"});
  CHECK(merged.kg_layer.node(0).embedding == embedder.embed_one("ACME: ACME desc Acme  desc"));

  const auto disjoint = merge_global_kg({local("c1", {"A", "B"}), local("c2", {"C"})}, embedder);
  CHECK(disjoint.kg_layer.node_count() == 3);

  const auto rel = merge_global_kg({local("c1", {"A", "B"}, {{"a", "b", "owns", ""}}),
                                    local("c2", {"A", "B"}, {{"b", "a", "hires", ""}, {"a", "b", "owns", ""}})},
                                   embedder);
  REQUIRE(rel.kg_layer.edge_count() == 1);
  CHECK(rel.kg_layer.edge_attr(0).label == "hires;owns");
  CHECK(rel.kg_layer.edge_attr(0).weight == 3.0);
  CHECK(merge_global_kg({}, embedder).kg_layer.empty());
}

TEST_CASE("intra-chunk edges") {
  HashEmbedder embedder(16, 1);
  // c1 and c2 share "b"; the relation a-b crosses from c1's a to c2's b.
  std::vector<LocalKG> locals{local("c1", {"A", "B"}, {{"a", "b", "x", ""}}), local("c2", {"B"}),
                              local("c3", {"D"})};
  const auto merged = merge_global_kg(locals, embedder);
  CHECK(build_intra_chunk_edges(locals, merged) == std::vector<Edge>{{0, 1}});

  std::vector<LocalKG> apart{local("c1", {"A"}), local("c2", {"B"})};
  CHECK(build_intra_chunk_edges(apart, merge_global_kg(apart, embedder)).empty());
}

TEST_CASE("toy chunk layer matches a pairwise scan over global relations") {
  const auto& idx = toy_index();
  const auto& kg = idx.kg_layer;
  std::set<std::pair<std::size_t, std::size_t>> expected;
  for (std::size_t i = 0; i < idx.chunks.size(); ++i)
    for (std::size_t j = i + 1; j < idx.chunks.size(); ++j) {
      const auto& a = idx.inter_links.at(idx.chunks[i].id);
      const auto& b = idx.inter_links.at(idx.chunks[j].id);
      bool bridged = false;
      for (const auto& e : kg.edges()) {
        const auto& u = kg.node(e.u).id;
        const auto& v = kg.node(e.v).id;
        auto in = [](const std::vector<std::string>& s, const std::string& x) {
          return std::find(s.begin(), s.end(), x) != s.end();
        };
        if ((in(a, u) && in(b, v)) || (in(a, v) && in(b, u))) bridged = true;
      }
      if (bridged) expected.insert({i, j});
    }
  std::set<std::pair<std::size_t, std::size_t>> got;
  std::ostringstream golden;
  for (const auto& e : idx.chunk_layer.edges()) {
    got.insert({e.u, e.v});
    golden << idx.chunks[e.u].id << ' ' << idx.chunks[e.v].id << '\n';
  }
  CHECK(got == expected);
  CHECK(fixture::matches_golden("toy_intra_edges.txt", golden.str()));
}

TEST_CASE("toy merged graph and links are frozen") {
  const auto& idx = toy_index();
  std::ostringstream graph;
  for (const auto& n : idx.kg_layer.nodes()) graph << "node " << n.id << " | " << n.name << '\n';
  for (EdgeId e = 0; e < idx.kg_layer.edge_count(); ++e)
    graph << "edge " << idx.kg_layer.node(idx.kg_layer.edge(e).u).id << " | "
          << idx.kg_layer.node(idx.kg_layer.edge(e).v).id << " | " << idx.kg_layer.edge_attr(e).label
          << " | " << idx.kg_layer.edge_attr(e).weight << '\n';
  CHECK(fixture::matches_golden("toy_merged_graph.txt", graph.str()));

  std::ostringstream links;
  for (const auto& [chunk, ids] : idx.inter_links) {
    links << chunk << ':';
    for (const auto& id : ids) links << ' ' << id;
    links << '\n';
  }
  CHECK(fixture::matches_golden("toy_inter_links.txt", links.str()));

  // Provenance and links describe the same relation from both ends.
  for (const auto& [entity, chunks] : idx.provenance)
    for (const auto& c : chunks) {
      const auto& ids = idx.inter_links.at(c);
      CHECK(std::find(ids.begin(), ids.end(), entity) != ids.end());
    }
}

TEST_CASE("similarity layer") {
  const auto three = fixture::attributed(3, {}, {{1, 0}, {0, 1}, {0.6f, 0.8f}});
  const auto sim = build_similarity_layer(three, 5);
  CHECK(sim.edge_count() == 3);
  CHECK(sim.edge_attr(*sim.find_edge(0, 2)).weight == doctest::Approx(0.6));
  CHECK_THROWS_AS(build_similarity_layer(three, 0), InvalidInput);

  std::mt19937_64 rng(41);
  std::vector<std::vector<float>> vectors;
  for (int i = 0; i < 50; ++i) vectors.push_back(random_unit_vector(8, rng));
  const auto g = fixture::attributed(50, {}, vectors);
  for (int k : {1, 3, 5}) {
    const auto layer = build_similarity_layer(g, k);
    std::set<Edge> expected;
    const auto nn = oracle::knn(g, k);
    for (NodeIndex u = 0; u < 50; ++u)
      for (NodeIndex v : nn[u]) expected.insert({std::min(u, v), std::max(u, v)});
    CHECK(std::set<Edge>(layer.edges().begin(), layer.edges().end()) == expected);
    for (EdgeId e = 0; e < layer.edge_count(); ++e)
      CHECK(layer.edge_attr(e).weight ==
            doctest::Approx(oracle::cosine(vectors[layer.edge(e).u], vectors[layer.edge(e).v])));
  }
}

TEST_CASE("inter links") {
  const auto links = build_inter_links({local("c1", {}), local("c2", {"B", "A"})});
  CHECK(links.at("c1").empty());
  CHECK(links.at("c2") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("persistence round trips") {
  const LayeredIndex empty;
  CHECK(deserialize_index(serialize_index(empty)) == empty);

  const auto& idx = toy_index();
  const auto path = fixture::temp_path("toy.index.json");
  save_index(idx, path);
  const auto loaded = load_index(path);
  CHECK(loaded == idx);
  CHECK(content_hash(loaded) == content_hash(idx));
  CHECK(fixture::matches_golden("toy_index_hash.txt", content_hash(idx) + "\n"));
  CHECK_THROWS_AS(load_index(fixture::temp_path("missing.json")), NotFound);
}

TEST_CASE("persistence rejects other versions and corrupt files") {
  LayeredIndex future;
  future.format_version = kIndexFormatVersion + 1;
  try {
    deserialize_index(serialize_index(future));
    FAIL("expected UnsupportedVersion");
  } catch (const UnsupportedVersion& e) {
    CHECK(e.version() == kIndexFormatVersion + 1);
  }

  const std::string text = serialize_index(toy_index());
  const std::string truncated = text.substr(0, 200);
  try {
    deserialize_index(truncated);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.byte_offset() == 201);
  }
  CHECK_THROWS_AS(deserialize_index("{\"format_version\": 1}"), ParseError);
  CHECK_THROWS_AS(deserialize_index(""), ParseError);
}

TEST_CASE("the api key never reaches the index") {
  Config config = fixture::toy_config();
  config.api_key = "sk-test-secret-value";
  const auto idx = fixture::build_toy_index(config);
  CHECK(serialize_index(idx).find("sk-test-secret-value") == std::string::npos);
  CHECK(idx.config.count("api_key") == 0);
}

TEST_CASE("index build does not depend on worker count") {
  const auto one = fixture::build_toy_index(fixture::toy_config(1));
  CHECK(serialize_index(one) == serialize_index(toy_index()));
}
