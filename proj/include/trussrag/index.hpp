#pragma once

// The three-layer index: chunk layer, global knowledge graph and the KNN
// similarity layer over the same entities, plus chunk-to-entity links.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "trussrag/chunking.hpp"
#include "trussrag/config.hpp"
#include "trussrag/graph.hpp"
#include "trussrag/providers.hpp"

namespace trussrag {

inline constexpr int kIndexFormatVersion = 1;

struct Chunk {
  std::string id;
  std::string source_doc;
  std::pair<std::size_t, std::size_t> char_span;  // byte offsets in the document
  std::string text;
  std::string title;
  std::string description;
  std::vector<float> embedding;

  bool operator==(const Chunk&) const = default;
};

struct LocalRelation {
  std::string source;  // entity ids
  std::string target;
  std::string label;
  std::string description;

  bool operator==(const LocalRelation&) const = default;
};

// Entities carry id = normalized name and no embedding yet.
struct LocalKG {
  std::string chunk_id;
  std::vector<NodeRecord> entities;
  std::vector<LocalRelation> relations;

  bool operator==(const LocalKG&) const = default;
};

using IdSetMap = std::map<std::string, std::vector<std::string>>;

struct LayeredIndex {
  int format_version = kIndexFormatVersion;
  std::string prompt_version = kPromptVersion;
  std::map<std::string, std::string> config;
  std::vector<Chunk> chunks;
  AttributedGraph chunk_layer;  // node i is chunks[i]
  AttributedGraph kg_layer;
  AttributedGraph sim_layer;    // same nodes as kg_layer
  IdSetMap inter_links;         // chunk id -> entity ids, sorted
  IdSetMap provenance;          // entity id -> chunk ids, chunk order

  bool operator==(const LayeredIndex&) const = default;
};

std::string chunk_id(std::size_t ordinal);

LocalKG extract_chunk_kg(const std::string& chunk_id, std::string_view text, Extractor& extractor);

struct MergedKG {
  AttributedGraph kg_layer;
  IdSetMap provenance;
};

// Entities merged by normalized name in order of first appearance;
// descriptions joined in chunk order; one edge per entity pair carrying the
// sorted union of labels, weight = number of merged relations.
MergedKG merge_global_kg(const std::vector<LocalKG>& locals, Embedder& embedder);

// Chunk pairs (i != j) bridged by a global relation between an entity of i
// and an entity of j. Pairs are chunk indices with first < second, sorted.
std::vector<Edge> build_intra_chunk_edges(const std::vector<LocalKG>& locals, const MergedKG& merged);

// Union-of-top-k KNN graph over the KG entities; edge weight = cosine.
AttributedGraph build_similarity_layer(const AttributedGraph& kg_layer, int k_neighbor);

IdSetMap build_inter_links(const std::vector<LocalKG>& locals);

struct BuildStats {
  double chunk_seconds = 0;
  double extract_seconds = 0;
  double merge_seconds = 0;
  double layer_seconds = 0;
};

LayeredIndex build_index(const std::vector<Document>& docs, const Config& config,
                         const Providers& providers, BuildStats* stats = nullptr);

// Persistence as versioned JSON. Loading rejects other format versions with
// UnsupportedVersion and malformed files with ParseError.
std::string serialize_index(const LayeredIndex& idx);
LayeredIndex deserialize_index(const std::string& text);
void save_index(const LayeredIndex& idx, const std::string& path);
LayeredIndex load_index(const std::string& path);

// FNV-1a of the serialized form, as 16 hex digits.
std::string content_hash(const LayeredIndex& idx);

}  // namespace trussrag
