#include "trussrag/index.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <unordered_map>

#include "trussrag/error.hpp"
#include "trussrag/kernels.hpp"
#include "trussrag/parallel.hpp"

namespace trussrag {

std::string chunk_id(std::size_t ordinal) {
  std::string digits = std::to_string(ordinal);
  if (digits.size() < 5) digits.insert(0, 5 - digits.size(), '0');
  return "c" + digits;
}

LocalKG extract_chunk_kg(const std::string& id, std::string_view text, Extractor& extractor) {
  LocalKG out;
  out.chunk_id = id;
  const ExtractionPayload payload = extractor.extract(text);
  std::set<std::string> seen;
  for (const auto& e : payload.entities) {
    std::string key = normalize_name(e.name);
    if (key.empty() || !seen.insert(key).second) continue;
    NodeRecord r;
    r.id = std::move(key);
    r.kind = NodeKind::entity;
    r.name = collapse_whitespace(e.name);
    r.description = collapse_whitespace(e.description);
    out.entities.push_back(std::move(r));
  }
  for (const auto& rel : payload.relations) {
    std::string a = normalize_name(rel.source), b = normalize_name(rel.target);
    if (a == b || !seen.count(a) || !seen.count(b)) continue;
    out.relations.push_back({std::move(a), std::move(b), rel.label, rel.description});
  }
  return out;
}

namespace {

struct MergedEntity {
  std::string name;
  std::vector<std::string> descriptions;
  std::vector<std::string> chunks;
};

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

MergedKG merge_global_kg(const std::vector<LocalKG>& locals, Embedder& embedder) {
  std::vector<std::string> order;
  std::unordered_map<std::string, MergedEntity> entities;
  for (const auto& local : locals) {
    for (const auto& e : local.entities) {
      auto [it, fresh] = entities.try_emplace(e.id);
      if (fresh) {
        order.push_back(e.id);
        it->second.name = e.name;
      }
      auto& m = it->second;
      if (!e.description.empty() &&
          std::find(m.descriptions.begin(), m.descriptions.end(), e.description) == m.descriptions.end())
        m.descriptions.push_back(e.description);
      if (m.chunks.empty() || m.chunks.back() != local.chunk_id) m.chunks.push_back(local.chunk_id);
    }
  }

  std::vector<std::string> texts;
  texts.reserve(order.size());
  for (const auto& id : order) {
    const auto& m = entities.at(id);
    texts.push_back(m.name + ": " + join(m.descriptions, " "));
  }
  const auto vectors = texts.empty() ? std::vector<std::vector<float>>{} : embedder.embed(texts);

  MergedKG out;
  GraphBuilder b;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& m = entities.at(order[i]);
    b.add_node({order[i], NodeKind::entity, m.name, join(m.descriptions, " "), vectors[i]});
    out.provenance[order[i]] = m.chunks;
  }

  std::map<std::pair<std::string, std::string>, std::pair<std::set<std::string>, int>> relations;
  for (const auto& local : locals) {
    for (const auto& r : local.relations) {
      auto key = std::minmax(r.source, r.target);
      auto& slot = relations[{key.first, key.second}];
      slot.first.insert(r.label);
      ++slot.second;
    }
  }
  for (const auto& [key, value] : relations) {
    const std::vector<std::string> labels(value.first.begin(), value.first.end());
    b.add_edge(key.first, key.second, {join(labels, ";"), static_cast<double>(value.second)});
  }
  out.kg_layer = std::move(b).build();
  return out;
}

std::vector<Edge> build_intra_chunk_edges(const std::vector<LocalKG>& locals, const MergedKG& merged) {
  std::unordered_map<std::string, NodeIndex> chunk_index;
  for (std::size_t i = 0; i < locals.size(); ++i)
    chunk_index.emplace(locals[i].chunk_id, static_cast<NodeIndex>(i));
  const auto& g = merged.kg_layer;
  std::vector<std::vector<NodeIndex>> prov(g.node_count());
  for (NodeIndex v = 0; v < g.node_count(); ++v)
    for (const auto& c : merged.provenance.at(g.node(v).id)) prov[v].push_back(chunk_index.at(c));

  std::set<Edge> edges;
  for (const Edge& e : g.edges())
    for (NodeIndex i : prov[e.u])
      for (NodeIndex j : prov[e.v])
        if (i != j) edges.insert({std::min(i, j), std::max(i, j)});
  return {edges.begin(), edges.end()};
}

AttributedGraph build_similarity_layer(const AttributedGraph& kg_layer, int k_neighbor) {
  if (k_neighbor < 1) throw InvalidInput("k_neighbor must be >= 1");
  GraphBuilder b;
  for (const auto& r : kg_layer.nodes()) b.add_node(r);
  if (kg_layer.node_count() > 1 && kg_layer.dimension() > 0) {
    const auto topk = knn_top_k(kg_layer, static_cast<std::size_t>(k_neighbor));
    std::set<Edge> edges;
    for (NodeIndex u = 0; u < topk.size(); ++u)
      for (NodeIndex v : topk[u]) edges.insert({std::min(u, v), std::max(u, v)});
    for (const Edge& e : edges)
      b.add_edge(e.u, e.v, {"similar", cosine(kg_layer.embedding(e.u), kg_layer.embedding(e.v))});
  }
  return std::move(b).build();
}

IdSetMap build_inter_links(const std::vector<LocalKG>& locals) {
  IdSetMap out;
  for (const auto& local : locals) {
    std::vector<std::string> ids;
    for (const auto& e : local.entities) ids.push_back(e.id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    out[local.chunk_id] = std::move(ids);
  }
  return out;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

LayeredIndex build_index(const std::vector<Document>& docs, const Config& config,
                         const Providers& providers, BuildStats* stats) {
  validate(config);
  BuildStats local_stats;
  auto t0 = std::chrono::steady_clock::now();
  auto chunker = make_chunker(config, *providers.embedder, *providers.tokenizer);
  const std::vector<ChunkSpan> spans = chunk_corpus(docs, *chunker);
  local_stats.chunk_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  struct Extracted {
    ChunkSummary summary;
    LocalKG kg;
  };
  const auto extracted = parallel_map(spans.size(), config.workers, [&](std::size_t i) {
    return Extracted{providers.extractor->describe_chunk(spans[i].text),
                     extract_chunk_kg(chunk_id(i), spans[i].text, *providers.extractor)};
  });
  std::vector<LocalKG> locals;
  locals.reserve(extracted.size());
  for (const auto& e : extracted) locals.push_back(e.kg);
  local_stats.extract_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  LayeredIndex idx;
  idx.config = build_settings(config);
  std::vector<std::string> chunk_texts;
  for (const auto& e : extracted) chunk_texts.push_back(e.summary.title + ": " + e.summary.description);
  auto chunk_vectors = providers.embedder->embed(chunk_texts);
  for (std::size_t i = 0; i < spans.size(); ++i) {
    idx.chunks.push_back({chunk_id(i), spans[i].source_doc, {spans[i].begin, spans[i].end}, spans[i].text,
                          extracted[i].summary.title, extracted[i].summary.description,
                          std::move(chunk_vectors[i])});
  }
  MergedKG merged = merge_global_kg(locals, *providers.embedder);
  local_stats.merge_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  GraphBuilder cb;
  for (const auto& c : idx.chunks) cb.add_node({c.id, NodeKind::chunk, c.title, c.description, c.embedding});
  for (const Edge& e : build_intra_chunk_edges(locals, merged)) cb.add_edge(e.u, e.v, {"kg", 1.0});
  idx.chunk_layer = std::move(cb).build();
  idx.sim_layer = build_similarity_layer(merged.kg_layer, config.k_neighbor);
  idx.kg_layer = std::move(merged.kg_layer);
  idx.provenance = std::move(merged.provenance);
  idx.inter_links = build_inter_links(locals);
  local_stats.layer_seconds = seconds_since(t0);
  if (stats) *stats = local_stats;
  return idx;
}

}  // namespace trussrag
