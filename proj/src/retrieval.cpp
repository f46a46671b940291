#include "trussrag/retrieval.hpp"

#include <algorithm>
#include <iomanip>
#include <json.hpp>
#include <set>
#include <sstream>

#include "trussrag/error.hpp"
#include "trussrag/kernels.hpp"
#include "trussrag/parallel.hpp"

namespace trussrag {

RetrievalOptions retrieval_options(const Config& c) {
  RetrievalOptions o;
  o.context_budget = static_cast<std::size_t>(c.context_budget);
  o.report_budget = static_cast<std::size_t>(c.community_report_budget);
  o.text_unit_budget = static_cast<std::size_t>(c.text_unit_budget);
  o.k_max = c.k_max;
  o.k_max_cap = c.k_max_cap;
  o.fallback_top_m = static_cast<std::size_t>(c.fallback_top_m);
  o.workers = c.max_parallel;
  return o;
}

namespace {

std::string fixed4(double x) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << x;
  return out.str();
}

std::string excerpt(std::string_view s, std::size_t bytes) {
  s = trim(s);
  if (s.size() <= bytes) return std::string(s);
  return std::string(s.substr(0, utf8_floor(s, bytes))) + "...";
}

std::vector<std::string> ids_of(const AttributedGraph& g, const NodeSet& nodes) {
  return node_ids(g, nodes);
}

}  // namespace

std::string render_community(const AttributedGraph& g, const Community& c, const LayeredIndex& idx) {
  std::string out = "Layer: " + std::string(layer_name(c.layer)) + ", k=" + std::to_string(c.k) +
                    ", QRScore=" + fixed4(c.score) + "\n";
  if (c.layer == Layer::chunk) {
    out += "Chunks:\n";
    for (NodeIndex v : c.nodes) {
      const auto& r = g.node(v);
      out += "- [" + r.id + "] " + r.name + ": " + excerpt(r.description, 300) + "\n";
    }
    return out;
  }
  out += "Entities:\n";
  for (NodeIndex v : c.nodes) {
    const auto& r = g.node(v);
    out += "- " + r.name + ": " + excerpt(r.description, 300) + "\n";
  }
  out += c.layer == Layer::kg ? "Relations:\n" : "Similar pairs:\n";
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < c.nodes.size(); ++j) {
      const auto e = g.find_edge(c.nodes[i], c.nodes[j]);
      if (!e) continue;
      const auto& a = g.node(c.nodes[i]).name;
      const auto& b = g.node(c.nodes[j]).name;
      if (c.layer == Layer::kg) out += "- " + a + " -[" + g.edge_attr(*e).label + "]- " + b + "\n";
      else out += "- " + a + " ~ " + b + " (" + fixed4(g.edge_attr(*e).weight) + ")\n";
    }
  }
  std::set<std::string> sources;
  for (NodeIndex v : c.nodes)
    if (auto it = idx.provenance.find(g.node(v).id); it != idx.provenance.end())
      sources.insert(it->second.begin(), it->second.end());
  if (!sources.empty()) {
    out += "Sources:";
    for (const auto& id : sources) {
      const auto node = idx.chunk_layer.find(id);
      out += " [" + id + "] " + (node ? idx.chunk_layer.node(*node).name : std::string()) + ";";
    }
    out += "\n";
  }
  return out;
}

std::vector<CandidateReport> score_candidates(const AttributedGraph& g, Layer layer,
                                              const QueryEmbedding& q, const std::string& question,
                                              const LayeredIndex& idx, const Providers& providers,
                                              const RetrievalOptions& options) {
  if (g.node_count() < 3 || g.edge_count() < 3) return {};
  const std::vector<double> relevance = query_relevance(g, q);
  const int k_max = options.k_max > 0 ? options.k_max : infer_k_max(g, options.k_max_cap);
  if (k_max < 3) return {};
  std::vector<Community> communities = generate_candidates(g, relevance, k_max);
  for (auto& c : communities) c.layer = layer;
  return parallel_map(communities.size(), options.workers, [&](std::size_t i) {
    const Community& c = communities[i];
    const ScoreResult s = providers.scorer->score(question, render_community(g, c, idx), c.score);
    CandidateReport r;
    r.k = c.k;
    r.community = c;
    r.relevance = clamp_unit(s.relevance);
    r.report = std::string(providers.tokenizer->truncate(s.report, options.report_budget));
    r.report_tokens = providers.tokenizer->count(r.report);
    return r;
  });
}

Community union_community(const AttributedGraph& g, const std::vector<CandidateReport>& selected,
                          const QueryEmbedding& q, Layer layer) {
  Community out;
  out.layer = layer;
  if (selected.empty()) return out;
  std::set<NodeIndex> nodes;
  int k = selected.front().k;
  for (const auto& r : selected) {
    nodes.insert(r.community.nodes.begin(), r.community.nodes.end());
    k = std::min(k, r.k);
  }
  out.nodes.assign(nodes.begin(), nodes.end());
  out.k = k;
  out.score = qr_score(g, out.nodes, q);
  return out;
}

CoarseResult coarse_retrieve(const LayeredIndex& idx, const QueryEmbedding& q,
                             const std::string& question, const Providers& providers,
                             const RetrievalOptions& options) {
  if (idx.chunks.empty()) throw InvalidInput("index holds no chunks");
  const AttributedGraph& g = idx.chunk_layer;
  CoarseResult out;
  auto candidates = score_candidates(g, Layer::chunk, q, question, idx, providers, options);
  if (candidates.empty()) {
    out.fallback = true;
    const std::vector<double> rel = query_relevance(g, q);
    std::vector<NodeIndex> order(g.node_count());
    for (NodeIndex v = 0; v < order.size(); ++v) order[v] = v;
    std::stable_sort(order.begin(), order.end(), [&](NodeIndex a, NodeIndex b) { return rel[a] > rel[b]; });
    order.resize(std::min(order.size(), options.fallback_top_m));
    std::sort(order.begin(), order.end());
    out.h_c.layer = Layer::chunk;
    out.h_c.k = 0;
    out.h_c.nodes = order;
    if (!order.empty()) out.h_c.score = qr_score(rel, order);
    return out;
  }
  out.selected = adaptive_k_select(std::move(candidates), options.context_budget);
  out.h_c = union_community(g, out.selected, q, Layer::chunk);
  return out;
}

WorkingSubgraphs build_working_subgraphs(const LayeredIndex& idx, const Community& h_c) {
  std::set<NodeIndex> v;
  for (NodeIndex c : h_c.nodes) {
    const auto it = idx.inter_links.find(idx.chunk_layer.node(c).id);
    if (it == idx.inter_links.end()) continue;
    for (const auto& id : it->second)
      if (auto e = idx.kg_layer.find(id)) v.insert(*e);
  }
  const NodeSet nodes(v.begin(), v.end());
  WorkingSubgraphs w;
  w.kg_work = induced_subgraph(idx.kg_layer, nodes);
  w.sim_work = induced_subgraph(idx.sim_layer, nodes);
  w.v_work = node_ids(idx.kg_layer, nodes);
  return w;
}

FineResult fine_retrieve(const WorkingSubgraphs& work, const QueryEmbedding& q,
                         const std::string& question, const LayeredIndex& idx,
                         const Providers& providers, const RetrievalOptions& options) {
  FineResult out;
  out.kg_selected = adaptive_k_select(
      score_candidates(work.kg_work, Layer::kg, q, question, idx, providers, options),
      options.context_budget);
  out.h_kg = union_community(work.kg_work, out.kg_selected, q, Layer::kg);
  out.sim_selected = adaptive_k_select(
      score_candidates(work.sim_work, Layer::sim, q, question, idx, providers, options),
      options.context_budget);
  out.h_s = union_community(work.sim_work, out.sim_selected, q, Layer::sim);
  return out;
}

AssembledContext assemble_context(const ContextParts& parts, std::size_t budget,
                                  std::size_t text_unit_budget, const Tokenizer& tokenizer) {
  AssembledContext out;
  auto fits = [&](const std::string& piece) { return tokenizer.count(out.text + piece) <= budget; };

  auto pack_section = [&](const std::string& header, const std::vector<PackedReport>& reports) {
    bool started = false;
    for (const auto& p : reports) {
      const CandidateReport& r = p.report;
      std::string piece = (started ? "" : header) + "## " + layer_name(r.community.layer) +
                          " community (k=" + std::to_string(r.k) + ", relevance " +
                          fixed4(r.relevance) + ")\n" + r.report + "\n\n";
      if (!fits(piece)) continue;
      out.text += piece;
      out.packed.push_back(p);
      started = true;
    }
  };
  pack_section("# Chunk anchors\n\n", parts.chunk_reports);
  pack_section("# Knowledge-graph communities\n\n", parts.kg_reports);
  pack_section("# Similarity communities\n\n", parts.sim_reports);

  bool started = false;
  for (const Chunk* c : parts.excerpts) {
    const std::string head = std::string(started ? "" : "# Source excerpts\n\n") + "## [" + c->id +
                             "] " + c->title + " (" + c->source_doc + ")\n";
    const std::size_t used = tokenizer.count(out.text + head + "\n\n");
    if (used >= budget) continue;
    std::size_t allowance = std::min(text_unit_budget, budget - used);
    std::string body;
    while (allowance > 0) {
      body = std::string(tokenizer.truncate(trim(c->text), allowance));
      if (fits(head + body + "\n\n")) break;
      --allowance;
    }
    if (allowance == 0 || trim(body).empty()) continue;
    out.text += head + body + "\n\n";
    started = true;
  }
  out.budget_used = tokenizer.count(out.text);
  return out;
}

std::string answer(const std::string& context, const std::string& question, Generator& generator) {
  if (trim(context).empty()) return std::string(kRefusal);
  return generator.generate(question, context);
}

QueryEmbedding embed_query(const std::string& question, Embedder& embedder) {
  if (trim(question).empty()) throw InvalidInput("question is empty");
  auto vectors = embedder.embed({question});
  return {std::move(vectors.at(0)), question};
}

RetrievalResult retrieve(const LayeredIndex& idx, const std::string& question,
                         const Providers& providers, const RetrievalOptions& options) {
  RetrievalResult r;
  r.question = question;
  r.budget = options.context_budget;
  const QueryEmbedding q = embed_query(question, *providers.embedder);
  if (!idx.chunks.empty() && q.vector.size() != idx.chunk_layer.dimension())
    throw InvalidInput("query embedding dimension " + std::to_string(q.vector.size()) +
                       " does not match index dimension " +
                       std::to_string(idx.chunk_layer.dimension()));

  CoarseResult coarse = coarse_retrieve(idx, q, question, providers, options);
  WorkingSubgraphs work = build_working_subgraphs(idx, coarse.h_c);
  FineResult fine = fine_retrieve(work, q, question, idx, providers, options);

  r.h_c = coarse.h_c;
  r.h_kg = fine.h_kg;
  r.h_s = fine.h_s;
  r.h_c_ids = ids_of(idx.chunk_layer, r.h_c.nodes);
  r.h_kg_ids = ids_of(work.kg_work, r.h_kg.nodes);
  r.h_s_ids = ids_of(work.sim_work, r.h_s.nodes);
  r.coarse_fallback = coarse.fallback;

  ContextParts parts;
  for (auto& c : coarse.selected) parts.chunk_reports.push_back({c, ids_of(idx.chunk_layer, c.community.nodes)});
  for (auto& c : fine.kg_selected) parts.kg_reports.push_back({c, ids_of(work.kg_work, c.community.nodes)});
  for (auto& c : fine.sim_selected) parts.sim_reports.push_back({c, ids_of(work.sim_work, c.community.nodes)});
  for (NodeIndex v : r.h_c.nodes) parts.excerpts.push_back(&idx.chunks[v]);

  AssembledContext ctx = assemble_context(parts, options.context_budget, options.text_unit_budget,
                                          *providers.tokenizer);
  r.context = std::move(ctx.text);
  r.selected_reports = std::move(ctx.packed);
  r.budget_used = ctx.budget_used;
  r.answer = answer(r.context, question, *providers.generator);
  return r;
}

namespace {

nlohmann::json community_json(const Community& c, const std::vector<std::string>& ids) {
  nlohmann::json j;
  j["layer"] = layer_name(c.layer);
  j["k"] = c.k;
  j["score"] = c.nodes.empty() ? nlohmann::json(nullptr) : nlohmann::json(c.score);
  j["nodes"] = ids;
  return j;
}

}  // namespace

std::string result_json(const RetrievalResult& r) {
  nlohmann::json j;
  j["schema_version"] = kResultSchemaVersion;
  j["prompt_version"] = kPromptVersion;
  j["question"] = r.question;
  j["h_c"] = community_json(r.h_c, r.h_c_ids);
  j["h_c"]["fallback"] = r.coarse_fallback;
  j["h_kg"] = community_json(r.h_kg, r.h_kg_ids);
  j["h_s"] = community_json(r.h_s, r.h_s_ids);
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& p : r.selected_reports) {
    nlohmann::json rep = community_json(p.report.community, p.node_ids);
    rep["relevance"] = p.report.relevance;
    rep["report_tokens"] = p.report.report_tokens;
    rep["report"] = p.report.report;
    reports.push_back(std::move(rep));
  }
  j["selected_reports"] = std::move(reports);
  j["context"] = r.context;
  j["budget"] = r.budget;
  j["budget_used"] = r.budget_used;
  j["answer"] = r.answer;
  return j.dump(2) + "\n";
}

}  // namespace trussrag
