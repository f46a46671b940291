#pragma once

// Online coarse-to-fine retrieval over a LayeredIndex.

#include <string>
#include <vector>

#include "trussrag/eacs.hpp"
#include "trussrag/index.hpp"
#include "trussrag/providers.hpp"

namespace trussrag {

inline constexpr int kResultSchemaVersion = 1;

struct RetrievalOptions {
  std::size_t context_budget = 4800;
  std::size_t report_budget = 3200;
  std::size_t text_unit_budget = 4000;
  int k_max = 0;  // 0 = infer per layer
  int k_max_cap = 10;
  std::size_t fallback_top_m = 5;
  int workers = 16;
};

RetrievalOptions retrieval_options(const Config& config);

struct WorkingSubgraphs {
  AttributedGraph kg_work;
  AttributedGraph sim_work;
  std::vector<std::string> v_work;  // entity ids, kg_layer order
};

// Candidates on one layer, each scored and rendered into a report.
std::vector<CandidateReport> score_candidates(const AttributedGraph& g, Layer layer,
                                              const QueryEmbedding& q, const std::string& question,
                                              const LayeredIndex& idx, const Providers& providers,
                                              const RetrievalOptions& options);

// Union of the selected communities; k is the smallest selected k.
Community union_community(const AttributedGraph& g, const std::vector<CandidateReport>& selected,
                          const QueryEmbedding& q, Layer layer);

struct CoarseResult {
  Community h_c;
  std::vector<CandidateReport> selected;
  bool fallback = false;
};

CoarseResult coarse_retrieve(const LayeredIndex& idx, const QueryEmbedding& q,
                             const std::string& question, const Providers& providers,
                             const RetrievalOptions& options);

WorkingSubgraphs build_working_subgraphs(const LayeredIndex& idx, const Community& h_c);

struct FineResult {
  Community h_kg;
  Community h_s;
  std::vector<CandidateReport> kg_selected;
  std::vector<CandidateReport> sim_selected;
};

FineResult fine_retrieve(const WorkingSubgraphs& work, const QueryEmbedding& q,
                         const std::string& question, const LayeredIndex& idx,
                         const Providers& providers, const RetrievalOptions& options);

// Textual form of a community handed to the scorer.
std::string render_community(const AttributedGraph& g, const Community& c, const LayeredIndex& idx);

// A selected report with its community expressed as node ids.
struct PackedReport {
  CandidateReport report;
  std::vector<std::string> node_ids;
};

struct ContextParts {
  std::vector<PackedReport> chunk_reports;
  std::vector<PackedReport> kg_reports;
  std::vector<PackedReport> sim_reports;
  std::vector<const Chunk*> excerpts;
};

struct AssembledContext {
  std::string text;
  std::vector<PackedReport> packed;  // in packed order
  std::size_t budget_used = 0;
};

// Sections in order: chunk anchors, knowledge-graph communities, similarity
// communities, source excerpts. A piece enters only if the whole context
// still fits `budget`; excerpts are cut to the text-unit budget and to what
// is left.
AssembledContext assemble_context(const ContextParts& parts, std::size_t budget,
                                  std::size_t text_unit_budget, const Tokenizer& tokenizer);

std::string answer(const std::string& context, const std::string& question, Generator& generator);

struct RetrievalResult {
  std::string question;
  Community h_c;
  Community h_kg;
  Community h_s;
  std::vector<std::string> h_c_ids, h_kg_ids, h_s_ids;
  bool coarse_fallback = false;
  std::vector<PackedReport> selected_reports;  // those that made it into the context
  std::string context;
  std::size_t budget = 0;
  std::size_t budget_used = 0;
  std::string answer;
};

QueryEmbedding embed_query(const std::string& question, Embedder& embedder);

RetrievalResult retrieve(const LayeredIndex& idx, const std::string& question,
                         const Providers& providers, const RetrievalOptions& options);

// Versioned JSON (sorted keys, two-space indent).
std::string result_json(const RetrievalResult& result);

}  // namespace trussrag
