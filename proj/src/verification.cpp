#include "trussrag/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "trussrag/error.hpp"
#include "trussrag/kernels.hpp"
#include "trussrag/small_graph.hpp"
#include "trussrag/truss.hpp"

namespace trussrag {

BoundCheck density_bound(const AttributedGraph& h, int k) {
  if (h.node_count() < 2) throw InvalidInput("density bound needs at least two nodes");
  std::vector<NodeIndex> all(h.node_count());
  for (NodeIndex v = 0; v < all.size(); ++v) all[v] = v;
  BoundCheck c;
  c.value = graph_metrics(h, all).density;
  c.bound = static_cast<double>(k - 1) / static_cast<double>(h.node_count() - 1);
  c.holds = c.value >= c.bound - kBoundTolerance;
  return c;
}

bool check_density_bound(const AttributedGraph& h, int k) { return density_bound(h, k).holds; }

BoundCheck diameter_bound(const AttributedGraph& h, int k) {
  if (h.empty()) throw InvalidInput("diameter bound of an empty graph");
  std::vector<NodeIndex> all(h.node_count());
  for (NodeIndex v = 0; v < all.size(); ++v) all[v] = v;
  const GraphMetrics m = graph_metrics(h, all);
  if (!m.all_pairs_reachable) throw InvalidInput("diameter bound requires a connected graph");
  BoundCheck c;
  c.value = m.diameter;
  c.bound = std::floor(static_cast<double>(2 * h.node_count() - 2) / k);
  c.holds = c.value <= c.bound;
  return c;
}

bool check_diameter_bound(const AttributedGraph& h, int k) { return diameter_bound(h, k).holds; }

FreeRiderReport check_free_rider(const AttributedGraph& g, const QueryEmbedding& q, int k,
                                 std::size_t trials, std::uint64_t seed, std::size_t cap) {
  const auto rel = query_relevance(g, q);
  const Community h = brute_force_eacs(g, rel, k, cap);
  FreeRiderReport report;
  report.optimum = h.nodes;
  report.optimum_score = h.score;

  const SmallGraph sg(g);
  SmallGraph::Mask inside = 0;
  for (NodeIndex v : h.nodes) inside |= SmallGraph::Mask{1} << v;
  const SmallGraph::Mask outside = sg.all() & ~inside;
  const int free_bits = std::popcount(outside);
  if (free_bits == 0) {
    report.exhaustive = true;
    return report;
  }

  auto examine = [&](SmallGraph::Mask s) {
    ++report.sampled;
    const SmallGraph::Mask u = s | inside;
    if (!sg.spanning_k_truss(u, k)) return;
    ++report.testable;
    const double score = qr_score(rel, SmallGraph::to_nodes(u));
    const double margin = score - h.score;
    if (!report.worst_margin || margin > *report.worst_margin) report.worst_margin = margin;
    if (!(score < h.score)) ++report.violations;
  };

  // Sub-masks of `outside` enumerate every S ⊄ V_h that adds new nodes.
  const std::size_t total = (std::size_t{1} << free_bits) - 1;
  if (trials >= total) {
    report.exhaustive = true;
    for (SmallGraph::Mask s = outside; s != 0; s = (s - 1) & outside) examine(s);
  } else {
    std::mt19937_64 rng(seed);
    std::vector<NodeIndex> free_nodes = SmallGraph::to_nodes(outside);
    std::uniform_int_distribution<std::uint64_t> pick(1, total);
    for (std::size_t t = 0; t < trials; ++t) {
      const std::uint64_t bits = pick(rng);
      SmallGraph::Mask s = 0;
      for (int b = 0; b < free_bits; ++b)
        if (bits >> b & 1) s |= SmallGraph::Mask{1} << free_nodes[b];
      examine(s);
    }
  }
  return report;
}

ReductionInstance build_reduction_instance(const AttributedGraph& plain, int k_prime,
                                           std::size_t dim) {
  if (dim == 0) throw InvalidInput("reduction instance needs dimension >= 1");
  std::vector<float> e1(dim, 0.0f);
  e1[0] = 1.0f;
  GraphBuilder b;
  for (const NodeRecord& r : plain.nodes()) {
    NodeRecord copy = r;
    copy.embedding = e1;
    b.add_node(std::move(copy));
  }
  for (const Edge& e : plain.edges()) b.add_edge(e.u, e.v);
  ReductionInstance inst;
  inst.graph = std::move(b).build();
  inst.query = QueryEmbedding{e1, "e1"};
  inst.k_t = k_prime;
  inst.delta = 1.0;
  inst.source_clique_size = k_prime;
  return inst;
}

bool eacs_decision(const ReductionInstance& inst, std::size_t cap) {
  const AttributedGraph& g = inst.graph;
  if (g.node_count() > std::min(cap, SmallGraph::kMaxNodes))
    throw CapExceeded(g.node_count(), std::min(cap, SmallGraph::kMaxNodes));
  const auto rel = query_relevance(g, inst.query);
  const SmallGraph sg(g);
  for (SmallGraph::Mask s = 1; s <= sg.all() && s != 0; ++s) {
    if (!sg.spanning_k_truss(s, inst.k_t)) continue;
    if (qr_score(rel, SmallGraph::to_nodes(s)) >= inst.delta - kBoundTolerance) return true;
  }
  return false;
}

namespace {

bool extend_clique(const AttributedGraph& g, std::vector<NodeIndex>& clique, NodeIndex from,
                   int size) {
  if (static_cast<int>(clique.size()) == size) return true;
  for (NodeIndex v = from; v < g.node_count(); ++v) {
    bool adjacent = std::all_of(clique.begin(), clique.end(),
                                [&](NodeIndex c) { return g.find_edge(c, v).has_value(); });
    if (!adjacent) continue;
    clique.push_back(v);
    if (extend_clique(g, clique, v + 1, size)) return true;
    clique.pop_back();
  }
  return false;
}

}  // namespace

bool clique_exists(const AttributedGraph& g, int size) {
  if (size <= 0) return true;
  std::vector<NodeIndex> clique;
  return extend_clique(g, clique, 0, size);
}

std::vector<float> random_unit_vector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(dim);
  double sq = 0.0;
  do {
    sq = 0.0;
    for (auto& x : v) {
      x = gauss(rng);
      sq += x * x;
    }
  } while (sq == 0.0);
  const double norm = std::sqrt(sq);
  std::vector<float> out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(v[i] / norm);
  return out;
}

namespace {

// Float rounding can leave the norm a few ulps off; renormalize in float.
void renormalize(std::vector<float>& v) {
  double sq = 0.0;
  for (float x : v) sq += static_cast<double>(x) * x;
  const double norm = std::sqrt(sq);
  for (auto& x : v) x = static_cast<float>(x / norm);
}

}  // namespace

AttributedGraph random_graph(std::size_t n, double p, std::mt19937_64& rng,
                             std::size_t embedding_dim) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (NodeIndex u = 0; u < n; ++u)
    for (NodeIndex v = u + 1; v < n; ++v)
      if (coin(rng)) edges.push_back({u, v});
  std::vector<std::vector<float>> emb;
  if (embedding_dim > 0)
    for (std::size_t i = 0; i < n; ++i) emb.push_back(random_unit_vector(embedding_dim, rng));
  return make_plain_graph(n, edges, emb);
}

AttributedGraph synthetic_probe_graph(std::size_t n, std::uint64_t seed, std::size_t dim) {
  constexpr std::size_t kBlock = 32;
  constexpr double kIntra = 0.3;
  constexpr int kCross = 2;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(kIntra);
  std::uniform_int_distribution<NodeIndex> any(0, static_cast<NodeIndex>(n - 1));
  std::normal_distribution<double> noise(0.0, 0.35);

  std::vector<Edge> edges;
  for (std::size_t start = 0; start < n; start += kBlock) {
    const std::size_t end = std::min(n, start + kBlock);
    for (auto u = static_cast<NodeIndex>(start); u < end; ++u)
      for (NodeIndex v = u + 1; v < end; ++v)
        if (coin(rng)) edges.push_back({u, v});
  }
  // Two bridge triangles between consecutive blocks keep the 3-truss in one
  // component at every n.
  for (std::size_t start = kBlock; start + 1 < n; start += kBlock) {
    const auto prev = static_cast<NodeIndex>(start - kBlock);
    for (NodeIndex j = 0; j < 2; ++j) {
      const NodeIndex a = prev + 2 * j, b = prev + 2 * j + 1, w = static_cast<NodeIndex>(start) + j;
      edges.push_back({a, b});
      edges.push_back({a, w});
      edges.push_back({b, w});
    }
  }
  for (NodeIndex u = 0; u < n; ++u)
    for (int c = 0; c < kCross; ++c) {
      NodeIndex v = any(rng);
      if (v != u) edges.push_back({std::min(u, v), std::max(u, v)});
    }

  std::vector<std::vector<float>> emb(n);
  std::vector<float> centroid;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % kBlock == 0) centroid = random_unit_vector(dim, rng);
    std::vector<float> v(dim);
    for (std::size_t d = 0; d < dim; ++d) v[d] = static_cast<float>(centroid[d] + noise(rng) / std::sqrt(double(dim)));
    renormalize(v);
    emb[i] = std::move(v);
  }
  return make_plain_graph(n, edges, emb);
}

std::optional<double> log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2 || x.size() != y.size()) return std::nullopt;
  double mx = 0, my = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

ComplexityReport complexity_probe(const std::vector<std::size_t>& sizes, std::uint64_t seed,
                                  int k, int repeats) {
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw InvalidInput("probe sizes must ascend");
  ComplexityReport report;
  std::mt19937_64 qrng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t n : sizes) {
    const AttributedGraph g = synthetic_probe_graph(n, seed);
    const QueryEmbedding q{random_unit_vector(g.dimension(), qrng), "probe"};
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, repeats); ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        (void)q_peel(g, q, k);
      } catch (const EmptyTruss&) {
      }
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      best = std::min(best, dt.count());
    }
    report.sizes.push_back(n);
    report.edges.push_back(g.edge_count());
    report.seconds.push_back(best);
  }
  std::vector<double> xs(report.sizes.begin(), report.sizes.end());
  report.slope = log_log_slope(xs, report.seconds);
  return report;
}

namespace {

void track_max(SuiteReport& r, const std::string& key, double value) {
  auto it = r.worst.find(key);
  if (it == r.worst.end() || value > it->second) r.worst[key] = value;
}

void track_min(SuiteReport& r, const std::string& key, double value) {
  auto it = r.worst.find(key);
  if (it == r.worst.end() || value < it->second) r.worst[key] = value;
}

SuiteReport bounds_suite(std::uint64_t seed, std::size_t graphs) {
  SuiteReport r{"bounds", 0, 0, {}, {}};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(4, 30);
  for (std::size_t i = 0; i < graphs; ++i) {
    const double p = (i % 2 == 0) ? 0.2 : 0.4;
    const AttributedGraph g = random_graph(size(rng), p, rng);
    const TrussIndex truss = truss_decomposition(g);
    for (int k = 3; k <= static_cast<int>(truss.max_truss()); ++k) {
      const AttributedGraph tk = maximal_k_truss(g, truss, k);
      if (tk.empty()) continue;
      ++r.instances;
      const BoundCheck whole = density_bound(tk, k);
      if (!whole.holds) ++r.failures;
      track_min(r, "density_minus_bound", whole.value - whole.bound);
      for (const NodeSet& part : connected_components(tk)) {
        const AttributedGraph h = induced_subgraph(tk, part);
        const BoundCheck d = density_bound(h, k);
        const BoundCheck dia = diameter_bound(h, k);
        if (!d.holds || !dia.holds) ++r.failures;
        track_min(r, "density_minus_bound", d.value - d.bound);
        track_max(r, "diameter_minus_bound", dia.value - dia.bound);
      }
    }
  }
  return r;
}

SuiteReport oracle_suite(std::uint64_t seed, std::size_t graphs) {
  SuiteReport r{"oracle", 0, 0, {}, {}};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(5, 12);
  std::uniform_real_distribution<double> density(0.3, 0.8);
  std::size_t skipped = 0;
  while (r.instances < graphs) {
    const int k = (r.instances % 2 == 0) ? 3 : 4;
    const AttributedGraph g = random_graph(size(rng), density(rng), rng, 8);
    const QueryEmbedding q{random_unit_vector(8, rng), "q"};
    const auto rel = query_relevance(g, q);
    PeelResult peel;
    try {
      peel = q_peel_traced(g, rel, k);
    } catch (const EmptyTruss&) {
      ++skipped;
      continue;
    }
    ++r.instances;
    const Community opt = brute_force_eacs(g, rel, k);
    bool ok = is_connected_k_truss(g, peel.best.nodes, k);
    for (const PeelTrace& t : peel.components) ok = ok && t.final_score >= t.initial_score;
    ok = ok && peel.best.score <= opt.score + kScoreTieTolerance;
    if (!ok) ++r.failures;
    track_max(r, "optimum_minus_peel", opt.score - peel.best.score);
  }
  r.notes.push_back(std::to_string(skipped) + " graphs without a k-truss redrawn");
  return r;
}

SuiteReport freerider_suite(std::uint64_t seed, std::size_t graphs) {
  SuiteReport r{"freerider", 0, 0, {}, {}};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(4, 10);
  std::uniform_real_distribution<double> density(0.4, 0.9);
  std::size_t testable = 0;
  while (r.instances < graphs) {
    const AttributedGraph g = random_graph(size(rng), density(rng), rng, 8);
    const QueryEmbedding q{random_unit_vector(8, rng), "q"};
    FreeRiderReport fr;
    try {
      fr = check_free_rider(g, q, 3, std::size_t{1} << 10);
    } catch (const EmptyTruss&) {
      continue;
    }
    ++r.instances;
    testable += fr.testable;
    r.failures += fr.violations;
    if (fr.worst_margin) track_max(r, "superset_minus_optimum", *fr.worst_margin);
  }
  r.worst["testable_supersets"] = static_cast<double>(testable);
  return r;
}

SuiteReport reduction_suite(std::uint64_t seed, std::size_t graphs) {
  SuiteReport r{"reduction", 0, 0, {}, {}};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(3, 10);
  std::uniform_real_distribution<double> density(0.2, 0.8);
  for (std::size_t i = 0; i < graphs; ++i) {
    const AttributedGraph g = random_graph(size(rng), density(rng), rng);
    for (int k = 3; k <= 5; ++k) {
      ++r.instances;
      const bool decision = eacs_decision(build_reduction_instance(g, k));
      const bool clique = clique_exists(g, k);
      if (decision != clique) {
        ++r.failures;
        r.notes.push_back("graph " + std::to_string(i) + " k'=" + std::to_string(k) +
                          ": decision=" + (decision ? "yes" : "no") +
                          " clique=" + (clique ? "yes" : "no"));
      }
    }
  }
  r.worst["agreement"] =
      r.instances == 0 ? 1.0 : 1.0 - static_cast<double>(r.failures) / r.instances;
  return r;
}

SuiteReport complexity_suite(std::uint64_t seed) {
  SuiteReport r{"complexity", 0, 0, {}, {}};
  const ComplexityReport c = complexity_probe({1000, 2000, 4000, 8000}, seed);
  r.instances = c.sizes.size();
  for (std::size_t i = 0; i < c.sizes.size(); ++i)
    r.worst["seconds_n" + std::to_string(c.sizes[i])] = c.seconds[i];
  if (c.slope) {
    r.worst["slope"] = *c.slope;
    if (*c.slope > 2.3) r.failures = 1;
  }
  return r;
}

}  // namespace

SuiteReport run_verification_suite(const std::string& suite, std::uint64_t seed,
                                   std::size_t trials) {
  auto count = [&](std::size_t fallback) { return trials == 0 ? fallback : trials; };
  if (suite == "bounds") return bounds_suite(seed, count(200));
  if (suite == "oracle") return oracle_suite(seed, count(300));
  if (suite == "freerider") return freerider_suite(seed, count(100));
  if (suite == "reduction") return reduction_suite(seed, count(1000));
  if (suite == "complexity") return complexity_suite(seed);
  throw InvalidInput("unknown verification suite '" + suite + "'");
}

}  // namespace trussrag
