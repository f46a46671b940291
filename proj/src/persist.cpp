#include <bit>
#include <json.hpp>

#include "trussrag/error.hpp"
#include "trussrag/index.hpp"

namespace trussrag {

using json = nlohmann::ordered_json;

namespace {

std::string encode_vector(const std::vector<float>& v) {
  std::string bytes;
  bytes.reserve(v.size() * 4);
  for (float x : v) {
    const auto bits = std::bit_cast<std::uint32_t>(x);
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }
  return base64_encode(bytes);
}

std::vector<float> decode_vector(const std::string& text) {
  const std::string bytes = base64_decode(text);
  if (bytes.size() % 4 != 0) throw InvalidInput("embedding byte length is not a multiple of 4");
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b)
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 * i + b])) << (8 * b);
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

json edges_json(const AttributedGraph& g) {
  json out = json::array();
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    const EdgeAttr& a = g.edge_attr(e);
    out.push_back(json::array({ed.u, ed.v, a.label, a.weight}));
  }
  return out;
}

void add_edges(GraphBuilder& b, const json& edges, std::size_t n) {
  for (const auto& e : edges) {
    const auto u = e.at(0).get<NodeIndex>(), v = e.at(1).get<NodeIndex>();
    if (u >= n || v >= n) throw InvalidInput("edge endpoint out of range");
    b.add_edge(u, v, {e.at(2).get<std::string>(), e.at(3).get<double>()});
  }
}

json id_map_json(const IdSetMap& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[k] = v;
  return out;
}

IdSetMap id_map_from(const json& j) {
  IdSetMap out;
  for (const auto& [k, v] : j.items()) out[k] = v.get<std::vector<std::string>>();
  return out;
}

}  // namespace

std::string serialize_index(const LayeredIndex& idx) {
  json doc;
  doc["format_version"] = idx.format_version;
  doc["prompt_version"] = idx.prompt_version;
  doc["config"] = json(idx.config);
  json chunks = json::array();
  for (const auto& c : idx.chunks) {
    chunks.push_back({{"id", c.id},
                      {"source_doc", c.source_doc},
                      {"span", json::array({c.char_span.first, c.char_span.second})},
                      {"title", c.title},
                      {"description", c.description},
                      {"text", c.text},
                      {"embedding", encode_vector(c.embedding)}});
  }
  doc["chunks"] = std::move(chunks);
  doc["chunk_edges"] = edges_json(idx.chunk_layer);
  json entities = json::array();
  for (const auto& r : idx.kg_layer.nodes()) {
    entities.push_back({{"id", r.id},
                        {"name", r.name},
                        {"description", r.description},
                        {"embedding", encode_vector(r.embedding)}});
  }
  doc["entities"] = std::move(entities);
  doc["kg_edges"] = edges_json(idx.kg_layer);
  doc["sim_edges"] = edges_json(idx.sim_layer);
  doc["inter_links"] = id_map_json(idx.inter_links);
  doc["provenance"] = id_map_json(idx.provenance);
  return doc.dump(1) + "\n";
}

LayeredIndex deserialize_index(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed index file: ") + e.what(), e.byte);
  }
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kIndexFormatVersion) throw UnsupportedVersion(version);
    LayeredIndex idx;
    idx.format_version = version;
    idx.prompt_version = doc.at("prompt_version").get<std::string>();
    idx.config = doc.at("config").get<std::map<std::string, std::string>>();

    GraphBuilder cb;
    for (const auto& c : doc.at("chunks")) {
      Chunk ch;
      ch.id = c.at("id").get<std::string>();
      ch.source_doc = c.at("source_doc").get<std::string>();
      ch.char_span = {c.at("span").at(0).get<std::size_t>(), c.at("span").at(1).get<std::size_t>()};
      ch.title = c.at("title").get<std::string>();
      ch.description = c.at("description").get<std::string>();
      ch.text = c.at("text").get<std::string>();
      ch.embedding = decode_vector(c.at("embedding").get<std::string>());
      cb.add_node({ch.id, NodeKind::chunk, ch.title, ch.description, ch.embedding});
      idx.chunks.push_back(std::move(ch));
    }
    add_edges(cb, doc.at("chunk_edges"), idx.chunks.size());
    idx.chunk_layer = std::move(cb).build();

    GraphBuilder kb, sb;
    for (const auto& e : doc.at("entities")) {
      NodeRecord r{e.at("id").get<std::string>(), NodeKind::entity, e.at("name").get<std::string>(),
                   e.at("description").get<std::string>(),
                   decode_vector(e.at("embedding").get<std::string>())};
      kb.add_node(r);
      sb.add_node(std::move(r));
    }
    const std::size_t n = kb.node_count();
    add_edges(kb, doc.at("kg_edges"), n);
    add_edges(sb, doc.at("sim_edges"), n);
    idx.kg_layer = std::move(kb).build();
    idx.sim_layer = std::move(sb).build();
    idx.inter_links = id_map_from(doc.at("inter_links"));
    idx.provenance = id_map_from(doc.at("provenance"));
    return idx;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid index structure: ") + e.what(), 0);
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("invalid index content: ") + e.what(), 0);
  }
}

void save_index(const LayeredIndex& idx, const std::string& path) {
  write_file(path, serialize_index(idx));
}

LayeredIndex load_index(const std::string& path) { return deserialize_index(read_file(path)); }

std::string content_hash(const LayeredIndex& idx) { return hex64(fnv1a64(serialize_index(idx))); }

}  // namespace trussrag
