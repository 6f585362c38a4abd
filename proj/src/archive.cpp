#include "mdbg/archive.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <sstream>

#include "mdbg/error.hpp"
#include "text.hpp"

namespace mdbg {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::UnwritableDirectory, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

}  // namespace

std::string file_sha256(const fs::path& path) { return sha256_hex(read_file(path)); }

nlohmann::json GraphManifest::to_json() const {
  return {{"format_version", format_version},
          {"k", k},
          {"dimensions", dimensions},
          {"alphabet_sizes", alphabet_sizes},
          {"node_count", node_count},
          {"edge_counts",
           {{"sequential", sequential_edges},
            {"hyper_undirected", hyper_edges},
            {"hyper_directed", 2 * hyper_edges},
            {"diffused", diffused_entries}}},
          {"has_diffusion", has_diffusion},
          {"discretizer_digest", discretizer_digest},
          {"input_digest", input_digest},
          {"parameters", parameters},
          {"files", files}};
}

GraphManifest GraphManifest::from_json(const nlohmann::json& doc) {
  GraphManifest m;
  try {
    m.format_version = doc.at("format_version").get<int>();
    if (m.format_version != kFormatVersion) {
      throw Error(ErrorCode::VersionMismatch, "archive format " + std::to_string(m.format_version) +
                                                  ", this build reads " + std::to_string(kFormatVersion));
    }
    m.k = doc.at("k").get<int>();
    m.dimensions = doc.at("dimensions").get<int>();
    m.alphabet_sizes = doc.at("alphabet_sizes").get<std::vector<int>>();
    m.node_count = doc.at("node_count").get<std::size_t>();
    const auto& edges = doc.at("edge_counts");
    m.sequential_edges = edges.at("sequential").get<std::size_t>();
    m.hyper_edges = edges.at("hyper_undirected").get<std::size_t>();
    m.diffused_entries = edges.at("diffused").get<std::size_t>();
    m.has_diffusion = doc.at("has_diffusion").get<bool>();
    m.discretizer_digest = doc.at("discretizer_digest").get<std::string>();
    m.input_digest = doc.at("input_digest").get<std::string>();
    m.parameters = doc.at("parameters");
    m.files = doc.at("files").get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedArchive, std::string("manifest.json: ") + e.what());
  }
  return m;
}

GraphManifest save(const MdBG& g, const DiffusedGraph* diffused, const fs::path& dir, const ArchiveMetadata& meta) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::UnwritableDirectory, "cannot create " + dir.string());

  std::map<std::string, std::string> files;
  {
    std::ostringstream out;
    out << "id,dim,symbols\n";
    for (NodeId id = 0; id < g.node_count(); ++id) {
      const auto& key = g.node(id);
      out << id << ',' << key.dim << ',';
      for (std::size_t j = 0; j < key.symbols.size(); ++j) out << (j ? "|" : "") << key.symbols[j];
      out << '\n';
    }
    files["nodes.csv"] = out.str();
  }
  {
    std::ostringstream out;
    out << "src,dst,weight\n";
    for (const auto& e : g.sequential_edges()) out << e.src << ',' << e.dst << ',' << e.weight << '\n';
    files["edges_seq.csv"] = out.str();
  }
  {
    std::ostringstream out;
    out << "a,b,weight\n";
    for (const auto& e : g.hyper_edges()) out << e.a << ',' << e.b << ',' << e.weight << '\n';
    files["edges_hyper.csv"] = out.str();
  }
  {
    std::ostringstream out;
    out << "node_id,occurrence_count";
    for (int j = 0; j + 1 < g.order(); ++j) out << ",x" << j;
    out << '\n';
    for (NodeId id = 0; id < g.node_count(); ++id) {
      for (const auto& entry : g.features(id)) {
        out << id << ',' << entry.count;
        for (double v : entry.values) out << ',' << text::format_double(v);
        out << '\n';
      }
    }
    files["features.csv"] = out.str();
  }
  if (diffused != nullptr) {
    if (diffused->node_count() != g.node_count()) {
      throw Error(ErrorCode::ShapeMismatch, "diffused graph does not match the node count");
    }
    std::ostringstream out;
    out << "src,dst,weight\n";
    for (NodeId s = 0; s < diffused->node_count(); ++s) {
      for (const auto& e : diffused->row(s)) out << s << ',' << e.target << ',' << text::format_double(e.weight) << '\n';
    }
    files["diffused.csv"] = out.str();
  }

  GraphManifest m;
  if (meta.discretizer) {
    files["discretizer.json"] = to_json(*meta.discretizer).dump(2) + "\n";
    m.discretizer_digest = sha256_hex(files["discretizer.json"]);
  }
  // A stale diffusion from an earlier save must not survive a plain re-save.
  if (diffused == nullptr) fs::remove(dir / "diffused.csv", ec);
  if (!meta.discretizer) fs::remove(dir / "discretizer.json", ec);

  for (const auto& [name, bytes] : files) {
    write_file(dir / name, bytes);
    m.files[name] = sha256_hex(bytes);
  }

  m.k = g.order();
  m.dimensions = g.dimensions();
  m.alphabet_sizes = g.alphabet_sizes();
  m.node_count = g.node_count();
  m.sequential_edges = g.sequential_edges().size();
  m.hyper_edges = g.hyper_edges().size();
  m.has_diffusion = diffused != nullptr;
  m.diffused_entries = diffused ? diffused->entry_count() : 0;
  m.input_digest = meta.input_digest;
  m.parameters = meta.parameters;
  write_file(dir / "manifest.json", m.to_json().dump(2) + "\n");
  return m;
}

namespace {

/// Iterates data rows of an archive CSV, checking the field count.
void for_each_row(const std::string& name, const std::string& bytes, std::size_t min_fields,
                  const std::function<void(std::size_t line, const std::vector<std::string_view>&)>& fn) {
  std::string_view rest(bytes);
  std::size_t line_no = 0;
  while (!rest.empty()) {
    const auto end = rest.find('\n');
    const auto line = rest.substr(0, end);
    rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end + 1);
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    const auto fields = text::split(line, ',');
    if (fields.size() < min_fields) {
      throw Error(ErrorCode::MalformedRow, name + ":" + std::to_string(line_no) + ": too few fields");
    }
    fn(line_no, fields);
  }
}

template <typename Int>
Int field_int(const std::string& name, std::size_t line, std::string_view field) {
  const auto value = text::parse_int<Int>(field);
  if (!value) throw Error(ErrorCode::MalformedRow, name + ":" + std::to_string(line) + ": bad integer '" + std::string(field) + "'");
  return *value;
}

double field_double(const std::string& name, std::size_t line, std::string_view field) {
  const auto value = text::parse_double(field);
  if (!value) throw Error(ErrorCode::MalformedRow, name + ":" + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  return *value;
}

}  // namespace

GraphArchive load(const fs::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) throw Error(ErrorCode::MalformedArchive, "no manifest.json in " + dir.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedArchive, std::string("manifest.json: ") + e.what());
  }
  GraphArchive archive;
  archive.manifest = GraphManifest::from_json(doc);
  const auto& m = archive.manifest;

  std::vector<std::string> required = {"nodes.csv", "edges_seq.csv", "edges_hyper.csv", "features.csv"};
  if (m.has_diffusion) required.push_back("diffused.csv");
  if (!m.discretizer_digest.empty()) required.push_back("discretizer.json");
  std::map<std::string, std::string> contents;
  for (const auto& name : required) {
    const auto path = dir / name;
    if (!fs::exists(path)) throw Error(ErrorCode::MalformedArchive, "missing " + name + " in " + dir.string());
    const auto it = m.files.find(name);
    if (it == m.files.end()) throw Error(ErrorCode::MalformedArchive, "manifest has no digest for " + name);
    contents[name] = read_file(path);
    if (sha256_hex(contents[name]) != it->second) {
      throw Error(ErrorCode::IntegrityError, name + " does not match its manifest digest");
    }
  }

  const auto tuple_len = static_cast<std::size_t>(std::max(m.k - 1, 0));
  std::vector<NodeKey> nodes;
  for_each_row("nodes.csv", contents["nodes.csv"], 3, [&](std::size_t line, const auto& f) {
    if (field_int<std::size_t>("nodes.csv", line, f[0]) != nodes.size()) {
      throw Error(ErrorCode::MalformedRow, "nodes.csv:" + std::to_string(line) + ": ids must be dense and ordered");
    }
    NodeKey key{field_int<std::int32_t>("nodes.csv", line, f[1]), {}};
    for (auto s : text::split(f[2], '|')) key.symbols.push_back(field_int<Symbol>("nodes.csv", line, s));
    nodes.push_back(std::move(key));
  });

  std::vector<SequentialEdge> sequential;
  for_each_row("edges_seq.csv", contents["edges_seq.csv"], 3, [&](std::size_t line, const auto& f) {
    sequential.push_back({field_int<NodeId>("edges_seq.csv", line, f[0]), field_int<NodeId>("edges_seq.csv", line, f[1]),
                          field_int<Weight>("edges_seq.csv", line, f[2])});
  });

  std::vector<HyperEdge> hyper;
  for_each_row("edges_hyper.csv", contents["edges_hyper.csv"], 3, [&](std::size_t line, const auto& f) {
    hyper.push_back({field_int<NodeId>("edges_hyper.csv", line, f[0]), field_int<NodeId>("edges_hyper.csv", line, f[1]),
                     field_int<Weight>("edges_hyper.csv", line, f[2])});
  });

  std::vector<FeatureSet> features(nodes.size());
  for_each_row("features.csv", contents["features.csv"], 2 + tuple_len, [&](std::size_t line, const auto& f) {
    const auto id = field_int<std::size_t>("features.csv", line, f[0]);
    if (id >= features.size() || f.size() != 2 + tuple_len) {
      throw Error(ErrorCode::MalformedRow, "features.csv:" + std::to_string(line) + ": bad node id or width");
    }
    FeatureEntry entry{{}, field_int<Weight>("features.csv", line, f[1])};
    for (std::size_t j = 0; j < tuple_len; ++j) entry.values.push_back(field_double("features.csv", line, f[2 + j]));
    features[id].push_back(std::move(entry));
  });

  archive.graph = MdBG::from_parts(m.k, m.alphabet_sizes, std::move(nodes), std::move(sequential), std::move(hyper),
                                   std::move(features));
  const auto s = stats(archive.graph);
  if (s.nodes != m.node_count || s.sequential_edges != m.sequential_edges || s.hyper_edges != m.hyper_edges ||
      archive.graph.dimensions() != m.dimensions) {
    throw Error(ErrorCode::IntegrityError, "graph counts disagree with manifest.json");
  }

  if (m.has_diffusion) {
    std::vector<std::vector<DiffusedEntry>> rows(archive.graph.node_count());
    for_each_row("diffused.csv", contents["diffused.csv"], 3, [&](std::size_t line, const auto& f) {
      const auto src = field_int<std::size_t>("diffused.csv", line, f[0]);
      const auto dst = field_int<NodeId>("diffused.csv", line, f[1]);
      if (src >= rows.size() || dst >= rows.size()) {
        throw Error(ErrorCode::MalformedRow, "diffused.csv:" + std::to_string(line) + ": node id out of range");
      }
      rows[src].push_back({dst, field_double("diffused.csv", line, f[2])});
    });
    DiffusedGraph dg;
    for (auto& row : rows) dg.push_row(std::move(row));
    if (dg.entry_count() != m.diffused_entries) {
      throw Error(ErrorCode::IntegrityError, "diffused entry count disagrees with manifest.json");
    }
    archive.diffused = std::move(dg);
  }

  if (!m.discretizer_digest.empty()) {
    if (sha256_hex(contents["discretizer.json"]) != m.discretizer_digest) {
      throw Error(ErrorCode::IntegrityError, "discretizer.json does not match discretizer_digest");
    }
    try {
      archive.discretizer = discretizer_from_json(nlohmann::json::parse(contents["discretizer.json"]));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::MalformedArchive, std::string("discretizer.json: ") + e.what());
    }
  }
  return archive;
}

void export_mask_batch(const MdBG& g, std::span<const QueryWindow> windows, int k, const fs::path& path) {
  if (windows.empty()) throw Error(ErrorCode::EmptyBatch, "no windows to export");
  const NearestIndex index(g);
  std::ostringstream out;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    auto record = to_json(mask(index, g, windows[w], k));
    record["window"] = w;
    out << record.dump() << '\n';
  }
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  write_file(path, out.str());
}

}  // namespace mdbg
