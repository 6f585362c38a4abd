#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mdbg/diffusion.hpp"
#include "mdbg/discretize.hpp"
#include "mdbg/graph.hpp"
#include "mdbg/query.hpp"

namespace mdbg {

// Graph directory layout (format version 1):
//   manifest.json     counts, parameters and a SHA-256 per file
//   nodes.csv         id,dim,symbols          symbols joined by '|'
//   edges_seq.csv     src,dst,weight
//   edges_hyper.csv   a,b,weight              a < b, one row per pair
//   features.csv      node_id,occurrence_count,x0..x{k-2}
//   diffused.csv      src,dst,weight          only when diffusion was run
//   discretizer.json  bin tables              only when a discretizer is given
// Rows are sorted by id so identical graphs produce identical bytes.

inline constexpr int kFormatVersion = 1;

std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& path);

struct GraphManifest {
  int format_version = kFormatVersion;
  int k = 0;
  int dimensions = 0;
  std::vector<int> alphabet_sizes;
  std::size_t node_count = 0;
  std::size_t sequential_edges = 0;
  std::size_t hyper_edges = 0;
  std::size_t diffused_entries = 0;
  bool has_diffusion = false;
  std::string discretizer_digest;
  std::string input_digest;
  nlohmann::json parameters = nlohmann::json::object();
  std::map<std::string, std::string> files;  // name -> sha256

  nlohmann::json to_json() const;
  static GraphManifest from_json(const nlohmann::json& doc);
};

/// Provenance recorded alongside the graph.
struct ArchiveMetadata {
  std::optional<Discretizer> discretizer;
  nlohmann::json parameters = nlohmann::json::object();
  std::string input_digest;
};

GraphManifest save(const MdBG& g, const DiffusedGraph* diffused, const std::filesystem::path& dir,
                   const ArchiveMetadata& meta = {});

struct GraphArchive {
  MdBG graph;
  std::optional<DiffusedGraph> diffused;
  std::optional<Discretizer> discretizer;
  GraphManifest manifest;
};

/// Reads a graph directory, verifying every file digest and the counts in
/// the manifest; the graph passes the full MdBG invariant check.
GraphArchive load(const std::filesystem::path& dir);

/// One JSON line per window: {"window", "bits", "resolutions"}.
void export_mask_batch(const MdBG& g, std::span<const QueryWindow> windows, int k, const std::filesystem::path& path);

}  // namespace mdbg
