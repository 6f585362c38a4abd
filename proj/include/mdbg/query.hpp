#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "mdbg/discretize.hpp"
#include "mdbg/graph.hpp"

namespace mdbg {

/// An input window: raw values and their symbols, both D x L.
struct QueryWindow {
  RowMatrix<double> raw;
  RowMatrix<Symbol> symbols;

  Eigen::Index dims() const { return symbols.rows(); }
  Eigen::Index length() const { return symbols.cols(); }

  /// Discretizes `raw` with the graph's fitted discretizer. Values outside
  /// the train range clamp to the boundary bins.
  static QueryWindow from_raw(const Discretizer& d, RowMatrix<double> raw);
};

/// All consecutive (k-1)-tuples of every dimension, dimension by dimension,
/// D * (L - k + 2) keys in total.
std::vector<NodeKey> extract_query_tuples(const QueryWindow& w, int k);

struct Resolution {
  NodeKey query;
  NodeId node = 0;
  std::int64_t distance = 0;
  bool exact = false;

  bool operator==(const Resolution&) const = default;
};

/// Exact match, or the node of the same dimension closest in L1 over symbol
/// indices; equal distances go to the lexicographically smallest tuple.
/// This linear scan is the reference behaviour.
Resolution resolve(const MdBG& g, const NodeKey& query);

/// Same answers as resolve(), from per-dimension node lists sorted
/// lexicographically. The scan starts at the query's first symbol and stops
/// once the first-symbol gap alone exceeds the best distance.
class NearestIndex {
 public:
  explicit NearestIndex(const MdBG& g);
  Resolution resolve(const NodeKey& query) const;

 private:
  const MdBG* graph_;
  std::vector<std::vector<NodeId>> sorted_;
};

struct MaskVector {
  std::vector<std::uint8_t> bits;  // one per node
  std::vector<Resolution> resolutions;

  std::vector<NodeId> set_ids() const;
  std::size_t popcount() const;

  bool operator==(const MaskVector&) const = default;
};

MaskVector mask(const MdBG& g, const QueryWindow& w, int k);
MaskVector mask(const NearestIndex& index, const MdBG& g, const QueryWindow& w, int k);

struct SampleConfig {
  int f = 16;
  std::uint64_t seed = 0;
};

/// f raw tuples drawn with replacement from F_v, each distinct tuple weighted
/// by its occurrence count. Returns an f x (k-1) matrix; identical seeds give
/// identical draws.
Eigen::MatrixXd sample_features(const MdBG& g, NodeId node, const SampleConfig& cfg);

nlohmann::json to_json(const Resolution& r);
nlohmann::json to_json(const MaskVector& m);

}  // namespace mdbg
