#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "mdbg/discretize.hpp"
#include "mdbg/ingest.hpp"

namespace mdbg {

using NodeId = std::uint32_t;
using Weight = std::uint64_t;

/// A node of the multivariate de Bruijn graph: a (k-1)-symbol tuple tagged
/// with the (0-based) dimension it was observed in. Equal tuples from
/// different dimensions are different nodes.
struct NodeKey {
  std::int32_t dim = 0;
  std::vector<Symbol> symbols;

  auto operator<=>(const NodeKey&) const = default;
  bool operator==(const NodeKey&) const = default;
};

struct NodeKeyHash {
  std::size_t operator()(const NodeKey& key) const noexcept;
};

/// Directed src -> dst within one dimension; weight counts the k-tuple.
struct SequentialEdge {
  NodeId src = 0;
  NodeId dst = 0;
  Weight weight = 0;

  bool operator==(const SequentialEdge&) const = default;
};

/// Undirected cross-dimension edge stored once with a < b.
struct HyperEdge {
  NodeId a = 0;
  NodeId b = 0;
  Weight weight = 0;

  bool operator==(const HyperEdge&) const = default;
};

/// One distinct raw (k-1)-tuple of a node's feature multiset.
struct FeatureEntry {
  std::vector<double> values;
  Weight count = 0;

  bool operator==(const FeatureEntry&) const = default;
};

/// Raw tuples that discretize to the owner's symbols, in first-seen order.
using FeatureSet = std::vector<FeatureEntry>;

struct BuildOptions {
  /// Collapse hyper-edge co-occurrence counts to weight 1.
  bool binary_hyper_weights = false;
  /// Maximum distinct raw tuples kept per node; 0 means unlimited. Once a
  /// node is full, unseen tuples are dropped and seen ones still counted.
  std::size_t feature_cap = 0;
};

/// Immutable multivariate de Bruijn graph. Node ids are dense and follow
/// first-encounter order during construction; edges are kept sorted by
/// (src, dst) and (a, b).
class MdBG {
 public:
  MdBG() = default;

  /// Assembles a graph from its parts and checks every structural
  /// invariant. Edges may come in any order; they are sorted here.
  static MdBG from_parts(int k, std::vector<int> alphabet_sizes, std::vector<NodeKey> nodes,
                         std::vector<SequentialEdge> sequential, std::vector<HyperEdge> hyper,
                         std::vector<FeatureSet> features);

  int order() const { return k_; }
  int dimensions() const { return static_cast<int>(alphabet_sizes_.size()); }
  const std::vector<int>& alphabet_sizes() const { return alphabet_sizes_; }

  std::size_t node_count() const { return nodes_.size(); }
  const NodeKey& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<NodeKey>& nodes() const { return nodes_; }

  /// Id of `key` if it is a node. Throws MalformedKey when the tuple length
  /// is not k-1.
  std::optional<NodeId> find(const NodeKey& key) const;

  std::span<const NodeId> nodes_in_dimension(int dim) const;

  const std::vector<SequentialEdge>& sequential_edges() const { return sequential_; }
  const std::vector<HyperEdge>& hyper_edges() const { return hyper_; }
  std::span<const SequentialEdge> out_edges(NodeId id) const;

  const FeatureSet& features(NodeId id) const { return features_.at(id); }
  const std::vector<FeatureSet>& feature_sets() const { return features_; }

  bool operator==(const MdBG& other) const;

 private:
  int k_ = 0;
  std::vector<int> alphabet_sizes_;
  std::vector<NodeKey> nodes_;
  std::unordered_map<NodeKey, NodeId, NodeKeyHash> index_;
  std::vector<std::vector<NodeId>> by_dimension_;
  std::vector<SequentialEdge> sequential_;
  std::vector<std::size_t> out_offsets_;  // CSR row pointers into sequential_
  std::vector<HyperEdge> hyper_;
  std::vector<FeatureSet> features_;
};

/// Builds the graph from the raw train split and its discretization. For
/// every step t the D k-tuples add their prefix and suffix nodes, extend both
/// feature sets and bump the sequential edge; the prefix nodes at t = 0 and
/// the suffix nodes at every t are joined pairwise by hyper edges.
MdBG build(const TimeSeriesDataset& raw, const DiscreteDataset& disc, int k, const BuildOptions& options = {});

struct DimensionStats {
  std::size_t nodes = 0;
  std::size_t sequential_edges = 0;
  Weight sequential_weight = 0;
};

struct GraphStats {
  std::size_t nodes = 0;
  std::size_t sequential_edges = 0;
  std::size_t hyper_edges = 0;           // undirected pairs
  std::size_t hyper_edges_directed = 0;  // each pair counted both ways
  Weight hyper_weight = 0;
  std::vector<DimensionStats> per_dimension;

  /// Directed sequential plus both directions of every hyper pair.
  std::size_t total_edges_directed() const { return sequential_edges + hyper_edges_directed; }
  /// Directed sequential plus each hyper pair once.
  std::size_t total_edges_undirected_hyper() const { return sequential_edges + hyper_edges; }
};

GraphStats stats(const MdBG& g);
nlohmann::json to_json(const GraphStats& s);

}  // namespace mdbg
