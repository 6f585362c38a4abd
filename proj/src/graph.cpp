#include "mdbg/graph.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "mdbg/error.hpp"
#include "mdbg/log.hpp"

namespace mdbg {

std::size_t NodeKeyHash::operator()(const NodeKey& key) const noexcept {
  // FNV-1a over the dimension and symbols.
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::uint32_t v) {
    for (int b = 0; b < 4; ++b) {
      h ^= (v >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(static_cast<std::uint32_t>(key.dim));
  for (Symbol s : key.symbols) mix(static_cast<std::uint32_t>(s));
  return static_cast<std::size_t>(h);
}

namespace {

std::string describe(const NodeKey& key) {
  std::string out = "(dim " + std::to_string(key.dim) + ":";
  for (std::size_t j = 0; j < key.symbols.size(); ++j) out += (j ? "|" : " ") + std::to_string(key.symbols[j]);
  return out + ")";
}

}  // namespace

MdBG MdBG::from_parts(int k, std::vector<int> alphabet_sizes, std::vector<NodeKey> nodes,
                      std::vector<SequentialEdge> sequential, std::vector<HyperEdge> hyper,
                      std::vector<FeatureSet> features) {
  if (k < 2) throw Error(ErrorCode::OrderTooSmall, "order k must be >= 2, got " + std::to_string(k));
  if (alphabet_sizes.empty()) throw Error(ErrorCode::ShapeMismatch, "graph needs at least one dimension");
  if (features.size() != nodes.size()) {
    throw Error(ErrorCode::ShapeMismatch, std::to_string(features.size()) + " feature sets for " +
                                              std::to_string(nodes.size()) + " nodes");
  }

  MdBG g;
  g.k_ = k;
  g.alphabet_sizes_ = std::move(alphabet_sizes);
  g.by_dimension_.resize(g.alphabet_sizes_.size());
  const auto tuple_len = static_cast<std::size_t>(k - 1);

  g.index_.reserve(nodes.size());
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    const auto& key = nodes[id];
    if (key.dim < 0 || key.dim >= g.dimensions()) {
      throw Error(ErrorCode::MalformedKey, describe(key) + ": dimension out of range");
    }
    if (key.symbols.size() != tuple_len) throw Error(ErrorCode::MalformedKey, describe(key) + ": wrong tuple length");
    const int alpha = g.alphabet_sizes_[static_cast<std::size_t>(key.dim)];
    for (Symbol s : key.symbols) {
      if (s < 1 || s > alpha) throw Error(ErrorCode::MalformedKey, describe(key) + ": symbol outside alphabet");
    }
    if (!g.index_.emplace(key, static_cast<NodeId>(id)).second) {
      throw Error(ErrorCode::MalformedKey, describe(key) + ": duplicate node");
    }
    g.by_dimension_[static_cast<std::size_t>(key.dim)].push_back(static_cast<NodeId>(id));
  }
  g.nodes_ = std::move(nodes);

  const auto n = g.nodes_.size();
  std::sort(sequential.begin(), sequential.end(),
            [](const auto& x, const auto& y) { return std::tie(x.src, x.dst) < std::tie(y.src, y.dst); });
  for (std::size_t e = 0; e < sequential.size(); ++e) {
    const auto& edge = sequential[e];
    if (edge.src >= n || edge.dst >= n) throw Error(ErrorCode::MalformedKey, "sequential edge references unknown node");
    if (edge.weight == 0) throw Error(ErrorCode::ShapeMismatch, "sequential edge with zero weight");
    if (e > 0 && sequential[e - 1].src == edge.src && sequential[e - 1].dst == edge.dst) {
      throw Error(ErrorCode::ShapeMismatch, "duplicate sequential edge");
    }
    const auto& src = g.nodes_[edge.src];
    const auto& dst = g.nodes_[edge.dst];
    if (src.dim != dst.dim) throw Error(ErrorCode::ShapeMismatch, "sequential edge crosses dimensions");
    if (!std::equal(src.symbols.begin() + 1, src.symbols.end(), dst.symbols.begin())) {
      throw Error(ErrorCode::ShapeMismatch,
                  "sequential edge " + describe(src) + " -> " + describe(dst) + " lacks the k-2 overlap");
    }
  }
  g.sequential_ = std::move(sequential);
  g.out_offsets_.assign(n + 1, 0);
  for (const auto& edge : g.sequential_) ++g.out_offsets_[edge.src + 1];
  for (std::size_t i = 0; i < n; ++i) g.out_offsets_[i + 1] += g.out_offsets_[i];

  for (auto& edge : hyper) {
    if (edge.a > edge.b) std::swap(edge.a, edge.b);
  }
  std::sort(hyper.begin(), hyper.end(),
            [](const auto& x, const auto& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  for (std::size_t e = 0; e < hyper.size(); ++e) {
    const auto& edge = hyper[e];
    if (edge.b >= n) throw Error(ErrorCode::MalformedKey, "hyper edge references unknown node");
    if (edge.weight == 0) throw Error(ErrorCode::ShapeMismatch, "hyper edge with zero weight");
    if (g.nodes_[edge.a].dim == g.nodes_[edge.b].dim) {
      throw Error(ErrorCode::ShapeMismatch, "hyper edge within one dimension");
    }
    if (e > 0 && hyper[e - 1].a == edge.a && hyper[e - 1].b == edge.b) {
      throw Error(ErrorCode::ShapeMismatch, "duplicate hyper edge");
    }
  }
  g.hyper_ = std::move(hyper);

  for (const auto& set : features) {
    for (const auto& entry : set) {
      if (entry.values.size() != tuple_len || entry.count == 0) {
        throw Error(ErrorCode::ShapeMismatch, "feature tuple must have k-1 values and a positive count");
      }
    }
  }
  g.features_ = std::move(features);
  return g;
}

std::optional<NodeId> MdBG::find(const NodeKey& key) const {
  if (key.symbols.size() != static_cast<std::size_t>(k_ - 1)) {
    throw Error(ErrorCode::MalformedKey, describe(key) + ": expected " + std::to_string(k_ - 1) + " symbols");
  }
  const auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const NodeId> MdBG::nodes_in_dimension(int dim) const {
  if (dim < 0 || dim >= dimensions()) return {};
  return by_dimension_[static_cast<std::size_t>(dim)];
}

std::span<const SequentialEdge> MdBG::out_edges(NodeId id) const {
  if (id >= nodes_.size()) throw Error(ErrorCode::NodeNotFound, "node " + std::to_string(id));
  return std::span<const SequentialEdge>(sequential_).subspan(out_offsets_[id],
                                                             out_offsets_[id + 1] - out_offsets_[id]);
}

bool MdBG::operator==(const MdBG& other) const {
  return k_ == other.k_ && alphabet_sizes_ == other.alphabet_sizes_ && nodes_ == other.nodes_ &&
         sequential_ == other.sequential_ && hyper_ == other.hyper_ && features_ == other.features_;
}

namespace {

class Builder {
 public:
  Builder(int k, const BuildOptions& options) : k_(k), options_(options) {}

  NodeId intern(NodeKey key) {
    auto [it, inserted] = index_.try_emplace(std::move(key), static_cast<NodeId>(nodes_.size()));
    if (inserted) {
      nodes_.push_back(it->first);
      features_.emplace_back();
      feature_index_.emplace_back();
    }
    return it->second;
  }

  void add_feature(NodeId id, std::vector<double> values) {
    auto& index = feature_index_[id];
    auto& set = features_[id];
    if (const auto it = index.find(values); it != index.end()) {
      ++set[it->second].count;
      return;
    }
    if (options_.feature_cap != 0 && set.size() >= options_.feature_cap) {
      ++dropped_;
      return;
    }
    index.emplace(values, set.size());
    set.push_back({std::move(values), 1});
  }

  void add_sequential(NodeId src, NodeId dst) { ++sequential_[key(src, dst)]; }

  void add_clique(std::span<const NodeId> members) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        auto& w = hyper_[key(std::min(members[i], members[j]), std::max(members[i], members[j]))];
        w = options_.binary_hyper_weights ? 1 : w + 1;
      }
    }
  }

  MdBG finish(std::vector<int> alphabet_sizes) {
    if (dropped_ > 0) log::warn("feature_cap_reached", {{"dropped_tuples", dropped_}});
    std::vector<SequentialEdge> sequential;
    sequential.reserve(sequential_.size());
    for (const auto& [k, w] : sequential_) sequential.push_back({static_cast<NodeId>(k >> 32), static_cast<NodeId>(k), w});
    std::vector<HyperEdge> hyper;
    hyper.reserve(hyper_.size());
    for (const auto& [k, w] : hyper_) hyper.push_back({static_cast<NodeId>(k >> 32), static_cast<NodeId>(k), w});
    return MdBG::from_parts(k_, std::move(alphabet_sizes), std::move(nodes_), std::move(sequential),
                            std::move(hyper), std::move(features_));
  }

 private:
  static std::uint64_t key(NodeId a, NodeId b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

  int k_;
  BuildOptions options_;
  std::vector<NodeKey> nodes_;
  std::unordered_map<NodeKey, NodeId, NodeKeyHash> index_;
  std::vector<FeatureSet> features_;
  std::vector<std::map<std::vector<double>, std::size_t>> feature_index_;
  std::unordered_map<std::uint64_t, Weight> sequential_;
  std::unordered_map<std::uint64_t, Weight> hyper_;
  std::size_t dropped_ = 0;
};

}  // namespace

MdBG build(const TimeSeriesDataset& raw, const DiscreteDataset& disc, int k, const BuildOptions& options) {
  if (k < 2) throw Error(ErrorCode::OrderTooSmall, "order k must be >= 2, got " + std::to_string(k));
  if (raw.dims() != disc.dims() || raw.length() != disc.length() ||
      static_cast<std::size_t>(disc.dims()) != disc.alphabet_sizes.size()) {
    throw Error(ErrorCode::ShapeMismatch, "raw and discrete datasets disagree in shape");
  }
  if (raw.dims() < 1) throw Error(ErrorCode::ShapeMismatch, "dataset has no dimensions");
  if (raw.length() < k) {
    throw Error(ErrorCode::SeriesTooShort,
                "series of length " + std::to_string(raw.length()) + " is shorter than k=" + std::to_string(k));
  }

  const auto dims = static_cast<std::size_t>(raw.dims());
  const Eigen::Index steps = raw.length() - k + 1;
  const auto tuple_len = static_cast<Eigen::Index>(k - 1);
  Builder builder(k, options);
  std::vector<NodeId> prefixes(dims);
  std::vector<NodeId> suffixes(dims);

  for (Eigen::Index t = 0; t < steps; ++t) {
    for (std::size_t i = 0; i < dims; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const auto symbols = disc.symbols.row(row).segment(t, k);
      const auto values = raw.values.row(row).segment(t, k);
      NodeKey prefix{static_cast<std::int32_t>(i), {symbols.begin(), symbols.begin() + tuple_len}};
      NodeKey suffix{static_cast<std::int32_t>(i), {symbols.begin() + 1, symbols.end()}};
      const NodeId u = builder.intern(std::move(prefix));
      const NodeId v = builder.intern(std::move(suffix));
      builder.add_feature(u, {values.begin(), values.begin() + tuple_len});
      builder.add_feature(v, {values.begin() + 1, values.end()});
      builder.add_sequential(u, v);
      prefixes[i] = u;
      suffixes[i] = v;
    }
    if (t == 0) builder.add_clique(prefixes);
    builder.add_clique(suffixes);
  }
  return builder.finish(disc.alphabet_sizes);
}

GraphStats stats(const MdBG& g) {
  GraphStats s;
  s.nodes = g.node_count();
  s.sequential_edges = g.sequential_edges().size();
  s.hyper_edges = g.hyper_edges().size();
  s.hyper_edges_directed = 2 * s.hyper_edges;
  s.per_dimension.resize(static_cast<std::size_t>(g.dimensions()));
  for (int d = 0; d < g.dimensions(); ++d) s.per_dimension[static_cast<std::size_t>(d)].nodes = g.nodes_in_dimension(d).size();
  for (const auto& edge : g.sequential_edges()) {
    auto& dim = s.per_dimension[static_cast<std::size_t>(g.node(edge.src).dim)];
    ++dim.sequential_edges;
    dim.sequential_weight += edge.weight;
  }
  for (const auto& edge : g.hyper_edges()) s.hyper_weight += edge.weight;
  return s;
}

nlohmann::json to_json(const GraphStats& s) {
  nlohmann::json dims = nlohmann::json::array();
  for (const auto& d : s.per_dimension) {
    dims.push_back({{"nodes", d.nodes}, {"sequential_edges", d.sequential_edges}, {"sequential_weight", d.sequential_weight}});
  }
  return {{"nodes", s.nodes},
          {"sequential_edges", s.sequential_edges},
          {"hyper_edges", s.hyper_edges},
          {"hyper_edges_directed", s.hyper_edges_directed},
          {"hyper_weight", s.hyper_weight},
          {"total_edges_directed", s.total_edges_directed()},
          {"total_edges_undirected_hyper", s.total_edges_undirected_hyper()},
          {"per_dimension", std::move(dims)}};
}

}  // namespace mdbg
