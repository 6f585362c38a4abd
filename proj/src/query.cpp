#include "mdbg/query.hpp"

#include <algorithm>
#include <random>

#include "mdbg/error.hpp"

namespace mdbg {

QueryWindow QueryWindow::from_raw(const Discretizer& d, RowMatrix<double> raw) {
  TimeSeriesDataset ds;
  ds.values = std::move(raw);
  auto disc = apply(d, ds);
  return {std::move(ds.values), std::move(disc.symbols)};
}

std::vector<NodeKey> extract_query_tuples(const QueryWindow& w, int k) {
  if (k < 2) throw Error(ErrorCode::OrderTooSmall, "order k must be >= 2");
  const Eigen::Index len = k - 1;
  if (w.length() < len) {
    throw Error(ErrorCode::WindowTooShort, "window of length " + std::to_string(w.length()) +
                                               " holds no " + std::to_string(len) + "-tuple");
  }
  std::vector<NodeKey> out;
  out.reserve(static_cast<std::size_t>(w.dims() * (w.length() - len + 1)));
  for (Eigen::Index i = 0; i < w.dims(); ++i) {
    for (Eigen::Index t = 0; t + len <= w.length(); ++t) {
      const auto seg = w.symbols.row(i).segment(t, len);
      out.push_back({static_cast<std::int32_t>(i), {seg.begin(), seg.end()}});
    }
  }
  return out;
}

namespace {

std::int64_t l1(const std::vector<Symbol>& a, const std::vector<Symbol>& b) {
  std::int64_t d = 0;
  for (std::size_t j = 0; j < a.size(); ++j) d += std::abs(static_cast<std::int64_t>(a[j]) - b[j]);
  return d;
}

void check_dimension(const MdBG& g, const NodeKey& query) {
  if (g.nodes_in_dimension(query.dim).empty()) {
    throw Error(ErrorCode::NoNodesInDimension, "graph has no nodes in dimension " + std::to_string(query.dim));
  }
}

}  // namespace

Resolution resolve(const MdBG& g, const NodeKey& query) {
  if (const auto id = g.find(query)) return {query, *id, 0, true};
  check_dimension(g, query);
  Resolution best{query, 0, -1, false};
  for (NodeId id : g.nodes_in_dimension(query.dim)) {
    const auto& symbols = g.node(id).symbols;
    const auto d = l1(query.symbols, symbols);
    if (best.distance < 0 || d < best.distance || (d == best.distance && symbols < g.node(best.node).symbols)) {
      best.node = id;
      best.distance = d;
    }
  }
  return best;
}

NearestIndex::NearestIndex(const MdBG& g) : graph_(&g), sorted_(static_cast<std::size_t>(g.dimensions())) {
  for (int d = 0; d < g.dimensions(); ++d) {
    const auto ids = g.nodes_in_dimension(d);
    auto& sorted = sorted_[static_cast<std::size_t>(d)];
    sorted.assign(ids.begin(), ids.end());
    std::sort(sorted.begin(), sorted.end(),
              [&g](NodeId x, NodeId y) { return g.node(x).symbols < g.node(y).symbols; });
  }
}

Resolution NearestIndex::resolve(const NodeKey& query) const {
  const MdBG& g = *graph_;
  if (const auto id = g.find(query)) return {query, *id, 0, true};
  check_dimension(g, query);
  const auto& sorted = sorted_[static_cast<std::size_t>(query.dim)];
  const Symbol head = query.symbols.front();
  // First node whose leading symbol is >= the query's.
  const auto pivot = std::partition_point(sorted.begin(), sorted.end(),
                                          [&](NodeId id) { return g.node(id).symbols.front() < head; });

  Resolution best{query, 0, -1, false};
  auto consider = [&](NodeId id) {
    const auto& symbols = g.node(id).symbols;
    const auto d = l1(query.symbols, symbols);
    if (best.distance < 0 || d < best.distance || (d == best.distance && symbols < g.node(best.node).symbols)) {
      best.node = id;
      best.distance = d;
    }
  };
  auto gap = [&](NodeId id) { return std::abs(static_cast<std::int64_t>(g.node(id).symbols.front()) - head); };

  auto up = pivot;
  auto down = pivot;
  while (up != sorted.end() || down != sorted.begin()) {
    bool progressed = false;
    if (up != sorted.end() && (best.distance < 0 || gap(*up) <= best.distance)) {
      consider(*up++);
      progressed = true;
    }
    if (down != sorted.begin() && (best.distance < 0 || gap(*(down - 1)) <= best.distance)) {
      consider(*--down);
      progressed = true;
    }
    if (!progressed) break;
  }
  return best;
}

std::vector<NodeId> MaskVector::set_ids() const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

std::size_t MaskVector::popcount() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

namespace {

template <typename Resolver>
MaskVector build_mask(const MdBG& g, const QueryWindow& w, int k, Resolver&& resolver) {
  if (k != g.order()) {
    throw Error(ErrorCode::ShapeMismatch, "window order k=" + std::to_string(k) + " but graph has k=" +
                                              std::to_string(g.order()));
  }
  if (w.dims() != g.dimensions()) {
    throw Error(ErrorCode::DimensionMismatch, "window has " + std::to_string(w.dims()) + " dimensions, graph " +
                                                  std::to_string(g.dimensions()));
  }
  MaskVector m;
  m.bits.assign(g.node_count(), 0);
  for (const auto& query : extract_query_tuples(w, k)) {
    auto r = resolver(query);
    m.bits[r.node] = 1;
    m.resolutions.push_back(std::move(r));
  }
  return m;
}

}  // namespace

MaskVector mask(const MdBG& g, const QueryWindow& w, int k) {
  return build_mask(g, w, k, [&g](const NodeKey& q) { return resolve(g, q); });
}

MaskVector mask(const NearestIndex& index, const MdBG& g, const QueryWindow& w, int k) {
  return build_mask(g, w, k, [&index](const NodeKey& q) { return index.resolve(q); });
}

Eigen::MatrixXd sample_features(const MdBG& g, NodeId node, const SampleConfig& cfg) {
  if (node >= g.node_count()) throw Error(ErrorCode::NodeNotFound, "node " + std::to_string(node));
  if (cfg.f < 1) throw Error(ErrorCode::InvalidConfig, "f must be >= 1");
  const auto& set = g.features(node);
  if (set.empty()) throw Error(ErrorCode::NodeNotFound, "node " + std::to_string(node) + " has no stored features");
  std::vector<double> weights;
  weights.reserve(set.size());
  for (const auto& entry : set) weights.push_back(static_cast<double>(entry.count));

  std::mt19937_64 rng(cfg.seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  Eigen::MatrixXd out(cfg.f, g.order() - 1);
  for (int r = 0; r < cfg.f; ++r) {
    const auto& values = set[pick(rng)].values;
    out.row(r) = Eigen::Map<const Eigen::RowVectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  }
  return out;
}

nlohmann::json to_json(const Resolution& r) {
  return {{"dim", r.query.dim},
          {"query", r.query.symbols},
          {"node", r.node},
          {"distance", r.distance},
          {"exact", r.exact}};
}

nlohmann::json to_json(const MaskVector& m) {
  nlohmann::json resolutions = nlohmann::json::array();
  for (const auto& r : m.resolutions) resolutions.push_back(to_json(r));
  return {{"bits", m.set_ids()}, {"resolutions", std::move(resolutions)}};
}

}  // namespace mdbg
