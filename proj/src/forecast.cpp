#include "mdbg/forecast.hpp"

#include "mdbg/error.hpp"

namespace mdbg {

std::string to_string(ForecastMode m) { return m == ForecastMode::greedy ? "greedy" : "expected"; }
std::string to_string(Fallback f) { return f == Fallback::nearest_node ? "nearest-node" : "repeat-last"; }

ForecastMode forecast_mode_from_string(const std::string& name) {
  if (name == "greedy") return ForecastMode::greedy;
  if (name == "expected") return ForecastMode::expected;
  throw Error(ErrorCode::InvalidConfig, "unknown forecast mode '" + name + "'");
}

Fallback fallback_from_string(const std::string& name) {
  if (name == "nearest-node" || name == "nearest_node") return Fallback::nearest_node;
  if (name == "repeat-last" || name == "repeat_last") return Fallback::repeat_last;
  throw Error(ErrorCode::InvalidConfig, "unknown fallback '" + name + "'");
}

namespace {

Eigen::VectorXd successor_distribution(const MdBG& g, NodeId id, int alpha) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(alpha);
  for (const auto& e : g.out_edges(id)) p(g.node(e.dst).symbols.back() - 1) += static_cast<double>(e.weight);
  const double total = p.sum();
  if (total > 0.0) p /= total;
  return p;
}

/// Same-dimension node with out-edges closest to `from`, lexicographic ties.
std::optional<NodeId> nearest_with_successors(const MdBG& g, const NodeKey& from) {
  std::optional<NodeId> best;
  std::int64_t best_distance = 0;
  for (NodeId id : g.nodes_in_dimension(from.dim)) {
    if (g.out_edges(id).empty()) continue;
    const auto& symbols = g.node(id).symbols;
    std::int64_t d = 0;
    for (std::size_t j = 0; j < symbols.size(); ++j) d += std::abs(static_cast<std::int64_t>(symbols[j]) - from.symbols[j]);
    if (!best || d < best_distance || (d == best_distance && symbols < g.node(*best).symbols)) {
      best = id;
      best_distance = d;
    }
  }
  return best;
}

Eigen::VectorXd predict_with(const MdBG& g, const Resolution& r, Fallback fallback) {
  const int alpha = g.alphabet_sizes()[static_cast<std::size_t>(r.query.dim)];
  if (!g.out_edges(r.node).empty()) return successor_distribution(g, r.node, alpha);
  if (fallback == Fallback::nearest_node) {
    if (const auto other = nearest_with_successors(g, g.node(r.node))) return successor_distribution(g, *other, alpha);
  }
  Eigen::VectorXd p = Eigen::VectorXd::Zero(alpha);
  p(r.query.symbols.back() - 1) = 1.0;
  return p;
}

Resolution resolve_state(const NearestIndex& index, const MdBG& g, const NodeKey& state) {
  if (state.dim < 0 || state.dim >= g.dimensions()) {
    throw Error(ErrorCode::UnresolvableState, "state dimension " + std::to_string(state.dim) + " is not in the graph");
  }
  if (state.symbols.size() != static_cast<std::size_t>(g.order() - 1)) {
    throw Error(ErrorCode::UnresolvableState, "state must hold k-1 symbols");
  }
  const int alpha = g.alphabet_sizes()[static_cast<std::size_t>(state.dim)];
  for (Symbol s : state.symbols) {
    if (s < 1 || s > alpha) throw Error(ErrorCode::UnresolvableState, "state symbol outside the alphabet");
  }
  try {
    return index.resolve(state);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoNodesInDimension) throw Error(ErrorCode::UnresolvableState, e.what());
    throw;
  }
}

Symbol argmax_symbol(const Eigen::VectorXd& p) {
  Eigen::Index best = 0;
  for (Eigen::Index s = 1; s < p.size(); ++s) {
    if (p(s) > p(best)) best = s;
  }
  return static_cast<Symbol>(best + 1);
}

void check_window(const MdBG& g, const QueryWindow& window, int horizon) {
  if (horizon < 1) throw Error(ErrorCode::InvalidHorizon, "horizon must be >= 1, got " + std::to_string(horizon));
  if (window.dims() != g.dimensions()) {
    throw Error(ErrorCode::DimensionMismatch, "window has " + std::to_string(window.dims()) + " dimensions, graph " +
                                                  std::to_string(g.dimensions()));
  }
  if (window.length() < g.order() - 1) throw Error(ErrorCode::WindowTooShort, "window shorter than k-1");
}

/// Walks every dimension `horizon` steps, reporting (dim, step, distribution, chosen symbol).
template <typename Visit>
void walk(const MdBG& g, const QueryWindow& window, int horizon, Fallback fallback, Visit&& visit) {
  const NearestIndex index(g);
  const Eigen::Index len = g.order() - 1;
  for (Eigen::Index i = 0; i < window.dims(); ++i) {
    const auto tail = window.symbols.row(i).tail(len);
    NodeKey state{static_cast<std::int32_t>(i), {tail.begin(), tail.end()}};
    for (int h = 0; h < horizon; ++h) {
      const auto p = predict_with(g, resolve_state(index, g, state), fallback);
      const Symbol next = argmax_symbol(p);
      visit(i, h, p, next);
      state.symbols.erase(state.symbols.begin());
      state.symbols.push_back(next);
    }
  }
}

}  // namespace

Eigen::VectorXd predict_next_symbol(const MdBG& g, const NodeKey& state, Fallback fallback) {
  const NearestIndex index(g);
  return predict_with(g, resolve_state(index, g, state), fallback);
}

RowMatrix<Symbol> forecast_symbols(const MdBG& g, const QueryWindow& window, int horizon, Fallback fallback) {
  check_window(g, window, horizon);
  RowMatrix<Symbol> out(window.dims(), horizon);
  walk(g, window, horizon, fallback, [&](Eigen::Index i, int h, const Eigen::VectorXd&, Symbol next) { out(i, h) = next; });
  return out;
}

Eigen::MatrixXd forecast(const MdBG& g, const Discretizer& d, const QueryWindow& window, const ForecastConfig& cfg) {
  check_window(g, window, cfg.horizon);
  if (d.alphabet_sizes() != g.alphabet_sizes()) {
    throw Error(ErrorCode::ShapeMismatch, "discretizer alphabets do not match the graph");
  }
  Eigen::MatrixXd out(window.dims(), cfg.horizon);
  walk(g, window, cfg.horizon, cfg.fallback, [&](Eigen::Index i, int h, const Eigen::VectorXd& p, Symbol next) {
    const auto& bins = d.dimension(i);
    if (cfg.mode == ForecastMode::greedy) {
      out(i, h) = bins.center(next);
    } else {
      double value = 0.0;
      for (Eigen::Index s = 0; s < p.size(); ++s) {
        if (p(s) > 0.0) value += p(s) * bins.center(static_cast<Symbol>(s + 1));
      }
      out(i, h) = value;
    }
  });
  return out;
}

Eigen::MatrixXd repeat_last(const QueryWindow& window, int horizon) {
  if (horizon < 1) throw Error(ErrorCode::InvalidHorizon, "horizon must be >= 1");
  if (window.raw.cols() == 0) throw Error(ErrorCode::WindowTooShort, "empty window");
  return window.raw.col(window.raw.cols() - 1).replicate(1, horizon);
}

}  // namespace mdbg
