#pragma once

#include <string>

#include <Eigen/Core>

#include "mdbg/discretize.hpp"
#include "mdbg/graph.hpp"
#include "mdbg/query.hpp"

namespace mdbg {

// Frequency forecaster over the sequential edges: from the current
// (k-1)-tuple it follows the out-edge weights one symbol at a time. It is a
// sanity baseline for the symbolic graph, not a learned model.

enum class ForecastMode { greedy, expected };
enum class Fallback { nearest_node, repeat_last };

std::string to_string(ForecastMode m);
std::string to_string(Fallback f);
ForecastMode forecast_mode_from_string(const std::string& name);
Fallback fallback_from_string(const std::string& name);

struct ForecastConfig {
  int horizon = 96;
  ForecastMode mode = ForecastMode::greedy;
  /// What a state without out-edges predicts: the distribution of the
  /// L1-nearest node of its dimension that has out-edges, or its own last
  /// symbol.
  Fallback fallback = Fallback::nearest_node;
};

/// Probability of each next symbol (entry s-1 for symbol s) given `state`.
/// Unknown states are resolved to their L1-nearest node first.
Eigen::VectorXd predict_next_symbol(const MdBG& g, const NodeKey& state, Fallback fallback = Fallback::nearest_node);

/// D x horizon forecast continuing each dimension of `window`. Greedy mode
/// emits the bin center of the most likely symbol (ties to the smaller
/// symbol); expected mode emits the probability-weighted mean of bin
/// centers. Both advance the state with the most likely symbol.
Eigen::MatrixXd forecast(const MdBG& g, const Discretizer& d, const QueryWindow& window, const ForecastConfig& cfg);

/// Symbol sequence behind a greedy forecast, D x horizon.
RowMatrix<Symbol> forecast_symbols(const MdBG& g, const QueryWindow& window, int horizon,
                                   Fallback fallback = Fallback::nearest_node);

/// Repeats each dimension's last observed raw value.
Eigen::MatrixXd repeat_last(const QueryWindow& window, int horizon);

template <typename A, typename B>
double mse(const Eigen::MatrixBase<A>& truth, const Eigen::MatrixBase<B>& predicted) {
  return (truth - predicted).squaredNorm() / static_cast<double>(truth.size());
}

template <typename A, typename B>
double mae(const Eigen::MatrixBase<A>& truth, const Eigen::MatrixBase<B>& predicted) {
  return (truth - predicted).cwiseAbs().sum() / static_cast<double>(truth.size());
}

}  // namespace mdbg
