#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdbg/ingest.hpp"

namespace mdbg {

using Symbol = std::int32_t;

enum class BinStrategy { uniform, quantile };

std::string to_string(BinStrategy strategy);
BinStrategy bin_strategy_from_string(const std::string& name);

/// Bin table for one dimension. Symbols run 1..alpha; bin j covers
/// [edges[j-2], edges[j-1]), the outer bins are open-ended, and a value equal
/// to an edge belongs to the bin above it.
struct DimensionBins {
  int alpha = 1;
  std::vector<double> edges;  // alpha - 1 strictly increasing thresholds
  BinStrategy strategy = BinStrategy::uniform;
  double train_min = 0.0;
  double train_max = 0.0;

  Symbol symbol(double value) const;
  /// Midpoint of the bin; outer bins are closed by train_min / train_max.
  double center(Symbol symbol) const;
  double lower(Symbol symbol) const;
  double upper(Symbol symbol) const;

  bool operator==(const DimensionBins&) const = default;
};

/// Discrete counterpart of a TimeSeriesDataset: symbols(i, t) in 1..alphabet_sizes[i].
struct DiscreteDataset {
  RowMatrix<Symbol> symbols;
  std::vector<int> alphabet_sizes;

  Eigen::Index dims() const { return symbols.rows(); }
  Eigen::Index length() const { return symbols.cols(); }
};

/// Per-dimension discretization functions fitted on a train split.
/// Immutable once fitted.
class Discretizer {
 public:
  Discretizer() = default;
  explicit Discretizer(std::vector<DimensionBins> dims);

  Eigen::Index dims() const { return static_cast<Eigen::Index>(dims_.size()); }
  const DimensionBins& dimension(Eigen::Index i) const { return dims_.at(static_cast<std::size_t>(i)); }
  std::vector<int> alphabet_sizes() const;

  bool operator==(const Discretizer&) const = default;

 private:
  std::vector<DimensionBins> dims_;
};

/// Equal-width bins between the train min and max of each dimension.
/// `alphabets` holds one size shared by every dimension, or one per dimension.
/// A constant dimension collapses to a single bin (alpha 1) with a warning.
Discretizer fit_uniform(const TimeSeriesDataset& train, std::span<const int> alphabets);

/// Equal-frequency bins. Repeated quantiles are merged, so a dimension may
/// end up with fewer than the requested number of symbols.
Discretizer fit_quantile(const TimeSeriesDataset& train, std::span<const int> alphabets);

Discretizer fit(const TimeSeriesDataset& train, std::span<const int> alphabets, BinStrategy strategy);

DiscreteDataset apply(const Discretizer& d, const TimeSeriesDataset& ds);

double bin_center(const Discretizer& d, Eigen::Index dim, Symbol symbol);

nlohmann::json to_json(const Discretizer& d);
Discretizer discretizer_from_json(const nlohmann::json& doc);

}  // namespace mdbg
