#include "mdbg/discretize.hpp"

#include <algorithm>
#include <cmath>

#include "mdbg/error.hpp"
#include "mdbg/log.hpp"

namespace mdbg {

std::string to_string(BinStrategy strategy) {
  return strategy == BinStrategy::uniform ? "uniform" : "quantile";
}

BinStrategy bin_strategy_from_string(const std::string& name) {
  if (name == "uniform") return BinStrategy::uniform;
  if (name == "quantile") return BinStrategy::quantile;
  throw Error(ErrorCode::InvalidConfig, "unknown discretization strategy '" + name + "'");
}

Symbol DimensionBins::symbol(double value) const {
  // Edges equal to the value count as "below", which sends it to the upper bin.
  return 1 + static_cast<Symbol>(std::upper_bound(edges.begin(), edges.end(), value) - edges.begin());
}

double DimensionBins::lower(Symbol s) const {
  return s <= 1 ? train_min : edges[static_cast<std::size_t>(s - 2)];
}

double DimensionBins::upper(Symbol s) const {
  return s >= alpha ? train_max : edges[static_cast<std::size_t>(s - 1)];
}

double DimensionBins::center(Symbol s) const {
  if (s < 1 || s > alpha) {
    throw Error(ErrorCode::SymbolOutOfRange,
                "symbol " + std::to_string(s) + " outside 1.." + std::to_string(alpha));
  }
  return 0.5 * (lower(s) + upper(s));
}

Discretizer::Discretizer(std::vector<DimensionBins> dims) : dims_(std::move(dims)) {
  for (const auto& bins : dims_) {
    if (bins.alpha < 1 || static_cast<int>(bins.edges.size()) != bins.alpha - 1) {
      throw Error(ErrorCode::InvalidAlphabet, "alpha " + std::to_string(bins.alpha) + " with " +
                                                  std::to_string(bins.edges.size()) + " edges");
    }
    for (std::size_t j = 1; j < bins.edges.size(); ++j) {
      if (!(bins.edges[j - 1] < bins.edges[j])) {
        throw Error(ErrorCode::InvalidAlphabet, "bin edges must be strictly increasing");
      }
    }
  }
}

std::vector<int> Discretizer::alphabet_sizes() const {
  std::vector<int> out;
  out.reserve(dims_.size());
  for (const auto& bins : dims_) out.push_back(bins.alpha);
  return out;
}

namespace {

std::vector<int> expand_alphabets(const TimeSeriesDataset& train, std::span<const int> alphabets) {
  if (train.length() == 0 || train.dims() == 0) {
    throw Error(ErrorCode::EmptyTrain, "cannot fit a discretizer on an empty train split");
  }
  const auto dims = static_cast<std::size_t>(train.dims());
  std::vector<int> out;
  if (alphabets.size() == 1) {
    out.assign(dims, alphabets[0]);
  } else if (alphabets.size() == dims) {
    out.assign(alphabets.begin(), alphabets.end());
  } else {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(alphabets.size()) + " alphabet sizes for " +
                                                  std::to_string(dims) + " dimensions");
  }
  for (int a : out) {
    if (a < 1) throw Error(ErrorCode::InvalidAlphabet, "alphabet size must be >= 1, got " + std::to_string(a));
  }
  return out;
}

DimensionBins constant_bins(Eigen::Index dim, double value, BinStrategy strategy) {
  log::warn("constant_dimension", {{"dim", dim}, {"value", value}});
  return {1, {}, strategy, value, value};
}

}  // namespace

Discretizer fit_uniform(const TimeSeriesDataset& train, std::span<const int> alphabets) {
  const auto sizes = expand_alphabets(train, alphabets);
  std::vector<DimensionBins> dims;
  for (Eigen::Index i = 0; i < train.dims(); ++i) {
    const double lo = train.values.row(i).minCoeff();
    const double hi = train.values.row(i).maxCoeff();
    const int alpha = sizes[static_cast<std::size_t>(i)];
    if (hi == lo) {
      dims.push_back(constant_bins(i, lo, BinStrategy::uniform));
      continue;
    }
    DimensionBins bins{alpha, {}, BinStrategy::uniform, lo, hi};
    const double width = (hi - lo) / alpha;
    for (int j = 1; j < alpha; ++j) bins.edges.push_back(lo + j * width);
    dims.push_back(std::move(bins));
  }
  return Discretizer(std::move(dims));
}

Discretizer fit_quantile(const TimeSeriesDataset& train, std::span<const int> alphabets) {
  const auto sizes = expand_alphabets(train, alphabets);
  std::vector<DimensionBins> dims;
  for (Eigen::Index i = 0; i < train.dims(); ++i) {
    std::vector<double> sorted(train.values.row(i).begin(), train.values.row(i).end());
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front();
    const double hi = sorted.back();
    if (hi == lo) {
      dims.push_back(constant_bins(i, lo, BinStrategy::quantile));
      continue;
    }
    const int alpha = sizes[static_cast<std::size_t>(i)];
    DimensionBins bins{1, {}, BinStrategy::quantile, lo, hi};
    const auto n = sorted.size();
    for (int j = 1; j < alpha; ++j) {
      // Linear interpolation between order statistics.
      const double pos = static_cast<double>(j) / alpha * static_cast<double>(n - 1);
      const auto below = static_cast<std::size_t>(std::floor(pos));
      const auto above = std::min(below + 1, n - 1);
      const double q = sorted[below] + (pos - static_cast<double>(below)) * (sorted[above] - sorted[below]);
      if (q > lo && (bins.edges.empty() || q > bins.edges.back())) bins.edges.push_back(q);
    }
    bins.alpha = static_cast<int>(bins.edges.size()) + 1;
    if (bins.alpha != alpha) {
      log::warn("quantile_bins_merged", {{"dim", i}, {"requested", alpha}, {"alpha", bins.alpha}});
    }
    dims.push_back(std::move(bins));
  }
  return Discretizer(std::move(dims));
}

Discretizer fit(const TimeSeriesDataset& train, std::span<const int> alphabets, BinStrategy strategy) {
  return strategy == BinStrategy::uniform ? fit_uniform(train, alphabets) : fit_quantile(train, alphabets);
}

DiscreteDataset apply(const Discretizer& d, const TimeSeriesDataset& ds) {
  if (ds.dims() != d.dims()) {
    throw Error(ErrorCode::DimensionMismatch, "discretizer has " + std::to_string(d.dims()) +
                                                  " dimensions, dataset has " + std::to_string(ds.dims()));
  }
  DiscreteDataset out;
  out.alphabet_sizes = d.alphabet_sizes();
  out.symbols.resize(ds.dims(), ds.length());
  for (Eigen::Index i = 0; i < ds.dims(); ++i) {
    const auto& bins = d.dimension(i);
    for (Eigen::Index t = 0; t < ds.length(); ++t) out.symbols(i, t) = bins.symbol(ds.values(i, t));
  }
  return out;
}

double bin_center(const Discretizer& d, Eigen::Index dim, Symbol symbol) {
  if (dim < 0 || dim >= d.dims()) {
    throw Error(ErrorCode::DimensionMismatch, "dimension " + std::to_string(dim) + " out of range");
  }
  return d.dimension(dim).center(symbol);
}

nlohmann::json to_json(const Discretizer& d) {
  nlohmann::json dims = nlohmann::json::array();
  for (Eigen::Index i = 0; i < d.dims(); ++i) {
    const auto& bins = d.dimension(i);
    dims.push_back({{"alpha", bins.alpha},
                    {"edges", bins.edges},
                    {"strategy", to_string(bins.strategy)},
                    {"train_min", bins.train_min},
                    {"train_max", bins.train_max}});
  }
  return {{"dimensions", std::move(dims)}};
}

Discretizer discretizer_from_json(const nlohmann::json& doc) {
  try {
    std::vector<DimensionBins> dims;
    for (const auto& entry : doc.at("dimensions")) {
      dims.push_back({entry.at("alpha").get<int>(), entry.at("edges").get<std::vector<double>>(),
                      bin_strategy_from_string(entry.at("strategy").get<std::string>()),
                      entry.at("train_min").get<double>(), entry.at("train_max").get<double>()});
    }
    return Discretizer(std::move(dims));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedArchive, std::string("discretizer document: ") + e.what());
  }
}

}  // namespace mdbg
