#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "mdbg/error.hpp"
#include "mdbg/graph.hpp"
#include "mdbg/parallel.hpp"

namespace mdbg {

enum class Normalization { row_stochastic, symmetric };

std::string to_string(Normalization n);
Normalization normalization_from_string(const std::string& name);

struct DiffusionConfig {
  double teleport = 0.15;
  int top_k = 32;
  Normalization normalization = Normalization::row_stochastic;
  double tolerance = 1e-9;
  int max_iterations = 10'000;
  /// Relative influence of the two edge kinds in the merged adjacency.
  double sequential_weight = 1.0;
  double hyper_weight = 1.0;
  /// Diffuse inside each dimension only (hyper edges left out).
  bool per_dimension = false;
  /// Rescale kept entries of every sparsified row to sum to 1.
  bool renormalize = false;
  unsigned threads = 0;

  void validate() const;
};

template <typename Scalar>
using SparseRowMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Merged weighted adjacency: sequential edges src -> dst, hyper edges in
/// both directions. Rows without any outgoing weight get a unit self-loop.
template <typename Scalar = double>
SparseRowMatrix<Scalar> adjacency(const MdBG& g, Scalar sequential_weight = 1, Scalar hyper_weight = 1) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  if (n == 0) throw Error(ErrorCode::EmptyGraph, "cannot diffuse an empty graph");
  std::vector<Eigen::Triplet<Scalar>> triplets;
  triplets.reserve(g.sequential_edges().size() + 2 * g.hyper_edges().size() + static_cast<std::size_t>(n));
  if (sequential_weight != Scalar(0)) {
    for (const auto& e : g.sequential_edges()) {
      triplets.emplace_back(e.src, e.dst, sequential_weight * static_cast<Scalar>(e.weight));
    }
  }
  if (hyper_weight != Scalar(0)) {
    for (const auto& e : g.hyper_edges()) {
      const Scalar w = hyper_weight * static_cast<Scalar>(e.weight);
      triplets.emplace_back(e.a, e.b, w);
      triplets.emplace_back(e.b, e.a, w);
    }
  }
  std::vector<Scalar> out(static_cast<std::size_t>(n), Scalar(0));
  for (const auto& t : triplets) out[static_cast<std::size_t>(t.row())] += t.value();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(out[static_cast<std::size_t>(i)] > Scalar(0))) triplets.emplace_back(i, i, Scalar(1));
  }
  SparseRowMatrix<Scalar> a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

/// Row-stochastic: D^-1 A. Symmetric: D^-1/2 A D^-1/2. D holds the row
/// (out-weight) sums, which are positive because of the self-loop rule.
template <typename Scalar>
SparseRowMatrix<Scalar> normalize(const SparseRowMatrix<Scalar>& a, Normalization mode) {
  const Vector<Scalar> degree = a * Vector<Scalar>::Ones(a.cols());
  SparseRowMatrix<Scalar> t = a;
  for (Eigen::Index i = 0; i < t.outerSize(); ++i) {
    for (typename SparseRowMatrix<Scalar>::InnerIterator it(t, i); it; ++it) {
      if (mode == Normalization::row_stochastic) {
        it.valueRef() /= degree(i);
      } else {
        it.valueRef() /= std::sqrt(degree(i) * degree(it.col()));
      }
    }
  }
  return t;
}

template <typename Scalar = double>
SparseRowMatrix<Scalar> transition_matrix(const MdBG& g, Normalization mode, Scalar sequential_weight = 1,
                                          Scalar hyper_weight = 1) {
  return normalize<Scalar>(adjacency<Scalar>(g, sequential_weight, hyper_weight), mode);
}

SparseRowMatrix<double> transition_matrix(const MdBG& g, const DiffusionConfig& cfg);

template <typename Scalar>
struct PprSolve {
  Vector<Scalar> values;
  int iterations = 0;
  Scalar residual = 0;
};

/// One row of a (I - (1 - a) T)^-1 by restarted power iteration
///   pi <- a e_s + (1 - a) pi T
/// until the L1 change between sweeps is at most cfg.tolerance. Takes T
/// already transposed so each sweep is a row-major gather.
template <typename Scalar>
PprSolve<Scalar> ppr_row_transposed(const SparseRowMatrix<Scalar>& transposed, Eigen::Index source,
                                    const DiffusionConfig& cfg) {
  const Scalar teleport = static_cast<Scalar>(cfg.teleport);
  const Scalar carry = Scalar(1) - teleport;
  PprSolve<Scalar> out;
  out.values = Vector<Scalar>::Zero(transposed.rows());
  out.values(source) = teleport;
  Vector<Scalar> next(transposed.rows());
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    next.noalias() = carry * (transposed * out.values);
    next(source) += teleport;
    out.residual = (next - out.values).template lpNorm<1>();
    out.values.swap(next);
    out.iterations = it;
    if (out.residual <= static_cast<Scalar>(cfg.tolerance)) return out;
  }
  throw Error(ErrorCode::NoConvergence, "PPR from source " + std::to_string(source) + " stopped after " +
                                            std::to_string(cfg.max_iterations) +
                                            " iterations with residual " + std::to_string(static_cast<double>(out.residual)));
}

template <typename Scalar>
PprSolve<Scalar> ppr_row(const SparseRowMatrix<Scalar>& t, Eigen::Index source, const DiffusionConfig& cfg) {
  cfg.validate();
  const SparseRowMatrix<Scalar> transposed = t.transpose();
  return ppr_row_transposed(transposed, source, cfg);
}

/// Full diffusion matrix, row s being the PPR vector of source s. Dense, so
/// meant for graphs that fit in memory as N x N.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> ppr_diffuse(const SparseRowMatrix<Scalar>& t,
                                                                  const DiffusionConfig& cfg) {
  cfg.validate();
  if (t.rows() == 0) throw Error(ErrorCode::EmptyGraph, "cannot diffuse an empty graph");
  const SparseRowMatrix<Scalar> transposed = t.transpose();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> pi(t.rows(), t.cols());
  parallel_for(static_cast<std::size_t>(t.rows()), thread_count(cfg.threads), [&](std::size_t s) {
    pi.row(static_cast<Eigen::Index>(s)) = ppr_row_transposed(transposed, static_cast<Eigen::Index>(s), cfg).values.transpose();
  });
  return pi;
}

struct DiffusedEntry {
  NodeId target = 0;
  double weight = 0.0;

  bool operator==(const DiffusedEntry&) const = default;
};

/// Sparsified diffusion in CSR form; each row keeps at most top_k entries,
/// stored in increasing target order.
class DiffusedGraph {
 public:
  DiffusedGraph() : offsets_{0} {}

  std::size_t node_count() const { return offsets_.size() - 1; }
  std::size_t entry_count() const { return entries_.size(); }
  std::span<const DiffusedEntry> row(NodeId source) const {
    return std::span<const DiffusedEntry>(entries_).subspan(offsets_.at(source), offsets_.at(source + 1) - offsets_[source]);
  }

  /// Appends the next row; entries are sorted by target here.
  void push_row(std::vector<DiffusedEntry> entries);

  bool operator==(const DiffusedGraph&) const = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<DiffusedEntry> entries_;
};

/// The `top_k` largest non-zero entries of one row, ties going to the
/// smaller target id.
template <typename Derived>
std::vector<DiffusedEntry> top_k_entries(const Eigen::MatrixBase<Derived>& row, int top_k, bool renormalize = false) {
  std::vector<Eigen::Index> order;
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (row(j) != 0) order.push_back(j);
  }
  const auto keep = std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(top_k, 0)));
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&row](Eigen::Index x, Eigen::Index y) { return row(x) > row(y) || (row(x) == row(y) && x < y); });
  std::vector<DiffusedEntry> out;
  out.reserve(keep);
  double total = 0.0;
  for (std::size_t j = 0; j < keep; ++j) {
    out.push_back({static_cast<NodeId>(order[j]), static_cast<double>(row(order[j]))});
    total += out.back().weight;
  }
  if (renormalize && total > 0.0) {
    for (auto& e : out) e.weight /= total;
  }
  return out;
}

template <typename Derived>
DiffusedGraph sparsify_topk(const Eigen::MatrixBase<Derived>& p, int top_k, bool renormalize = false) {
  if (top_k < 1) throw Error(ErrorCode::InvalidConfig, "top_k must be >= 1");
  DiffusedGraph out;
  for (Eigen::Index s = 0; s < p.rows(); ++s) out.push_row(top_k_entries(p.row(s), top_k, renormalize));
  return out;
}

/// Transition matrix, per-source PPR and top-k sparsification in one pass;
/// rows are solved in parallel and never held densely all at once.
DiffusedGraph diffuse(const MdBG& g, const DiffusionConfig& cfg);

}  // namespace mdbg
