#include "mdbg/diffusion.hpp"

#include <algorithm>

namespace mdbg {

std::string to_string(Normalization n) { return n == Normalization::row_stochastic ? "row" : "symmetric"; }

Normalization normalization_from_string(const std::string& name) {
  if (name == "row" || name == "row-stochastic" || name == "row_stochastic") return Normalization::row_stochastic;
  if (name == "symmetric" || name == "sym") return Normalization::symmetric;
  throw Error(ErrorCode::InvalidConfig, "unknown normalization '" + name + "'");
}

void DiffusionConfig::validate() const {
  if (!(teleport > 0.0 && teleport <= 1.0)) throw Error(ErrorCode::InvalidConfig, "teleport must lie in (0, 1]");
  if (top_k < 1) throw Error(ErrorCode::InvalidConfig, "top_k must be >= 1");
  if (!(tolerance > 0.0)) throw Error(ErrorCode::InvalidConfig, "tolerance must be positive");
  if (max_iterations < 1) throw Error(ErrorCode::InvalidConfig, "max_iterations must be >= 1");
  if (sequential_weight < 0.0 || hyper_weight < 0.0) {
    throw Error(ErrorCode::InvalidConfig, "edge weight multipliers must be non-negative");
  }
}

SparseRowMatrix<double> transition_matrix(const MdBG& g, const DiffusionConfig& cfg) {
  cfg.validate();
  return transition_matrix<double>(g, cfg.normalization, cfg.sequential_weight,
                                   cfg.per_dimension ? 0.0 : cfg.hyper_weight);
}

void DiffusedGraph::push_row(std::vector<DiffusedEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) { return x.target < y.target; });
  entries_.insert(entries_.end(), entries.begin(), entries.end());
  offsets_.push_back(entries_.size());
}

DiffusedGraph diffuse(const MdBG& g, const DiffusionConfig& cfg) {
  const auto t = transition_matrix(g, cfg);
  const SparseRowMatrix<double> transposed = t.transpose();
  const auto n = static_cast<std::size_t>(t.rows());
  std::vector<std::vector<DiffusedEntry>> rows(n);
  parallel_for(n, thread_count(cfg.threads), [&](std::size_t s) {
    const auto solve = ppr_row_transposed(transposed, static_cast<Eigen::Index>(s), cfg);
    rows[s] = top_k_entries(solve.values, cfg.top_k, cfg.renormalize);
  });
  DiffusedGraph out;
  for (auto& row : rows) out.push_row(std::move(row));
  return out;
}

}  // namespace mdbg
