#include "criteria.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "mdbg/archive.hpp"
#include "mdbg/diffusion.hpp"
#include "mdbg/error.hpp"
#include "mdbg/forecast.hpp"
#include "mdbg/ingest.hpp"
#include "mdbg/query.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

namespace mdbg::acceptance {

namespace {

// Tolerances and sizes, fixed here so every run checks the same thing.
constexpr double kNodeTolerance = 0.10;
constexpr double kEdgeTolerance = 0.15;
constexpr double kEttSecondsPerDataset = 120.0;
constexpr int kEttOrder = 4;

constexpr int kOracleInstances = 1000;
constexpr double kOracleSeconds = 30.0;

constexpr int kPprGraphs = 100;
constexpr std::size_t kPprMaxNodes = 200;
constexpr double kPprOracleTolerance = 1e-6;
constexpr double kRowSumTolerance = 1e-6;
constexpr double kClosedFormTolerance = 1e-12;

constexpr int kResolveQueries = 10000;

constexpr int kSampleDraws = 10000;

constexpr int kRoundTripGraphs = 100;

using Clock = std::chrono::steady_clock;

std::string fmt(double v, int precision = 3) {
  std::ostringstream out;
  out.precision(precision);
  out << v;
  return out.str();
}

struct Outcome {
  Status status = Status::fail;
  std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::pass : Status::fail, std::move(detail)}; }

// ---------------------------------------------------------------------------
// 1. Graph sizes on ETT-small

struct TableRow {
  const char* dataset;
  std::size_t train_rows;
  int alpha[3];
  std::size_t nodes[3];
  std::size_t edges[3];
};

constexpr TableRow kGraphSizes[] = {
    {"ETTh1", 8640, {20, 25, 30}, {4137, 6044, 8104}, {207445, 263494, 304185}},
    {"ETTh2", 8640, {20, 25, 30}, {1708, 2520, 3540}, {93531, 140562, 180012}},
    {"ETTm1", 34560, {20, 25, 30}, {3835, 5678, 7918}, {306653, 454542, 604859}},
    {"ETTm2", 34560, {20, 25, 30}, {1502, 2215, 3044}, {102003, 162246, 241866}},
};

bool within(std::size_t value, std::size_t target, double tolerance) {
  return std::abs(static_cast<double>(value) - static_cast<double>(target)) <= tolerance * static_cast<double>(target);
}

Outcome ett_graph_sizes(const Options& options) {
  std::vector<std::string> missing;
  for (const auto& row : kGraphSizes) {
    if (!std::filesystem::exists(options.ett_dir / (std::string(row.dataset) + ".csv"))) missing.push_back(row.dataset);
  }
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    return {Status::skip, "ETT-small CSVs not found in '" + options.ett_dir.string() + "' (missing " + names +
                              "); set MDBG_ETT_DIR or pass --ett-dir"};
  }

  bool ok = true;
  std::ostringstream detail;
  for (const auto& row : kGraphSizes) {
    const auto start = Clock::now();
    const auto ds = load_csv(options.ett_dir / (std::string(row.dataset) + ".csv"), true);
    const auto train = ds.slice(0, static_cast<Eigen::Index>(row.train_rows));
    std::size_t previous = 0;
    detail << row.dataset << " {";
    for (int j = 0; j < 3; ++j) {
      const std::vector<int> alphabets{row.alpha[j]};
      const auto d = fit_uniform(train, alphabets);
      const auto s = stats(build(train, apply(d, train), kEttOrder));
      const bool nodes_ok = within(s.nodes, row.nodes[j], kNodeTolerance);
      const bool edges_ok = within(s.total_edges_directed(), row.edges[j], kEdgeTolerance) ||
                            within(s.total_edges_undirected_hyper(), row.edges[j], kEdgeTolerance);
      const bool increasing = s.nodes > previous;
      ok = ok && nodes_ok && edges_ok && increasing;
      previous = s.nodes;
      detail << (j ? "; " : "") << "a=" << row.alpha[j] << " nodes " << s.nodes << "/" << row.nodes[j]
             << (nodes_ok ? "" : "!") << " edges seq " << s.sequential_edges << " seq+hyper "
             << s.total_edges_undirected_hyper() << " seq+2hyper " << s.total_edges_directed() << "/" << row.edges[j]
             << (edges_ok ? "" : "!") << (increasing ? "" : " not-increasing");
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    ok = ok && seconds <= kEttSecondsPerDataset;
    detail << "; " << fmt(seconds) << " s} ";
  }
  return verdict(ok, detail.str());
}

// ---------------------------------------------------------------------------
// 2. Partition sizes

Outcome partition_sizes(const Options&) {
  struct Case {
    const char* name;
    SplitSpec spec;
    std::size_t expected[3];
  };
  const Case cases[] = {{"ETTh", SplitSpec::ett_hourly(12), {8533, 2785, 2785}},
                        {"ETTm", SplitSpec::ett_minutely(12), {34453, 11425, 11425}}};
  bool ok = true;
  std::ostringstream detail;
  for (const auto& c : cases) {
    // Split an actual series of the full length so the counts come from real split lengths.
    TimeSeriesDataset ds;
    ds.values = RowMatrix<double>::Zero(1, c.spec.test_end);
    const auto parts = split(ds, c.spec);
    const std::size_t got[3] = {window_count(static_cast<std::size_t>(parts.train.length()), 12, 96),
                                window_count(static_cast<std::size_t>(parts.val.length()), 12, 96),
                                window_count(static_cast<std::size_t>(parts.test.length()), 12, 96)};
    detail << c.name << " " << got[0] << "/" << got[1] << "/" << got[2] << " ";
    for (int j = 0; j < 3; ++j) ok = ok && got[j] == c.expected[j];
  }
  return verdict(ok, detail.str() + "(expected 8533/2785/2785, 34453/11425/11425)");
}

// ---------------------------------------------------------------------------
// 3. Construction oracle and 4. weight conservation

Outcome construction_oracle(const Options&) {
  std::mt19937_64 rng(20240601);
  const auto start = Clock::now();
  int mismatches = 0;
  std::string first;
  for (int trial = 0; trial < kOracleInstances; ++trial) {
    const auto inst = oracle::random_instance(rng, 3, 50, 5, {2, 3, 4});
    const auto why = oracle::compare(build(inst.raw, inst.disc, inst.k), oracle::naive_build(inst.raw, inst.disc, inst.k));
    if (!why.empty()) {
      if (mismatches++ == 0) first = "trial " + std::to_string(trial) + ": " + why;
    }
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  std::string detail = std::to_string(kOracleInstances) + " instances, " + std::to_string(mismatches) + " mismatches, " +
                       fmt(seconds) + " s (limit " + fmt(kOracleSeconds) + " s)";
  if (!first.empty()) detail += "; first: " + first;
  return verdict(mismatches == 0 && seconds <= kOracleSeconds, detail);
}

Outcome weight_conservation(const Options&) {
  std::mt19937_64 rng(20240602);
  int violations = 0;
  int univariate = 0;
  int univariate_with_hyper = 0;
  for (int trial = 0; trial < kOracleInstances; ++trial) {
    const auto inst = oracle::random_instance(rng, 3, 50, 5, {2, 3, 4});
    const auto s = stats(build(inst.raw, inst.disc, inst.k));
    const auto expected = static_cast<Weight>(inst.raw.length() - inst.k + 1);
    for (const auto& d : s.per_dimension) violations += d.sequential_weight == expected ? 0 : 1;
    if (inst.raw.dims() == 1) {
      ++univariate;
      univariate_with_hyper += s.hyper_edges == 0 ? 0 : 1;
    }
  }
  return verdict(violations == 0 && univariate > 0 && univariate_with_hyper == 0,
                 std::to_string(kOracleInstances) + " instances, " + std::to_string(violations) +
                     " dimensions off S-k+1, " + std::to_string(univariate) + " with D=1 of which " +
                     std::to_string(univariate_with_hyper) + " have hyper edges");
}

// ---------------------------------------------------------------------------
// 5. PPR

Outcome ppr_correctness(const Options&) {
  std::mt19937_64 rng(20240603);
  double worst_oracle = 0.0;
  double worst_row_sum = 0.0;
  int identity_failures = 0;
  int graphs = 0;
  std::size_t largest = 0;
  while (graphs < kPprGraphs) {
    const auto inst = oracle::random_instance(rng, 3, 300, 10, {2, 3, 4});
    const auto g = build(inst.raw, inst.disc, inst.k);
    if (g.node_count() > kPprMaxNodes) continue;
    ++graphs;
    largest = std::max(largest, g.node_count());
    const auto t = transition_matrix<double>(g, Normalization::row_stochastic);
    DiffusionConfig cfg;
    const auto pi = ppr_diffuse(t, cfg);
    const auto dense = oracle::dense_ppr(Eigen::MatrixXd(t), cfg.teleport);
    worst_oracle = std::max(worst_oracle, (pi - dense).cwiseAbs().maxCoeff());
    worst_row_sum = std::max(worst_row_sum, (pi.rowwise().sum().array() - 1.0).abs().maxCoeff());

    DiffusionConfig one;
    one.teleport = 1.0;
    const auto identity = ppr_diffuse(t, one);
    if (identity != Eigen::MatrixXd::Identity(identity.rows(), identity.cols())) ++identity_failures;
  }

  // Two nodes pointing at each other: Pi = a / (1 - (1-a)^2) [[1, 1-a], [1-a, 1]].
  const auto cycle =
      MdBG::from_parts(2, {2}, {{0, {1}}, {0, {2}}}, {{0, 1, 1}, {1, 0, 1}}, {}, std::vector<FeatureSet>(2));
  DiffusionConfig tight;
  tight.tolerance = 1e-15;
  const auto pi2 = ppr_diffuse(transition_matrix<double>(cycle, Normalization::row_stochastic), tight);
  const double a = tight.teleport;
  const double scale = a / (1.0 - (1.0 - a) * (1.0 - a));
  Eigen::Matrix2d expected;
  expected << scale, (1.0 - a) * scale, (1.0 - a) * scale, scale;
  const double closed_form = (pi2 - expected).cwiseAbs().maxCoeff();

  const bool ok = worst_oracle <= kPprOracleTolerance && worst_row_sum <= kRowSumTolerance && identity_failures == 0 &&
                  closed_form <= kClosedFormTolerance;
  return verdict(ok, std::to_string(graphs) + " graphs (<= " + std::to_string(largest) + " nodes): max |iter - LU| " +
                         fmt(worst_oracle) + ", max |row sum - 1| " + fmt(worst_row_sum) + ", teleport=1 non-identity " +
                         std::to_string(identity_failures) + ", 2x2 closed-form error " + fmt(closed_form));
}

// ---------------------------------------------------------------------------
// 6. Masking

Outcome masking_oracle(const Options&) {
  std::mt19937_64 rng(20240604);
  int queries = 0;
  int ties = 0;
  int exact = 0;
  int mismatches = 0;
  int window_misses = 0;
  int windows = 0;
  while (queries < kResolveQueries) {
    const auto inst = oracle::random_instance(rng, 3, 60, 6, {2, 3, 4});
    const auto g = build(inst.raw, inst.disc, inst.k);
    const NearestIndex index(g);
    std::uniform_int_distribution<int> dim(0, g.dimensions() - 1);
    for (int q = 0; q < 100 && queries < kResolveQueries; ++q, ++queries) {
      NodeKey key;
      key.dim = dim(rng);
      std::uniform_int_distribution<Symbol> symbol(1, g.alphabet_sizes()[key.dim]);
      for (int j = 0; j < inst.k - 1; ++j) key.symbols.push_back(symbol(rng));

      const auto brute = oracle::brute_resolve(g, key.dim, key.symbols);
      const auto r = resolve(g, key);
      if (r.node != brute.node || r.distance != brute.distance || index.resolve(key) != r) ++mismatches;
      exact += r.exact ? 1 : 0;
      int at_best = 0;
      for (NodeId id : g.nodes_in_dimension(key.dim)) {
        std::int64_t d = 0;
        for (std::size_t j = 0; j < key.symbols.size(); ++j) d += std::abs(g.node(id).symbols[j] - key.symbols[j]);
        at_best += d == brute.distance ? 1 : 0;
      }
      ties += at_best > 1 ? 1 : 0;
    }

    // Windows cut from the training series itself.
    const auto len = std::min<Eigen::Index>(12, inst.raw.length());
    for (Eigen::Index start = 0; start + len <= inst.raw.length(); start += len) {
      ++windows;
      const auto w = QueryWindow::from_raw(inst.discretizer, inst.raw.values.middleCols(start, len));
      for (const auto& res : mask(index, g, w, inst.k).resolutions) {
        if (!res.exact || res.distance != 0) {
          ++window_misses;
          break;
        }
      }
    }
  }
  return verdict(mismatches == 0 && ties > 0 && window_misses == 0,
                 std::to_string(queries) + " queries (" + std::to_string(ties) + " ties, " + std::to_string(exact) +
                     " exact), " + std::to_string(mismatches) + " disagree with the exhaustive scan; " +
                     std::to_string(windows) + " training windows, " + std::to_string(window_misses) +
                     " with a non-exact tuple");
}

// ---------------------------------------------------------------------------
// 7. Sampling

Outcome sampling_statistics(const Options&) {
  FeatureSet set{{{1.0}, 3}, {{2.0}, 1}};
  const auto g = MdBG::from_parts(2, {1}, {{0, {1}}}, {}, {}, {set});
  SampleConfig cfg;
  cfg.f = kSampleDraws;
  cfg.seed = 20240605;
  const auto draws = sample_features(g, 0, cfg);
  std::vector<double> observed(2, 0.0);
  for (Eigen::Index r = 0; r < draws.rows(); ++r) observed[draws(r, 0) == 1.0 ? 0 : 1] += 1.0;
  const double stat = oracle::chi_square(observed, {0.75, 0.25});
  const double critical = oracle::chi_square_critical_001(1);
  const bool repeatable = sample_features(g, 0, cfg) == draws;
  return verdict(stat < critical && repeatable,
                 std::to_string(kSampleDraws) + " draws: a=" + fmt(observed[0], 6) + " b=" + fmt(observed[1], 6) +
                     ", chi2 " + fmt(stat) + " < " + fmt(critical, 6) + (repeatable ? ", same seed repeats" : ", same seed differs"));
}

// ---------------------------------------------------------------------------
// 8. Round trip

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Outcome round_trip(const Options&) {
  std::mt19937_64 rng(20240606);
  int structural = 0;
  int bytes = 0;
  for (int trial = 0; trial < kRoundTripGraphs; ++trial) {
    const auto inst = oracle::random_instance(rng, 3, 50, 6, {2, 3, 4});
    const auto g = build(inst.raw, inst.disc, inst.k);
    std::optional<DiffusedGraph> diffused;
    if (trial % 2 == 0) {
      DiffusionConfig cfg;
      cfg.top_k = 8;
      diffused = diffuse(g, cfg);
    }
    ArchiveMetadata meta;
    meta.discretizer = inst.discretizer;
    meta.parameters = {{"k", inst.k}, {"trial", trial}};
    testing::TempDir first;
    testing::TempDir second;
    save(g, diffused ? &*diffused : nullptr, first.path(), meta);
    const auto back = load(first.path());
    if (!(back.graph == g) || back.diffused != diffused || back.discretizer != meta.discretizer) ++structural;

    ArchiveMetadata again;
    again.discretizer = back.discretizer;
    again.parameters = back.manifest.parameters;
    save(back.graph, back.diffused ? &*back.diffused : nullptr, second.path(), again);
    for (const auto& entry : std::filesystem::directory_iterator(first.path())) {
      const auto name = entry.path().filename();
      if (read_file(entry.path()) != read_file(second.path() / name)) {
        ++bytes;
        break;
      }
    }
  }
  return verdict(structural == 0 && bytes == 0, std::to_string(kRoundTripGraphs) + " graphs, " +
                                                    std::to_string(structural) + " structural and " +
                                                    std::to_string(bytes) + " byte-level differences");
}

// ---------------------------------------------------------------------------
// 9. Forecast sanity

Outcome forecast_sanity(const Options&) {
  std::mt19937_64 rng(20240607);
  constexpr int k = 4;
  constexpr int train_length = 240;
  constexpr int input_length = 12;
  constexpr int horizon = 24;
  int sequences = 0;
  int steps = 0;
  int correct = 0;
  int not_beaten = 0;
  double total_graph = 0.0;
  double total_repeat = 0.0;
  for (int period = 1; period <= k - 1; ++period) {
    for (int rep = 0; rep < 20; ++rep) {
      const int dims = std::uniform_int_distribution<int>(1, 3)(rng);
      std::uniform_real_distribution<double> value(-5.0, 5.0);
      TimeSeriesDataset full;
      full.values.resize(dims, train_length + input_length + horizon);
      bool varies = period == 1;
      for (int i = 0; i < dims; ++i) {
        std::vector<double> pattern(static_cast<std::size_t>(period));
        for (auto& v : pattern) v = value(rng);
        for (Eigen::Index t = 0; t < full.values.cols(); ++t) full.values(i, t) = pattern[t % period];
        if (period > 1 && pattern[0] != pattern[1]) varies = true;
      }
      ++sequences;
      const auto train = full.slice(0, train_length);
      const std::vector<int> alphabets{20};
      const auto d = fit_uniform(train, alphabets);
      const auto g = build(train, apply(d, train), k);

      // Next-symbol accuracy from every true state after the training span.
      const auto symbols = apply(d, full).symbols;
      for (int i = 0; i < dims; ++i) {
        for (Eigen::Index t = train_length; t + k - 1 < symbols.cols(); ++t) {
          const auto tail = symbols.row(i).segment(t, k - 1);
          const auto p = predict_next_symbol(g, {i, {tail.begin(), tail.end()}});
          Eigen::Index best = 0;
          p.maxCoeff(&best);
          ++steps;
          correct += static_cast<Symbol>(best + 1) == symbols(i, t + k - 1) ? 1 : 0;
        }
      }

      const auto window = QueryWindow::from_raw(d, full.values.middleCols(train_length, input_length));
      ForecastConfig cfg;
      cfg.horizon = horizon;
      const Eigen::MatrixXd truth = full.values.rightCols(horizon);
      const double graph_mse = mse(truth, forecast(g, d, window, cfg));
      const double repeat_mse = mse(truth, repeat_last(window, horizon));
      total_graph += graph_mse;
      total_repeat += repeat_mse;
      // Period 1 is the one case where repeating the last value is already exact.
      if (varies && period > 1 && !(graph_mse < repeat_mse)) ++not_beaten;
      if (period == 1 && graph_mse > repeat_mse) ++not_beaten;
    }
  }
  return verdict(correct == steps && not_beaten == 0 && total_graph < total_repeat,
                 std::to_string(sequences) + " periodic sequences (period 1.." + std::to_string(k - 1) +
                     ", k=" + std::to_string(k) + "): next-symbol accuracy " + std::to_string(correct) + "/" +
                     std::to_string(steps) + ", mean MSE graph " + fmt(total_graph / sequences) + " vs repeat-last " +
                     fmt(total_repeat / sequences) + " (horizon " + std::to_string(horizon) + "), " +
                     std::to_string(not_beaten) + " sequences not beaten");
}

struct Entry {
  int id;
  const char* name;
  std::function<Outcome(const Options&)> run;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries{
      {1, "ETT graph sizes", ett_graph_sizes},
      {2, "partition sizes", partition_sizes},
      {3, "construction oracle", construction_oracle},
      {4, "weight conservation", weight_conservation},
      {5, "PPR correctness", ppr_correctness},
      {6, "masking oracle", masking_oracle},
      {7, "sampling statistics", sampling_statistics},
      {8, "archive round trip", round_trip},
      {9, "forecast sanity", forecast_sanity},
  };
  return entries;
}

}  // namespace

std::vector<int> criterion_ids() {
  std::vector<int> ids;
  for (const auto& e : registry()) ids.push_back(e.id);
  return ids;
}

CriterionResult run_criterion(int id, const Options& options) {
  for (const auto& e : registry()) {
    if (e.id != id) continue;
    CriterionResult r{id, e.name, Status::fail, {}, 0.0};
    const auto start = Clock::now();
    try {
      auto outcome = e.run(options);
      r.status = outcome.status;
      r.detail = std::move(outcome.detail);
    } catch (const std::exception& ex) {
      r.status = Status::fail;
      r.detail = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
  }
  throw std::invalid_argument("no criterion " + std::to_string(id));
}

std::string format(const CriterionResult& r) {
  const char* tag = r.status == Status::pass ? "[PASS]" : r.status == Status::skip ? "[SKIP]" : "[FAIL]";
  std::ostringstream out;
  out << tag << ' ' << r.id << ' ' << r.name << ": " << r.detail << " (" << fmt(r.seconds) << " s)";
  return out.str();
}

}  // namespace mdbg::acceptance
