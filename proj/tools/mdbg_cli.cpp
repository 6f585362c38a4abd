// mdbg: command-line pipeline over the mdbg library.
//
//   mdbg ingest   --input data.csv --split hourly --out splits/
//   mdbg build    --input data.csv --k 4 --alpha 20 --out graph/
//   mdbg stats    --graph graph/
//   mdbg diffuse  --graph graph/ --teleport 0.15 --top-k 32
//   mdbg query    --graph graph/ --input data.csv --start 100 --length 12
//   mdbg export   --graph graph/ --input data.csv --out masks/
//   mdbg forecast --graph graph/ --input data.csv --horizon 96 --out fc/
//   mdbg selftest
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 diffusion did not converge.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "criteria.hpp"
#include "mdbg/archive.hpp"
#include "mdbg/diffusion.hpp"
#include "mdbg/discretize.hpp"
#include "mdbg/error.hpp"
#include "mdbg/forecast.hpp"
#include "mdbg/graph.hpp"
#include "mdbg/ingest.hpp"
#include "mdbg/log.hpp"
#include "mdbg/query.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNoConvergence = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string input;
  std::string out;
  std::string graph;
  std::string timestamp = "auto";

  // split
  std::string split = "none";
  long long train_end = 0;
  long long val_end = 0;
  long long test_end = -1;
  long long overlap = 12;
  bool standardize = false;

  // graph
  int k = 4;
  std::vector<int> alpha{20};
  std::string strategy = "uniform";
  bool binary_hyper = false;
  std::size_t feature_cap = 0;

  // diffusion
  mdbg::DiffusionConfig diffusion;
  std::string normalization = "row";

  // windows, sampling, forecasting
  int length = 12;
  int horizon = 96;
  long long start = -1;
  long long stride = 1;
  long long count = -1;
  bool sample = false;
  int f = 16;
  std::uint64_t seed = 0;
  std::string mode = "greedy";
  std::string fallback = "nearest-node";

  std::string ett_dir;

  json to_json() const {
    return {{"input", input},
            {"timestamp", timestamp},
            {"split", split},
            {"train_end", train_end},
            {"val_end", val_end},
            {"test_end", test_end},
            {"overlap", overlap},
            {"standardize", standardize},
            {"k", k},
            {"alpha", alpha},
            {"strategy", strategy},
            {"binary_hyper", binary_hyper},
            {"feature_cap", feature_cap},
            {"teleport", diffusion.teleport},
            {"top_k", diffusion.top_k},
            {"normalization", normalization},
            {"tolerance", diffusion.tolerance},
            {"max_iterations", diffusion.max_iterations},
            {"sequential_weight", diffusion.sequential_weight},
            {"hyper_weight", diffusion.hyper_weight},
            {"per_dimension", diffusion.per_dimension},
            {"renormalize", diffusion.renormalize},
            {"f", f},
            {"seed", seed}};
  }
};

// ---------------------------------------------------------------------------
// helpers

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

bool detect_timestamp(const fs::path& path) {
  std::ifstream in(path);
  std::string header;
  std::string row;
  if (!std::getline(in, header) || !std::getline(in, row)) return false;
  const auto field = row.substr(0, row.find(','));
  char* end = nullptr;
  std::strtod(field.c_str(), &end);
  return end == field.c_str() || (*end != '\0' && *end != '\r');
}

mdbg::TimeSeriesDataset load_input(const RunConfig& cfg) {
  require(!cfg.input.empty(), "--input is required");
  bool ts = false;
  if (cfg.timestamp == "auto") {
    ts = fs::exists(cfg.input) && detect_timestamp(cfg.input);
  } else {
    ts = cfg.timestamp == "yes";
  }
  auto ds = mdbg::load_csv(cfg.input, ts);
  mdbg::log::info("loaded", {{"path", cfg.input}, {"dims", ds.dims()}, {"length", ds.length()}, {"timestamps", ts}});
  return ds;
}

std::optional<mdbg::SplitSpec> split_spec(const RunConfig& cfg) {
  if (cfg.split == "none") return std::nullopt;
  if (cfg.split == "hourly") return mdbg::SplitSpec::ett_hourly(cfg.overlap);
  if (cfg.split == "minutely") return mdbg::SplitSpec::ett_minutely(cfg.overlap);
  return mdbg::SplitSpec{cfg.train_end, cfg.val_end, cfg.overlap, cfg.overlap, cfg.test_end};
}

mdbg::TimeSeriesDataset training_part(const RunConfig& cfg, const mdbg::TimeSeriesDataset& ds) {
  const auto spec = split_spec(cfg);
  if (!spec) return ds;
  return mdbg::split(ds, *spec).train;
}

fs::path require_out(const RunConfig& cfg) {
  require(!cfg.out.empty(), "--out is required");
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (!fs::is_directory(cfg.out)) {
    throw mdbg::Error(mdbg::ErrorCode::UnwritableDirectory, "cannot create " + cfg.out);
  }
  return cfg.out;
}

mdbg::GraphArchive load_graph(const RunConfig& cfg) {
  require(!cfg.graph.empty(), "--graph is required");
  return mdbg::load(cfg.graph);
}

const mdbg::Discretizer& graph_discretizer(const mdbg::GraphArchive& archive) {
  if (!archive.discretizer) {
    throw mdbg::Error(mdbg::ErrorCode::MalformedArchive, "graph directory has no discretizer.json");
  }
  return *archive.discretizer;
}

mdbg::QueryWindow window_at(const mdbg::Discretizer& d, const mdbg::TimeSeriesDataset& ds, long long start, int length) {
  if (start < 0 || length < 1 || start + length > ds.length()) {
    throw mdbg::Error(mdbg::ErrorCode::WindowTooShort, "window [" + std::to_string(start) + ", " +
                                                           std::to_string(start + length) + ") outside a series of length " +
                                                           std::to_string(ds.length()));
  }
  return mdbg::QueryWindow::from_raw(d, ds.values.middleCols(start, length));
}

void print(const json& doc) { std::cout << doc.dump(2) << std::endl; }

std::string sha_of_input(const RunConfig& cfg) { return mdbg::file_sha256(cfg.input); }

// ---------------------------------------------------------------------------
// subcommands

int run_ingest(const RunConfig& cfg) {
  const auto ds = load_input(cfg);
  const auto spec = split_spec(cfg);
  require(spec.has_value(), "ingest needs --split hourly, minutely or custom");
  auto parts = mdbg::split(ds, *spec);
  if (cfg.standardize) {
    const auto z = mdbg::Standardizer::fit(parts.train);
    parts.train = z.transform(parts.train);
    parts.val = z.transform(parts.val);
    parts.test = z.transform(parts.test);
  }
  const auto out = require_out(cfg);
  mdbg::write_csv(parts.train, out / "train.csv");
  mdbg::write_csv(parts.val, out / "val.csv");
  mdbg::write_csv(parts.test, out / "test.csv");

  auto windows = [&](const mdbg::TimeSeriesDataset& part) -> json {
    try {
      return mdbg::window_count(static_cast<std::size_t>(part.length()), static_cast<std::size_t>(cfg.length),
                                static_cast<std::size_t>(cfg.horizon));
    } catch (const mdbg::Error&) {
      return 0;
    }
  };
  json report = {{"input_digest", sha_of_input(cfg)},
                 {"lengths", {{"train", parts.train.length()}, {"val", parts.val.length()}, {"test", parts.test.length()}}},
                 {"windows",
                  {{"input_length", cfg.length},
                   {"horizon", cfg.horizon},
                   {"train", windows(parts.train)},
                   {"val", windows(parts.val)},
                   {"test", windows(parts.test)}}},
                 {"config", cfg.to_json()}};
  std::ofstream(out / "ingest.json") << report.dump(2) << '\n';
  print(report);
  return 0;
}

int run_build(const RunConfig& cfg) {
  require(cfg.k >= 2, "--k must be >= 2");
  const auto ds = load_input(cfg);
  const auto train = training_part(cfg, ds);
  const auto d = mdbg::fit(train, cfg.alpha, mdbg::bin_strategy_from_string(cfg.strategy));
  mdbg::BuildOptions options;
  options.binary_hyper_weights = cfg.binary_hyper;
  options.feature_cap = cfg.feature_cap;
  const auto g = mdbg::build(train, mdbg::apply(d, train), cfg.k, options);
  const auto s = mdbg::stats(g);
  mdbg::log::info("built", {{"nodes", s.nodes}, {"sequential_edges", s.sequential_edges}, {"hyper_edges", s.hyper_edges}});

  mdbg::ArchiveMetadata meta;
  meta.discretizer = d;
  meta.parameters = cfg.to_json();
  meta.input_digest = sha_of_input(cfg);
  mdbg::save(g, nullptr, require_out(cfg), meta);
  mdbg::log::info("saved", {{"dir", cfg.out}});
  print(mdbg::to_json(s));
  return 0;
}

int run_stats(const RunConfig& cfg) {
  const auto archive = load_graph(cfg);
  auto doc = mdbg::to_json(mdbg::stats(archive.graph));
  doc["k"] = archive.graph.order();
  doc["alphabet_sizes"] = archive.graph.alphabet_sizes();
  doc["diffused_entries"] = archive.diffused ? archive.diffused->entry_count() : 0;
  print(doc);
  return 0;
}

int run_diffuse(const RunConfig& cfg) {
  auto archive = load_graph(cfg);
  auto dc = cfg.diffusion;
  dc.normalization = mdbg::normalization_from_string(cfg.normalization);
  dc.validate();
  const auto diffused = mdbg::diffuse(archive.graph, dc);
  mdbg::log::info("diffused", {{"entries", diffused.entry_count()}});

  mdbg::ArchiveMetadata meta;
  meta.discretizer = archive.discretizer;
  meta.input_digest = archive.manifest.input_digest;
  meta.parameters = archive.manifest.parameters;
  meta.parameters["diffusion"] = {{"teleport", dc.teleport},
                                  {"top_k", dc.top_k},
                                  {"normalization", mdbg::to_string(dc.normalization)},
                                  {"tolerance", dc.tolerance},
                                  {"max_iterations", dc.max_iterations},
                                  {"sequential_weight", dc.sequential_weight},
                                  {"hyper_weight", dc.hyper_weight},
                                  {"per_dimension", dc.per_dimension},
                                  {"renormalize", dc.renormalize}};
  const fs::path target = cfg.out.empty() ? fs::path(cfg.graph) : require_out(cfg);
  mdbg::save(archive.graph, &diffused, target, meta);
  print({{"diffused_entries", diffused.entry_count()}, {"dir", target.string()}});
  return 0;
}

int run_query(const RunConfig& cfg) {
  const auto archive = load_graph(cfg);
  const auto& d = graph_discretizer(archive);
  const auto ds = load_input(cfg);
  const long long start = cfg.start < 0 ? 0 : cfg.start;
  const auto w = window_at(d, ds, start, cfg.length);
  const auto m = mdbg::mask(archive.graph, w, archive.graph.order());
  json doc = mdbg::to_json(m);
  doc["window"] = {{"start", start}, {"length", cfg.length}};
  doc["popcount"] = m.popcount();
  if (cfg.sample) {
    mdbg::SampleConfig sc;
    sc.f = cfg.f;
    json samples = json::object();
    for (auto id : m.set_ids()) {
      sc.seed = cfg.seed + id;
      const auto x = mdbg::sample_features(archive.graph, id, sc);
      json rows = json::array();
      for (Eigen::Index r = 0; r < x.rows(); ++r) rows.push_back(std::vector<double>(x.row(r).begin(), x.row(r).end()));
      samples[std::to_string(id)] = rows;
    }
    doc["samples"] = samples;
  }
  print(doc);
  return 0;
}

int run_export(const RunConfig& cfg) {
  require(cfg.stride >= 1, "--stride must be >= 1");
  const auto archive = load_graph(cfg);
  const auto& d = graph_discretizer(archive);
  const auto ds = load_input(cfg);
  std::vector<mdbg::QueryWindow> windows;
  for (long long s = cfg.start < 0 ? 0 : cfg.start; s + cfg.length <= ds.length(); s += cfg.stride) {
    if (cfg.count >= 0 && static_cast<long long>(windows.size()) >= cfg.count) break;
    windows.push_back(window_at(d, ds, s, cfg.length));
  }
  const auto path = require_out(cfg) / "masks.jsonl";
  mdbg::export_mask_batch(archive.graph, windows, archive.graph.order(), path);
  mdbg::log::info("exported", {{"windows", windows.size()}, {"path", path.string()}});
  print({{"windows", windows.size()}, {"path", path.string()}});
  return 0;
}

int run_forecast(const RunConfig& cfg) {
  const auto archive = load_graph(cfg);
  const auto& d = graph_discretizer(archive);
  const auto ds = load_input(cfg);
  long long start = cfg.start;
  if (start < 0) start = std::max<long long>(0, ds.length() - cfg.length - cfg.horizon);
  const auto w = window_at(d, ds, start, cfg.length);

  mdbg::ForecastConfig fc;
  fc.horizon = cfg.horizon;
  fc.mode = mdbg::forecast_mode_from_string(cfg.mode);
  fc.fallback = mdbg::fallback_from_string(cfg.fallback);
  const auto predicted = mdbg::forecast(archive.graph, d, w, fc);

  mdbg::TimeSeriesDataset out_ds;
  out_ds.values = predicted;
  out_ds.dim_names = ds.dim_names;
  const auto out = require_out(cfg);
  mdbg::write_csv(out_ds, out / "forecast.csv");

  json doc = {{"start", start}, {"length", cfg.length}, {"horizon", cfg.horizon}, {"path", (out / "forecast.csv").string()}};
  const auto truth_begin = start + cfg.length;
  if (truth_begin + cfg.horizon <= ds.length()) {
    const Eigen::MatrixXd truth = ds.values.middleCols(truth_begin, cfg.horizon);
    const auto naive = mdbg::repeat_last(w, cfg.horizon);
    doc["mse"] = mdbg::mse(truth, predicted);
    doc["mae"] = mdbg::mae(truth, predicted);
    doc["repeat_last_mse"] = mdbg::mse(truth, naive);
    doc["repeat_last_mae"] = mdbg::mae(truth, naive);
  }
  print(doc);
  return 0;
}

int run_selftest(const RunConfig& cfg) {
  mdbg::acceptance::Options options;
  options.ett_dir = cfg.ett_dir;
  int failed = 0;
  int skipped = 0;
  for (int id : mdbg::acceptance::criterion_ids()) {
    // The ETT size check needs the public CSVs; it only runs when pointed at them.
    if (id == 1 && cfg.ett_dir.empty()) continue;
    const auto r = mdbg::acceptance::run_criterion(id, options);
    std::cout << mdbg::acceptance::format(r) << std::endl;
    failed += r.status == mdbg::acceptance::Status::fail ? 1 : 0;
    skipped += r.status == mdbg::acceptance::Status::skip ? 1 : 0;
  }
  std::cout << (failed == 0 ? "selftest passed" : "selftest FAILED") << " (" << failed << " failed, " << skipped
            << " skipped)" << std::endl;
  return failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// config file: a JSON object whose keys are flag names without the leading
// dashes. Top-level values apply to every subcommand that has the flag; an
// object under a subcommand name applies to that subcommand only. Values from
// the file become option defaults, so flags given on the command line win.

std::string json_to_arg(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_array()) {
    std::string joined;
    for (const auto& e : v) joined += (joined.empty() ? "" : ",") + json_to_arg(e);
    return joined;
  }
  return v.dump();
}

std::optional<std::string> config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return std::nullopt;
}

void apply_config(CLI::App& app, const fs::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config file " + path.string() + ": " + e.what());
  }
  require(doc.is_object(), "config file must hold a JSON object");

  auto set = [](CLI::App* sc, const std::string& key, const json& value) {
    auto* opt = sc->get_option_no_throw("--" + key);
    if (opt == nullptr) return false;
    try {
      opt->default_val(json_to_arg(value));
    } catch (const CLI::Error& e) {
      throw UsageError("config key '" + key + "': " + e.what());
    }
    return true;
  };

  for (const auto& [key, value] : doc.items()) {
    if (key == "config") continue;
    if (auto* sc = app.get_subcommand_no_throw(key); sc != nullptr && value.is_object()) {
      for (const auto& [inner, v] : value.items()) require(set(sc, inner, v), "config: '" + key + "' has no flag --" + inner);
      continue;
    }
    bool used = false;
    for (auto* sc : app.get_subcommands({})) used = set(sc, key, value) || used;
    require(used, "config: unknown key '" + key + "'");
  }
}

mdbg::log::Level level_from_string(const std::string& name) {
  if (name == "debug") return mdbg::log::Level::debug;
  if (name == "info") return mdbg::log::Level::info;
  if (name == "warning") return mdbg::log::Level::warning;
  return mdbg::log::Level::error;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  std::string log_level = "info";

  CLI::App app{"Multivariate de Bruijn graphs for time series"};
  app.require_subcommand(1);
  app.add_option("--config", "JSON file with flag values; command-line flags override it");
  app.add_option("--log-level", log_level, "debug, info, warning or error")
      ->check(CLI::IsMember({"debug", "info", "warning", "error"}));

  auto input_opts = [&](CLI::App* sc) {
    sc->add_option("--input", cfg.input, "Input CSV, one column per dimension")->check(CLI::ExistingFile);
    sc->add_option("--timestamp", cfg.timestamp, "First column is a timestamp: auto, yes or no")
        ->check(CLI::IsMember({"auto", "yes", "no"}));
  };
  auto split_opts = [&](CLI::App* sc) {
    sc->add_option("--split", cfg.split, "none, hourly, minutely or custom")
        ->check(CLI::IsMember({"none", "hourly", "minutely", "custom"}));
    sc->add_option("--train-end", cfg.train_end, "Custom split: end of train");
    sc->add_option("--val-end", cfg.val_end, "Custom split: end of validation");
    sc->add_option("--test-end", cfg.test_end, "Custom split: end of test (-1 for the series end)");
    sc->add_option("--overlap", cfg.overlap, "Steps validation and test reach back into the previous split");
  };
  auto graph_opt = [&](CLI::App* sc) { sc->add_option("--graph", cfg.graph, "Graph directory")->required(); };
  auto window_opts = [&](CLI::App* sc) {
    sc->add_option("--start", cfg.start, "First column of the window");
    sc->add_option("--length", cfg.length, "Window length")->check(CLI::PositiveNumber);
  };

  auto* ingest = app.add_subcommand("ingest", "Split a CSV into train/validation/test");
  input_opts(ingest);
  split_opts(ingest);
  ingest->add_flag("--standardize", cfg.standardize, "z-score with train statistics");
  ingest->add_option("--length", cfg.length, "Input window length for the window counts");
  ingest->add_option("--horizon", cfg.horizon, "Horizon for the window counts");
  ingest->add_option("--out", cfg.out, "Output directory");

  auto* build = app.add_subcommand("build", "Discretize the train split and build the graph");
  input_opts(build);
  split_opts(build);
  build->add_option("--k", cfg.k, "Order: nodes are (k-1)-tuples");
  build->add_option("--alpha", cfg.alpha, "Alphabet size, one shared or one per dimension")->delimiter(',');
  build->add_option("--strategy", cfg.strategy, "uniform or quantile")->check(CLI::IsMember({"uniform", "quantile"}));
  build->add_flag("--binary-hyper", cfg.binary_hyper, "Hyper-edge weights 1 instead of co-occurrence counts");
  build->add_option("--feature-cap", cfg.feature_cap, "Distinct raw tuples kept per node, 0 for all");
  build->add_option("--out", cfg.out, "Graph directory to write");

  auto* stats = app.add_subcommand("stats", "Print node and edge counts of a graph");
  graph_opt(stats);

  auto* diffuse = app.add_subcommand("diffuse", "Personalized PageRank diffusion with top-k sparsification");
  graph_opt(diffuse);
  diffuse->add_option("--teleport", cfg.diffusion.teleport, "Teleport probability in (0, 1]");
  diffuse->add_option("--top-k", cfg.diffusion.top_k, "Entries kept per row");
  diffuse->add_option("--normalization", cfg.normalization, "row or symmetric")
      ->check(CLI::IsMember({"row", "symmetric"}));
  diffuse->add_option("--tolerance", cfg.diffusion.tolerance, "L1 stopping tolerance");
  diffuse->add_option("--max-iterations", cfg.diffusion.max_iterations, "Iteration limit per source");
  diffuse->add_option("--sequential-weight", cfg.diffusion.sequential_weight, "Multiplier for sequential edges");
  diffuse->add_option("--hyper-weight", cfg.diffusion.hyper_weight, "Multiplier for hyper edges");
  diffuse->add_flag("--per-dimension", cfg.diffusion.per_dimension, "Leave hyper edges out");
  diffuse->add_flag("--renormalize", cfg.diffusion.renormalize, "Rescale kept entries to sum to 1");
  diffuse->add_option("--threads", cfg.diffusion.threads, "Worker threads, 0 for all cores (capped by MDBG_THREADS)");
  diffuse->add_option("--out", cfg.out, "Write to another directory instead of updating --graph");

  auto* query = app.add_subcommand("query", "Mask vector of one window");
  graph_opt(query);
  input_opts(query);
  window_opts(query);
  query->add_flag("--sample", cfg.sample, "Also draw f raw tuples from every selected node");
  query->add_option("--f", cfg.f, "Samples per node")->check(CLI::PositiveNumber);
  query->add_option("--seed", cfg.seed, "Sampling seed");

  auto* exporter = app.add_subcommand("export", "Mask vectors of sliding windows as JSON lines");
  graph_opt(exporter);
  input_opts(exporter);
  exporter->add_option("--start", cfg.start, "First window start");
  exporter->add_option("--length", cfg.length, "Window length")->check(CLI::PositiveNumber);
  exporter->add_option("--stride", cfg.stride, "Step between window starts");
  exporter->add_option("--count", cfg.count, "Maximum number of windows, -1 for all");
  exporter->add_option("--out", cfg.out, "Output directory");

  auto* forecast = app.add_subcommand("forecast", "Frequency baseline forecast from a window");
  graph_opt(forecast);
  input_opts(forecast);
  forecast->add_option("--start", cfg.start, "Window start, default the last window with a full horizon after it");
  forecast->add_option("--length", cfg.length, "Window length")->check(CLI::PositiveNumber);
  forecast->add_option("--horizon", cfg.horizon, "Steps to forecast");
  forecast->add_option("--mode", cfg.mode, "greedy or expected")->check(CLI::IsMember({"greedy", "expected"}));
  forecast->add_option("--fallback", cfg.fallback, "nearest-node or repeat-last")
      ->check(CLI::IsMember({"nearest-node", "repeat-last"}));
  forecast->add_option("--out", cfg.out, "Output directory");

  auto* selftest = app.add_subcommand("selftest", "Run the oracle checks and print a pass/fail summary");
  selftest->add_option("--ett-dir", cfg.ett_dir, "Also check graph sizes on the ETT-small CSVs in this directory");

  try {
    if (const auto path = config_path(argc, argv)) apply_config(app, *path);
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << e.what() << std::endl;
    return kExitUsage;
  }

  mdbg::log::set_min_level(level_from_string(log_level));
  auto* sc = app.get_subcommands().front();
  const std::string name = sc->get_name();
  try {
    mdbg::log::info("start", {{"command", name}});
    int status = 0;
    if (name == "ingest") status = run_ingest(cfg);
    else if (name == "build") status = run_build(cfg);
    else if (name == "stats") status = run_stats(cfg);
    else if (name == "diffuse") status = run_diffuse(cfg);
    else if (name == "query") status = run_query(cfg);
    else if (name == "export") status = run_export(cfg);
    else if (name == "forecast") status = run_forecast(cfg);
    else if (name == "selftest") status = run_selftest(cfg);
    mdbg::log::info("done", {{"command", name}, {"status", status}});
    return status;
  } catch (const UsageError& e) {
    mdbg::log::emit(mdbg::log::Level::error, "usage", {{"message", e.what()}});
    std::cerr << sc->help() << std::endl;
    return kExitUsage;
  } catch (const mdbg::Error& e) {
    mdbg::log::emit(mdbg::log::Level::error, "failed", {{"code", std::string(mdbg::to_string(e.code()))}, {"message", e.what()}});
    if (e.code() == mdbg::ErrorCode::NoConvergence) return kExitNoConvergence;
    if (e.code() == mdbg::ErrorCode::InvalidConfig) return kExitUsage;
    return kExitData;
  }
}
