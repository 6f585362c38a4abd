#include <doctest.h>

#include <fstream>
#include <random>

#include "mdbg/error.hpp"
#include "mdbg/ingest.hpp"
#include "support/temp_dir.hpp"

using namespace mdbg;
using mdbg::testing::TempDir;

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an mdbg::Error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("load_csv transposes rows into dimension-major order") {
  TempDir dir;
  write_text(dir / "a.csv", "x,y\n1,2\n3,4\n5,6\n");
  const auto ds = load_csv(dir / "a.csv", false);
  CHECK(ds.dims() == 2);
  CHECK(ds.length() == 3);
  CHECK(ds.values(0, 2) == 5.0);
  CHECK(ds.values(1, 0) == 2.0);
  CHECK(ds.dim_names == std::vector<std::string>{"x", "y"});
  CHECK(ds.timestamps.empty());
}

TEST_CASE("load_csv keeps the timestamp column aside") {
  TempDir dir;
  write_text(dir / "a.csv", "date,HUFL,OT\r\n2016-07-01 00:00:00,5.827,30.5\r\n2016-07-01 01:00:00,5.693,27.8\r\n");
  const auto ds = load_csv(dir / "a.csv", true);
  CHECK(ds.dims() == 2);
  CHECK(ds.length() == 2);
  CHECK(ds.timestamps[1] == "2016-07-01 01:00:00");
  CHECK(ds.values(1, 1) == doctest::Approx(27.8));
}

TEST_CASE("load_csv error paths") {
  TempDir dir;
  CHECK(code_of([&] { load_csv(dir / "missing.csv", false); }) == ErrorCode::MissingFile);

  write_text(dir / "abc.csv", "x,y\n1,2\n3,abc\n");
  try {
    load_csv(dir / "abc.csv", false);
    FAIL("expected NonNumericValue");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonNumericValue);
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    CHECK(std::string(e.what()).find("column 2") != std::string::npos);
  }

  write_text(dir / "ragged.csv", "x,y\n1,2\n3\n");
  try {
    load_csv(dir / "ragged.csv", false);
    FAIL("expected RaggedRows");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RaggedRows);
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }

  write_text(dir / "blank.csv", "x,y\n1,\n");
  CHECK(code_of([&] { load_csv(dir / "blank.csv", false); }) == ErrorCode::NonNumericValue);
  write_text(dir / "nan.csv", "x\nnan\n");
  CHECK(code_of([&] { load_csv(dir / "nan.csv", false); }) == ErrorCode::NonNumericValue);
}

TEST_CASE("write_csv then load_csv is lossless") {
  TempDir dir;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0.0, 1e3);
  TimeSeriesDataset ds;
  ds.values.resize(3, 40);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index t = 0; t < 40; ++t) ds.values(i, t) = noise(rng);
  ds.dim_names = {"a", "b", "c"};
  for (int t = 0; t < 40; ++t) ds.timestamps.push_back("t" + std::to_string(t));

  write_csv(ds, dir / "out.csv");
  const auto once = load_csv(dir / "out.csv", true);
  CHECK(once.values == ds.values);
  write_csv(once, dir / "again.csv");
  CHECK(load_csv(dir / "again.csv", true).values == once.values);
}

TEST_CASE("split borders and overlaps") {
  TimeSeriesDataset ds;
  ds.values = RowMatrix<double>::NullaryExpr(2, 10, [](Eigen::Index i, Eigen::Index t) { return 100.0 * i + t; });
  const auto parts = split(ds, {6, 8, 0, 0});
  CHECK(parts.train.length() == 6);
  CHECK(parts.val.length() == 2);
  CHECK(parts.test.length() == 2);

  const auto overlapped = split(ds, {6, 8, 2, 3});
  CHECK(overlapped.val.values(0, 0) == 4.0);
  CHECK(overlapped.test.values(1, 0) == 105.0);

  // Removing the overlaps and concatenating gives back the input exactly.
  RowMatrix<double> joined(2, 10);
  joined << overlapped.train.values, overlapped.val.values.rightCols(2), overlapped.test.values.rightCols(2);
  CHECK(joined == ds.values);

  CHECK(code_of([&] { split(ds, {0, 8, 0, 0}); }) == ErrorCode::SpecOutOfRange);
  CHECK(code_of([&] { split(ds, {6, 11, 0, 0}); }) == ErrorCode::SpecOutOfRange);
  CHECK(code_of([&] { split(ds, {6, 8, 7, 0}); }) == ErrorCode::SpecOutOfRange);
}

TEST_CASE("window_count reconciles the ETT partition table") {
  CHECK(window_count(8640, 12, 96) == 8533);
  CHECK(window_count(34560, 12, 96) == 34453);
  CHECK(window_count(108, 12, 96) == 1);
  CHECK(code_of([] { window_count(107, 12, 96); }) == ErrorCode::TooShort);

  // Validation / test spans with the 12-step overlap.
  const auto hourly = SplitSpec::ett_hourly(12);
  CHECK(window_count(static_cast<std::size_t>(hourly.val_end - hourly.train_end + hourly.val_overlap), 12, 96) == 2785);
  CHECK(window_count(static_cast<std::size_t>(hourly.test_end - hourly.val_end + hourly.test_overlap), 12, 96) == 2785);
  const auto minutely = SplitSpec::ett_minutely(12);
  CHECK(window_count(static_cast<std::size_t>(minutely.val_end - minutely.train_end + minutely.val_overlap), 12, 96) == 11425);
  CHECK(window_count(static_cast<std::size_t>(minutely.test_end - minutely.val_end + minutely.test_overlap), 12, 96) == 11425);
}

TEST_CASE("window_count agrees with enumerating windows") {
  for (std::size_t len : {108u, 150u, 300u}) {
    std::size_t windows = 0;
    for (std::size_t start = 0; start + 12 + 96 <= len; ++start) ++windows;
    CHECK(window_count(len, 12, 96) == windows);
  }
}

TEST_CASE("standardizer uses train statistics") {
  TimeSeriesDataset train;
  train.values.resize(2, 4);
  train.values << 1, 2, 3, 4, 5, 5, 5, 5;
  const auto z = Standardizer::fit(train);
  const auto out = z.transform(train);
  CHECK(out.values.row(0).mean() == doctest::Approx(0.0));
  CHECK(out.values.row(0).array().square().mean() == doctest::Approx(1.0));
  CHECK(out.values.row(1).isZero());
}
