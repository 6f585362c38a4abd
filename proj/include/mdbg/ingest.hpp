#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mdbg {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Aligned multivariate series stored dimension-major: row i is the whole
/// series of dimension i, column t is the observation at step t.
template <typename Scalar>
struct BasicTimeSeries {
  RowMatrix<Scalar> values;
  std::vector<std::string> dim_names;
  std::vector<std::string> timestamps;  // empty, or one per column

  Eigen::Index dims() const { return values.rows(); }
  Eigen::Index length() const { return values.cols(); }

  /// Columns [begin, end) with names and timestamps carried along.
  BasicTimeSeries slice(Eigen::Index begin, Eigen::Index end) const {
    BasicTimeSeries out;
    out.values = values.middleCols(begin, end - begin);
    out.dim_names = dim_names;
    if (!timestamps.empty()) {
      out.timestamps.assign(timestamps.begin() + begin, timestamps.begin() + end);
    }
    return out;
  }
};

using TimeSeriesDataset = BasicTimeSeries<double>;

/// Reads a header + rows CSV. With `has_timestamp_column` the first column
/// is kept verbatim as the timestamp; every other column must be numeric.
TimeSeriesDataset load_csv(const std::filesystem::path& path, bool has_timestamp_column);

/// Writes the dataset back in the layout load_csv accepts. Values use 17
/// significant digits so reloading is lossless.
void write_csv(const TimeSeriesDataset& ds, const std::filesystem::path& path);

/// Split borders in columns. Validation starts `val_overlap` steps before
/// `train_end`, test starts `test_overlap` steps before `val_end` and runs to
/// `test_end` (negative means the end of the series).
struct SplitSpec {
  Eigen::Index train_end = 0;
  Eigen::Index val_end = 0;
  Eigen::Index val_overlap = 0;
  Eigen::Index test_overlap = 0;
  Eigen::Index test_end = -1;

  /// Hourly ETT borders (12/4/4 months of hourly data).
  static SplitSpec ett_hourly(Eigen::Index overlap);
  /// 15-minute ETT borders.
  static SplitSpec ett_minutely(Eigen::Index overlap);

  void validate(Eigen::Index length) const;
};

struct Splits {
  TimeSeriesDataset train;
  TimeSeriesDataset val;
  TimeSeriesDataset test;
};

Splits split(const TimeSeriesDataset& ds, const SplitSpec& spec);

/// Number of (input, horizon) windows a split of `split_len` steps yields.
std::size_t window_count(std::size_t split_len, std::size_t input_len, std::size_t horizon);

/// Optional z-score pre-pass. Statistics always come from the train split.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardizer fit(const TimeSeriesDataset& train);
  TimeSeriesDataset transform(const TimeSeriesDataset& ds) const;
};

}  // namespace mdbg
