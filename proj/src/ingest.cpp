#include "mdbg/ingest.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "mdbg/error.hpp"
#include "text.hpp"

namespace mdbg {

TimeSeriesDataset load_csv(const std::filesystem::path& path, bool has_timestamp_column) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::RaggedRows, path.string() + ": missing header row");
  }
  const auto header = text::split(line, ',');
  const std::size_t first_numeric = has_timestamp_column ? 1 : 0;
  if (header.size() <= first_numeric) {
    throw Error(ErrorCode::RaggedRows, path.string() + ": header has no numeric columns");
  }

  TimeSeriesDataset ds;
  for (std::size_t c = first_numeric; c < header.size(); ++c) ds.dim_names.emplace_back(header[c]);
  const std::size_t dims = ds.dim_names.size();

  // Row-major scratch buffer, transposed into dimension-major at the end.
  std::vector<double> rows;
  std::size_t line_no = 1;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(line, ',');
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::RaggedRows, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                             std::to_string(header.size()) + " fields, got " +
                                             std::to_string(fields.size()));
    }
    if (has_timestamp_column) ds.timestamps.emplace_back(fields[0]);
    for (std::size_t c = first_numeric; c < fields.size(); ++c) {
      const auto value = text::parse_double(fields[c]);
      if (!value || !std::isfinite(*value)) {
        throw Error(ErrorCode::NonNumericValue, path.string() + ":" + std::to_string(line_no) + ": column " +
                                                    std::to_string(c + 1) + " value '" +
                                                    std::string(fields[c]) + "'");
      }
      rows.push_back(*value);
    }
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::TooShort, path.string() + ": no data rows");

  ds.values = Eigen::Map<const RowMatrix<double>>(rows.data(), static_cast<Eigen::Index>(count),
                                                  static_cast<Eigen::Index>(dims))
                  .transpose();
  return ds;
}

void write_csv(const TimeSeriesDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  const bool stamped = !ds.timestamps.empty();
  if (stamped) out << "date";
  for (Eigen::Index i = 0; i < ds.dims(); ++i) {
    if (stamped || i > 0) out << ',';
    out << (i < static_cast<Eigen::Index>(ds.dim_names.size()) ? ds.dim_names[i] : "dim" + std::to_string(i));
  }
  out << '\n';
  for (Eigen::Index t = 0; t < ds.length(); ++t) {
    if (stamped) out << ds.timestamps[t];
    for (Eigen::Index i = 0; i < ds.dims(); ++i) {
      if (stamped || i > 0) out << ',';
      out << text::format_double(ds.values(i, t));
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

SplitSpec SplitSpec::ett_hourly(Eigen::Index overlap) {
  constexpr Eigen::Index month = 30 * 24;
  return {12 * month, 16 * month, overlap, overlap, 20 * month};
}

SplitSpec SplitSpec::ett_minutely(Eigen::Index overlap) {
  constexpr Eigen::Index month = 30 * 24 * 4;
  return {12 * month, 16 * month, overlap, overlap, 20 * month};
}

void SplitSpec::validate(Eigen::Index length) const {
  const Eigen::Index end = test_end < 0 ? length : test_end;
  if (!(0 < train_end && train_end <= val_end && val_end <= end && end <= length)) {
    throw Error(ErrorCode::SpecOutOfRange,
                "borders must satisfy 0 < train_end <= val_end <= test_end <= S (S=" + std::to_string(length) + ")");
  }
  if (val_overlap < 0 || test_overlap < 0 || val_overlap > train_end || test_overlap > train_end ||
      test_overlap > val_end) {
    throw Error(ErrorCode::SpecOutOfRange, "overlaps must lie in [0, train_end]");
  }
}

Splits split(const TimeSeriesDataset& ds, const SplitSpec& spec) {
  spec.validate(ds.length());
  const Eigen::Index end = spec.test_end < 0 ? ds.length() : spec.test_end;
  return {ds.slice(0, spec.train_end), ds.slice(spec.train_end - spec.val_overlap, spec.val_end),
          ds.slice(spec.val_end - spec.test_overlap, end)};
}

std::size_t window_count(std::size_t split_len, std::size_t input_len, std::size_t horizon) {
  if (split_len < input_len + horizon) {
    throw Error(ErrorCode::TooShort, "split of " + std::to_string(split_len) + " steps cannot hold input " +
                                         std::to_string(input_len) + " + horizon " + std::to_string(horizon));
  }
  return split_len - input_len - horizon + 1;
}

Standardizer Standardizer::fit(const TimeSeriesDataset& train) {
  if (train.length() == 0) throw Error(ErrorCode::EmptyTrain, "cannot standardize with an empty train split");
  Standardizer z;
  z.mean = train.values.rowwise().mean();
  const auto centered = train.values.colwise() - z.mean;
  z.scale = (centered.array().square().rowwise().sum() / static_cast<double>(train.length())).sqrt();
  // Constant dimensions are only centered.
  z.scale = (z.scale.array() > 0.0).select(z.scale, 1.0);
  return z;
}

TimeSeriesDataset Standardizer::transform(const TimeSeriesDataset& ds) const {
  if (ds.dims() != mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "standardizer fitted on " + std::to_string(mean.size()) +
                                                  " dimensions, got " + std::to_string(ds.dims()));
  }
  TimeSeriesDataset out = ds;
  out.values = ((ds.values.colwise() - mean).array().colwise() / scale.array()).matrix();
  return out;
}

}  // namespace mdbg
