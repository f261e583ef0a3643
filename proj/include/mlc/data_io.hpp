#pragma once

// Dataset model and ingestion: the multi-label sparse text format, dense CSV
// pairs, z-score normalization and seeded k-fold splits.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlc/loss_kernel.hpp"

namespace mlc {

struct SparseRow {
  std::span<const std::uint32_t> index;
  std::span<const double> value;

  std::size_t nnz() const noexcept { return index.size(); }
};

/// Compressed sparse rows. Column indices are strictly increasing per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  explicit SparseMatrix(std::size_t cols) : cols_(cols) {}

  std::size_t rows() const noexcept { return row_ptr_.size() - 1; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return index_.size(); }

  SparseRow row(std::size_t i) const noexcept {
    const std::size_t b = row_ptr_[i], e = row_ptr_[i + 1];
    return {std::span(index_).subspan(b, e - b), std::span(value_).subspan(b, e - b)};
  }

  /// Appends a row. Throws InvalidInput unless indices are strictly increasing
  /// and below cols(), and all values are finite.
  void push_row(std::span<const std::uint32_t> index, std::span<const double> value);
  void set_cols(std::size_t cols);

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> index_;
  std::vector<double> value_;
};

/// Dense n x c matrix over {-1, +1}.
class LabelMatrix {
 public:
  LabelMatrix() = default;
  LabelMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, -1) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  LabelView row(std::size_t i) const noexcept { return std::span(data_).subspan(i * cols_, cols_); }
  std::span<Label> row(std::size_t i) noexcept { return std::span(data_).subspan(i * cols_, cols_); }
  void push_row(LabelView labels);

  friend bool operator==(const LabelMatrix&, const LabelMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Label> data_;
};

struct Provenance {
  std::string source;
  std::string format;
  std::string normalization = "none";
};

struct Dataset {
  SparseMatrix features;
  LabelMatrix labels;
  std::vector<std::string> label_names;
  std::vector<std::string> feature_names;
  Provenance provenance;

  std::size_t n() const noexcept { return labels.rows(); }
  std::size_t d() const noexcept { return features.cols(); }
  std::size_t c() const noexcept { return labels.cols(); }

  /// Checks n, d, c >= 1, matching row counts and +/-1 labels.
  void validate() const;
  /// Rows in the given order; provenance is carried over.
  Dataset select(std::span<const std::size_t> rows) const;
  /// Copy with a trailing constant-1 feature column.
  Dataset with_bias_column() const;
};

struct SvmLoadOptions {
  std::optional<std::size_t> num_labels;
  std::optional<std::size_t> num_features;
};

/// Multi-label sparse text format, one sample per line:
///
///     [l1,l2,...] idx:val idx:val ...   # comment
///
/// Label ids and feature indices are 0-based. A line starting with whitespace
/// has no relevant labels. A leading "# mlc-dims labels=C features=D" comment
/// (as written by write_multilabel_svm) fixes c and d unless the options do.
Dataset load_multilabel_svm(const std::string& path, const SvmLoadOptions& options = {});
Dataset parse_multilabel_svm(std::istream& in, const SvmLoadOptions& options = {},
                             const std::string& source = "<stream>");
void write_multilabel_svm(const Dataset& ds, std::ostream& out);

struct CsvLoadOptions {
  /// Map 0 -> -1 and 1 -> +1 in the labels file; otherwise a 0 is an error.
  bool map_zero_one = false;
};

Dataset load_dense_csv(const std::string& features_path, const std::string& labels_path,
                       const CsvLoadOptions& options = {});
Dataset parse_dense_csv(std::istream& features, std::istream& labels,
                        const CsvLoadOptions& options = {});

struct ZScoreStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population standard deviation
  double min_stddev = 1e-12;   // features below this are zeroed after centering
};

/// Per-feature mean and population deviation over every row of `ds` (n >= 2).
ZScoreStats compute_zscore_stats(const Dataset& ds);
Dataset apply_zscore(const Dataset& ds, const ZScoreStats& stats);
/// compute_zscore_stats followed by apply_zscore.
std::pair<Dataset, ZScoreStats> normalize_zscore(const Dataset& ds);

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignment;  // fold of each row
  std::uint64_t seed = 0;

  std::vector<std::size_t> train_rows(std::size_t fold) const;
  std::vector<std::size_t> test_rows(std::size_t fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

/// Seeded uniform shuffle, then round-robin assignment of shuffled positions.
FoldPlan make_folds(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace mlc
