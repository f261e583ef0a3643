#pragma once

// Linear multi-label scorer f(x) = W^T x, sign thresholding and the oracle
// top-k threshold used when relating Hamming and ranking measures.

#include <iosfwd>
#include <string>
#include <vector>

#include "mlc/data_io.hpp"
#include "mlc/loss_kernel.hpp"
#include "mlc/matrix.hpp"

namespace mlc {

/// Weight matrix W of shape d x c. With `bias` set, the last row multiplies an
/// implicit constant-1 feature, so inputs have d - 1 features and the bias row
/// is part of the Frobenius norm.
class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(std::size_t d, std::size_t c, bool bias = false);
  LinearModel(Matrix weights, bool bias);

  std::size_t d() const noexcept { return weights_.rows(); }
  std::size_t c() const noexcept { return weights_.cols(); }
  bool bias() const noexcept { return bias_; }
  /// Feature count expected from callers of score().
  std::size_t input_dim() const noexcept { return d() - (bias_ ? 1 : 0); }

  const Matrix& weights() const noexcept { return weights_; }
  double frobenius_norm() const;

  void score(SparseRow x, std::span<double> out) const;
  std::vector<double> score(SparseRow x) const;
  std::vector<double> score_dense(std::span<const double> x) const;

  friend bool operator==(const LinearModel&, const LinearModel&) = default;

 private:
  Matrix weights_;
  bool bias_ = false;
};

/// pred_j = +1 iff f_j > 0. Zero and negative zero map to -1.
void classify_sign(ScoreView f, std::span<Label> out);
LabelVector classify_sign(ScoreView f);

struct ThresholdSplit {
  std::size_t k = 0;               // labels predicted relevant
  std::vector<std::size_t> order;  // label indices, scores non-ascending
};

struct OracleThreshold {
  ThresholdSplit split;
  LabelVector prediction;
  double hamming = 0.0;
};

/// Labels sorted by score (ties by ascending index); of the c + 1 prefix splits
/// the one with the lowest Hamming loss against `y`, smallest k on ties.
/// Needs the true labels, so it is an evaluation device only.
OracleThreshold oracle_threshold(ScoreView f, LabelView y);

/// Text format:
///
///     mlc-linear-model 1
///     dims <d> <c>
///     bias <0|1>
///     <c values of row 0>
///     ...
///
/// Values use the shortest round-trip decimal form, so save/load is bit-exact.
void save_model(const LinearModel& model, std::ostream& out);
LinearModel load_model(std::istream& in);
void save_model(const LinearModel& model, const std::string& path);
LinearModel load_model(const std::string& path);

}  // namespace mlc
