#include "mlc/loss_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mlc/error.hpp"
#include "mlc/simd/kernels.hpp"

namespace mlc {
namespace {

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b)
    throw DimensionError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

void require_finite(double u) {
  if (!std::isfinite(u)) throw InvalidInput("base loss evaluated at a non-finite margin");
}

// ln(1 + e^{-u}) without overflow for large negative u.
double softplus_neg(double u) {
  if (u > -30.0) return std::log1p(std::exp(-u));
  return -u + std::log1p(std::exp(u));
}

// d/du ln(1 + e^{-u}) = -1 / (1 + e^{u})
double softplus_neg_derivative(double u) { return -1.0 / (1.0 + std::exp(u)); }

double value_unchecked(const BaseLoss& loss, double u) {
  switch (loss.kind) {
    case BaseLossKind::hinge:
      return std::max(0.0, 1.0 - u);
    case BaseLossKind::logistic_ln:
      return softplus_neg(u);
    case BaseLossKind::logistic_log2:
      return softplus_neg(u) / std::numbers::ln2;
  }
  return 0.0;
}

double subgrad_unchecked(const BaseLoss& loss, double u) {
  switch (loss.kind) {
    case BaseLossKind::hinge:
      return u < 1.0 ? -1.0 : 0.0;
    case BaseLossKind::logistic_ln:
      return softplus_neg_derivative(u);
    case BaseLossKind::logistic_log2:
      return softplus_neg_derivative(u) / std::numbers::ln2;
  }
  return 0.0;
}

struct PairCounts {
  std::size_t pos = 0;
  std::size_t neg = 0;
};

PairCounts split_counts(LabelView y) {
  const std::size_t pos = count_relevant(y);
  return {pos, y.size() - pos};
}

}  // namespace

LabelVector::LabelVector(std::vector<Label> entries) : entries_(std::move(entries)) {
  for (Label v : entries_)
    if (v != 1 && v != -1) throw InvalidInput("label entries must be -1 or +1");
}

LabelVector::LabelVector(std::initializer_list<int> entries) {
  entries_.reserve(entries.size());
  for (int v : entries) {
    if (v != 1 && v != -1) throw InvalidInput("label entries must be -1 or +1");
    entries_.push_back(static_cast<Label>(v));
  }
}

LabelVector LabelVector::from_relevant(std::size_t c, std::span<const std::size_t> relevant) {
  std::vector<Label> v(c, Label{-1});
  for (std::size_t j : relevant) {
    if (j >= c) throw InvalidInput("relevant label index out of range");
    v[j] = 1;
  }
  return LabelVector(std::move(v));
}

std::size_t LabelVector::num_relevant() const noexcept { return count_relevant(entries_); }

double BaseLoss::rho() const noexcept {
  return kind == BaseLossKind::logistic_log2 ? 1.0 / std::numbers::ln2 : 1.0;
}

std::string_view to_string(BaseLossKind kind) noexcept {
  switch (kind) {
    case BaseLossKind::hinge:
      return "hinge";
    case BaseLossKind::logistic_ln:
      return "logistic_ln";
    case BaseLossKind::logistic_log2:
      return "logistic_log2";
  }
  return "?";
}

BaseLoss parse_base_loss(std::string_view name) {
  if (name == "hinge") return BaseLoss::hinge();
  if (name == "logistic_ln") return BaseLoss::logistic_ln();
  if (name == "logistic_log2") return BaseLoss::logistic_log2();
  throw InvalidInput("unknown base loss '" + std::string(name) + "'");
}

std::string_view to_string(SurrogateKind kind) noexcept {
  switch (kind) {
    case SurrogateKind::hamming:
      return "hamming";
    case SurrogateKind::subset:
      return "subset";
    case SurrogateKind::ranking:
      return "ranking";
  }
  return "?";
}

double base_loss_value(const BaseLoss& loss, double u) {
  require_finite(u);
  return value_unchecked(loss, u);
}

double base_loss_subgrad(const BaseLoss& loss, double u) {
  require_finite(u);
  return subgrad_unchecked(loss, u);
}

std::size_t count_relevant(LabelView y) noexcept {
  return static_cast<std::size_t>(std::count(y.begin(), y.end(), Label{1}));
}

bool is_ranking_degenerate(LabelView y) noexcept {
  const std::size_t pos = count_relevant(y);
  return pos == 0 || pos == y.size();
}

double hamming_loss_01(LabelView pred, LabelView y) {
  require_same_length(pred.size(), y.size());
  if (y.empty()) throw InvalidInput("empty label vector");
  std::size_t wrong = 0;
  for (std::size_t j = 0; j < y.size(); ++j) wrong += pred[j] != y[j];
  return static_cast<double>(wrong) / static_cast<double>(y.size());
}

double subset_loss_01(LabelView pred, LabelView y) {
  require_same_length(pred.size(), y.size());
  if (y.empty()) throw InvalidInput("empty label vector");
  return std::equal(pred.begin(), pred.end(), y.begin()) ? 0.0 : 1.0;
}

std::optional<double> ranking_loss_01(ScoreView f, LabelView y) {
  require_same_length(f.size(), y.size());
  const auto [pos, neg] = split_counts(y);
  if (pos == 0 || neg == 0) return std::nullopt;
  std::size_t violated = 0;
  for (std::size_t p = 0; p < y.size(); ++p) {
    if (y[p] != 1) continue;
    for (std::size_t q = 0; q < y.size(); ++q)
      if (y[q] == -1 && f[p] <= f[q]) ++violated;
  }
  return static_cast<double>(violated) / (static_cast<double>(pos) * static_cast<double>(neg));
}

double surrogate_hamming(ScoreView f, LabelView y, const BaseLoss& loss) {
  require_same_length(f.size(), y.size());
  if (y.empty()) throw InvalidInput("empty label vector");
  double sum;
  if (loss.kind == BaseLossKind::hinge) {
    sum = simd::active().hinge_margin_sum(f.data(), y.data(), y.size());
  } else {
    sum = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) sum += value_unchecked(loss, y[j] * f[j]);
  }
  return sum / static_cast<double>(y.size());
}

double surrogate_subset(ScoreView f, LabelView y, const BaseLoss& loss) {
  require_same_length(f.size(), y.size());
  if (y.empty()) throw InvalidInput("empty label vector");
  if (loss.kind == BaseLossKind::hinge)
    return simd::active().hinge_margin_max(f.data(), y.data(), y.size());
  double m = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) m = std::max(m, value_unchecked(loss, y[j] * f[j]));
  return m;
}

std::optional<double> surrogate_ranking(ScoreView f, LabelView y, const BaseLoss& loss) {
  require_same_length(f.size(), y.size());
  const auto [pos, neg] = split_counts(y);
  if (pos == 0 || neg == 0) return std::nullopt;
  double sum = 0.0;
  for (std::size_t p = 0; p < y.size(); ++p) {
    if (y[p] != 1) continue;
    for (std::size_t q = 0; q < y.size(); ++q)
      if (y[q] == -1) sum += value_unchecked(loss, f[p] - f[q]);
  }
  return sum / (static_cast<double>(pos) * static_cast<double>(neg));
}

std::optional<double> surrogate_value(SurrogateKind kind, ScoreView f, LabelView y,
                                      const BaseLoss& loss) {
  switch (kind) {
    case SurrogateKind::hamming:
      return surrogate_hamming(f, y, loss);
    case SurrogateKind::subset:
      return surrogate_subset(f, y, loss);
    case SurrogateKind::ranking:
      return surrogate_ranking(f, y, loss);
  }
  return std::nullopt;
}

void surrogate_subgrad(SurrogateKind kind, ScoreView f, LabelView y, const BaseLoss& loss,
                       std::span<double> out) {
  require_same_length(f.size(), y.size());
  require_same_length(out.size(), y.size());
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t c = y.size();
  switch (kind) {
    case SurrogateKind::hamming: {
      const double inv_c = 1.0 / static_cast<double>(c);
      for (std::size_t j = 0; j < c; ++j) {
        const double yj = y[j];
        out[j] = inv_c * yj * subgrad_unchecked(loss, yj * f[j]);
      }
      return;
    }
    case SurrogateKind::subset: {
      if (c == 0) return;
      std::size_t best = 0;
      double best_value = value_unchecked(loss, y[0] * f[0]);
      for (std::size_t j = 1; j < c; ++j) {
        const double v = value_unchecked(loss, y[j] * f[j]);
        if (v > best_value) {
          best = j;
          best_value = v;
        }
      }
      const double yb = y[best];
      out[best] = yb * subgrad_unchecked(loss, yb * f[best]);
      return;
    }
    case SurrogateKind::ranking: {
      const auto [pos, neg] = split_counts(y);
      if (pos == 0 || neg == 0)
        throw DegenerateError("ranking subgradient needs both relevant and irrelevant labels");
      const double w = 1.0 / (static_cast<double>(pos) * static_cast<double>(neg));
      for (std::size_t p = 0; p < c; ++p) {
        if (y[p] != 1) continue;
        for (std::size_t q = 0; q < c; ++q) {
          if (y[q] != -1) continue;
          const double g = w * subgrad_unchecked(loss, f[p] - f[q]);
          out[p] += g;
          out[q] -= g;
        }
      }
      return;
    }
  }
}

std::vector<double> surrogate_subgrad(SurrogateKind kind, ScoreView f, LabelView y,
                                      const BaseLoss& loss) {
  std::vector<double> out(f.size());
  surrogate_subgrad(kind, f, y, loss, out);
  return out;
}

}  // namespace mlc
