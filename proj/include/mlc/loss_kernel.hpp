#pragma once

// Base losses, the three 0/1 multi-label measures, their convex surrogates and
// surrogate subgradients with respect to the score vector.
//
// Labels are stored as int8 values in {-1, +1}. Scores are plain doubles. All
// functions here are pure.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mlc {

using Label = std::int8_t;
using LabelView = std::span<const Label>;
using ScoreView = std::span<const double>;

/// Owning label vector; every entry is validated to be -1 or +1.
class LabelVector {
 public:
  LabelVector() = default;
  explicit LabelVector(std::vector<Label> entries);
  LabelVector(std::initializer_list<int> entries);

  /// Builds a vector of length `c` with +1 at the listed indices.
  static LabelVector from_relevant(std::size_t c, std::span<const std::size_t> relevant);

  std::size_t size() const noexcept { return entries_.size(); }
  Label operator[](std::size_t j) const noexcept { return entries_[j]; }
  LabelView view() const noexcept { return entries_; }
  operator LabelView() const noexcept { return entries_; }  // NOLINT(google-explicit-constructor)

  std::size_t num_relevant() const noexcept;
  std::size_t num_irrelevant() const noexcept { return size() - num_relevant(); }

  friend bool operator==(const LabelVector&, const LabelVector&) = default;

 private:
  std::vector<Label> entries_;
};

enum class BaseLossKind { hinge, logistic_ln, logistic_log2 };

/// A margin loss l(u) together with its Lipschitz constant rho and a bound B.
///
/// B is the bound assumed on the evaluation domain. None of the three losses is
/// bounded on the whole real line, so B defaults to +inf and callers that feed
/// the generalization bounds set it explicitly.
struct BaseLoss {
  BaseLossKind kind = BaseLossKind::hinge;
  double bound = std::numeric_limits<double>::infinity();

  static BaseLoss hinge() { return {BaseLossKind::hinge}; }
  static BaseLoss logistic_ln() { return {BaseLossKind::logistic_ln}; }
  static BaseLoss logistic_log2() { return {BaseLossKind::logistic_log2}; }

  double rho() const noexcept;
  /// Whether l(u) >= [[u <= 0]] for every u. False for the natural-log logistic.
  bool dominates_zero_one() const noexcept { return kind != BaseLossKind::logistic_ln; }
};

std::string_view to_string(BaseLossKind kind) noexcept;
/// Accepts "hinge", "logistic_ln", "logistic_log2". Throws InvalidInput.
BaseLoss parse_base_loss(std::string_view name);

double base_loss_value(const BaseLoss& loss, double u);
/// Hinge kink at u = 1 resolves to 0.
double base_loss_subgrad(const BaseLoss& loss, double u);

enum class SurrogateKind { hamming, subset, ranking };
std::string_view to_string(SurrogateKind kind) noexcept;

/// Number of labels with y_j = +1.
std::size_t count_relevant(LabelView y) noexcept;
/// True when the sample has no relevant or no irrelevant label.
bool is_ranking_degenerate(LabelView y) noexcept;

double hamming_loss_01(LabelView pred, LabelView y);
double subset_loss_01(LabelView pred, LabelView y);
/// Fraction of (relevant, irrelevant) pairs with f_p <= f_q. nullopt for
/// degenerate label vectors.
std::optional<double> ranking_loss_01(ScoreView f, LabelView y);

double surrogate_hamming(ScoreView f, LabelView y, const BaseLoss& loss);
double surrogate_subset(ScoreView f, LabelView y, const BaseLoss& loss);
std::optional<double> surrogate_ranking(ScoreView f, LabelView y, const BaseLoss& loss);
std::optional<double> surrogate_value(SurrogateKind kind, ScoreView f, LabelView y,
                                      const BaseLoss& loss);

/// Writes a subgradient of the chosen surrogate into `out` (overwritten).
/// Subset ties pick the smallest label index. Ranking on a degenerate label
/// vector throws DegenerateError.
void surrogate_subgrad(SurrogateKind kind, ScoreView f, LabelView y, const BaseLoss& loss,
                       std::span<double> out);
std::vector<double> surrogate_subgrad(SurrogateKind kind, ScoreView f, LabelView y,
                                      const BaseLoss& loss);

}  // namespace mlc
