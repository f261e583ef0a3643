#pragma once

// Executable checks of the inequalities linking the Hamming, subset and
// ranking measures and their surrogates, on single (scores, labels) cases and
// over seeded random campaigns.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlc/loss_kernel.hpp"
#include "mlc/model.hpp"

namespace mlc {

/// Slack below this counts as a violation; it absorbs summation-order noise in
/// the surrogate averages.
inline constexpr double kSlackTolerance = -1e-9;

/// A (scores, labels, base loss) triple with every derived quantity cached.
struct RelationCase {
  std::vector<double> f;
  LabelVector y;
  BaseLoss loss;

  LabelVector sign_prediction;
  LabelVector oracle_prediction;  // t*
  std::size_t num_relevant = 0;
  std::size_t num_irrelevant = 0;
  double hamming01_sign = 0.0;
  double subset01_sign = 0.0;
  double hamming01_oracle = 0.0;
  double subset01_oracle = 0.0;
  std::optional<double> ranking01;
  double hamming_surrogate = 0.0;
  double subset_surrogate = 0.0;
  std::optional<double> ranking_surrogate;

  static RelationCase make(std::vector<double> f, LabelVector y, BaseLoss loss);

  std::size_t c() const noexcept { return y.size(); }
  bool ranking_degenerate() const noexcept { return !ranking01.has_value(); }
  /// Recomputes everything from (f, y, loss) and compares exactly.
  bool consistent() const;
};

struct RelationVerdict {
  std::string_view id;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool holds = true;   // slack >= kSlackTolerance
};

struct CheckOptions {
  /// Run surrogate links even for base losses that do not upper-bound the
  /// 0/1 loss (logistic_ln). Off by default: those links would be meaningless.
  bool allow_non_dominating = false;
};

/// Hamming vs subset (4 links). Never skipped.
std::vector<RelationVerdict> check_hamming_subset(const RelationCase& rc, const CheckOptions& = {});
/// Hamming vs ranking (6 links including the min/max-cardinality forms).
/// nullopt when the case is ranking-degenerate.
std::optional<std::vector<RelationVerdict>> check_hamming_ranking(const RelationCase& rc,
                                                                  const CheckOptions& = {});
/// Subset vs ranking (4 links). nullopt when ranking-degenerate.
std::optional<std::vector<RelationVerdict>> check_subset_ranking(const RelationCase& rc,
                                                                 const CheckOptions& = {});

/// Link ids in reporting order.
std::span<const std::string_view> relation_link_ids() noexcept;

enum class ScoreDistribution {
  normal,  // standard normal scores
  mixed,   // normal, plus tie grids and values at 0 and at the hinge kink
};

ScoreDistribution parse_score_distribution(std::string_view name);
std::string_view to_string(ScoreDistribution d) noexcept;

struct CampaignConfig {
  std::size_t cases = 1000;
  std::size_t c_min = 1;
  std::size_t c_max = 12;
  ScoreDistribution scores = ScoreDistribution::mixed;
  std::uint64_t seed = 0;
  BaseLoss loss = BaseLoss::hinge();
  bool allow_non_dominating = false;
  std::size_t workers = 1;
  std::size_t max_failures_kept = 16;
};

struct LinkStats {
  std::string_view id;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::optional<double> min_slack;
};

struct CampaignFailure {
  std::size_t case_index = 0;
  RelationCase rc;
  std::vector<std::string> violated;
};

struct CampaignSummary {
  CampaignConfig config;
  std::size_t cases = 0;
  std::size_t violations = 0;
  std::size_t ranking_degenerate = 0;
  std::vector<LinkStats> links;
  // Largest observed L_s01(t*) / L_r01 and L_h01(t*) / L_r01 over cases with
  // L_r01 > 0, each divided by its proven constant (c^2, max{|Y+|,|Y-|}).
  double max_subset_oracle_ratio = 0.0;
  double max_hamming_oracle_ratio = 0.0;
  std::vector<CampaignFailure> failures;  // lowest case indices first

  /// Deterministic JSON; identical configs give identical bytes regardless
  /// of the worker count.
  std::string to_json() const;
};

/// Generates `cases` cases from per-block derived seeds and runs all checkers.
/// Throws InvalidInput for logistic_ln unless allow_non_dominating is set.
CampaignSummary fuzz_campaign(const CampaignConfig& config);

/// {"f": [...], "y": [...], "base_loss": "hinge"}
std::string relation_case_to_json(const RelationCase& rc);
RelationCase relation_case_from_json(const std::string& text);

}  // namespace mlc
