#pragma once

// Closed-form generalization bounds for the three learners and the kernel-trace
// estimate of the empirical Rademacher complexity of the norm-ball class.
//
// Every bound has the shape
//
//     multiplier * R_hat + 2 sqrt(2) mu sqrt(c Lambda^2 r^2 / n)
//                        + 3 M sqrt(ln(2 / delta) / (2 n))
//
// and is reported as its three terms. "log" is the natural logarithm.

#include <span>
#include <string>
#include <string_view>

#include "mlc/data_io.hpp"
#include "mlc/loss_kernel.hpp"
#include "mlc/model.hpp"

namespace mlc {

struct BoundQuery {
  double mu = 1.0;  // Lipschitz constant of the composed loss
  double M = 1.0;   // bound of the composed loss
  std::size_t c = 1;
  std::size_t n = 1;
  double Lambda = 1.0;
  double r = 1.0;
  double delta = 0.05;
  double empirical_risk = 0.0;
  double multiplier = 1.0;

  void validate() const;
};

struct BoundTerms {
  double risk = 0.0;
  double complexity = 0.0;
  double confidence = 0.0;
};

struct BoundReport {
  std::string name;
  double total = 0.0;  // risk + complexity + confidence, summed in that order
  BoundTerms terms;
  // Set when Lambda and r come from a trained model rather than an a-priori
  // constraint; such a report is an a-posteriori diagnostic only.
  bool diagnostic = false;
};

/// Lipschitz constant of the surrogate w.r.t. the score vector:
/// rho / sqrt(c) for Hamming, rho for subset and ranking.
double lipschitz_of(SurrogateKind kind, double rho, std::size_t c);

BoundReport base_bound(const BoundQuery& query);

enum class NamedBound {
  Ah_hamming,
  Ah_subset,
  Ah_ranking,
  As_subset_hamming,
  As_ranking,
  Ar_ranking,
  Ar_hamming,
  Ar_subset,
  BR_hamming,
  RankSVM_ranking,
};

std::span<const NamedBound> all_named_bounds() noexcept;
std::string_view to_string(NamedBound bound) noexcept;
/// Throws InvalidInput for unknown names.
NamedBound parse_named_bound(std::string_view name);

/// Inputs shared by every named bound. `rho` and `B` describe the base loss;
/// BR_hamming and RankSVM_ranking fix rho = 1 (hinge) and ignore `rho`.
struct NamedBoundInputs {
  double rho = 1.0;
  double B = 1.0;
  std::size_t c = 1;
  std::size_t n = 1;
  double Lambda = 1.0;
  double r = 1.0;
  double delta = 0.05;
  double empirical_risk = 0.0;
};

/// Evaluates the bound in the closed form stated for that learner/measure pair.
BoundReport named_bound(NamedBound bound, const NamedBoundInputs& in);
BoundReport named_bound(std::string_view name, const NamedBoundInputs& in);

struct RademacherEstimate {
  double exact = 0.0;    // Lambda sqrt(c Tr(K)) / n
  double relaxed = 0.0;  // sqrt(c Lambda^2 r^2 / n), valid when Tr(K) <= n r^2
};

RademacherEstimate rademacher_kernel_estimate(double kernel_trace, std::size_t c, double Lambda,
                                              std::size_t n, double r);

enum class KernelKind { linear, rbf };

struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  double gamma = 1.0;  // rbf only; k(x, x) = 1 regardless
};

KernelSpec parse_kernel(std::string_view name, double gamma = 1.0);

struct HypothesisStats {
  double Lambda_realized = 0.0;  // ||W||_F
  double r_empirical = 0.0;      // max_i sqrt(k(x_i, x_i))
  double kernel_trace = 0.0;     // sum_i k(x_i, x_i)
};

/// With a biased model the constant feature is part of x, so the linear kernel
/// adds 1 to each ||x_i||^2.
HypothesisStats hypothesis_stats(const LinearModel& model, const Dataset& data,
                                 const KernelSpec& kernel);

}  // namespace mlc
