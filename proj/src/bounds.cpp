#include "mlc/bounds.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "mlc/error.hpp"
#include "mlc/simd/kernels.hpp"

namespace mlc {
namespace {

constexpr std::array kAllBounds{
    NamedBound::Ah_hamming,        NamedBound::Ah_subset,  NamedBound::Ah_ranking,
    NamedBound::As_subset_hamming, NamedBound::As_ranking, NamedBound::Ar_ranking,
    NamedBound::Ar_hamming,        NamedBound::Ar_subset,  NamedBound::BR_hamming,
    NamedBound::RankSVM_ranking,
};

// Shape of one named bound:
//   c^risk_pow R_hat + 2 sqrt(2) rho c^outer_pow sqrt(c^inner_pow Lambda^2 r^2 / n)
//                    + 3 B c^risk_pow sqrt(ln(2/delta) / (2n))
struct Form {
  int risk_pow;
  int outer_pow;
  int inner_pow;
  bool hinge_rho;
};

constexpr Form form_of(NamedBound b) {
  switch (b) {
    case NamedBound::Ah_hamming:
      return {0, 0, 0, false};
    case NamedBound::Ah_subset:
    case NamedBound::Ah_ranking:
      return {1, 1, 0, false};
    case NamedBound::As_subset_hamming:
    case NamedBound::As_ranking:
    case NamedBound::Ar_ranking:
      return {0, 0, 1, false};
    case NamedBound::Ar_hamming:
      return {1, 0, 3, false};
    case NamedBound::Ar_subset:
      return {2, 0, 5, false};
    case NamedBound::BR_hamming:
      return {0, 0, 0, true};
    case NamedBound::RankSVM_ranking:
      return {0, 0, 1, true};
  }
  return {0, 0, 0, false};
}

void check_common(std::size_t c, std::size_t n, double Lambda, double r, double delta,
                  double risk) {
  if (n < 1) throw InvalidInput("bound needs n >= 1");
  if (c < 1) throw InvalidInput("bound needs c >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
  if (!(Lambda > 0.0)) throw InvalidInput("Lambda must be positive");
  if (!(r > 0.0)) throw InvalidInput("r must be positive");
  if (!(risk >= 0.0)) throw InvalidInput("empirical risk must be non-negative");
}

double confidence_root(double delta, std::size_t n) {
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

BoundReport assemble(std::string name, double risk, double complexity, double confidence) {
  BoundReport report;
  report.name = std::move(name);
  report.terms = {risk, complexity, confidence};
  report.total = risk + complexity + confidence;
  return report;
}

}  // namespace

void BoundQuery::validate() const {
  check_common(c, n, Lambda, r, delta, empirical_risk);
  if (!(mu >= 0.0)) throw InvalidInput("mu must be non-negative");
  if (!(M >= 0.0)) throw InvalidInput("M must be non-negative");
  if (!(multiplier >= 0.0)) throw InvalidInput("multiplier must be non-negative");
}

double lipschitz_of(SurrogateKind kind, double rho, std::size_t c) {
  if (!(rho > 0.0)) throw InvalidInput("rho must be positive");
  if (c < 1) throw InvalidInput("c must be >= 1");
  switch (kind) {
    case SurrogateKind::hamming:
      return rho / std::sqrt(static_cast<double>(c));
    case SurrogateKind::subset:
    case SurrogateKind::ranking:
      return rho;
  }
  throw InvalidInput("invalid surrogate kind");
}

BoundReport base_bound(const BoundQuery& q) {
  q.validate();
  const double cd = static_cast<double>(q.c), nd = static_cast<double>(q.n);
  const double complexity =
      2.0 * std::numbers::sqrt2 * q.mu * std::sqrt(cd * q.Lambda * q.Lambda * q.r * q.r / nd);
  const double confidence = 3.0 * q.M * confidence_root(q.delta, q.n);
  return assemble("base", q.multiplier * q.empirical_risk, complexity, confidence);
}

std::span<const NamedBound> all_named_bounds() noexcept { return kAllBounds; }

std::string_view to_string(NamedBound b) noexcept {
  switch (b) {
    case NamedBound::Ah_hamming:
      return "Ah_hamming";
    case NamedBound::Ah_subset:
      return "Ah_subset";
    case NamedBound::Ah_ranking:
      return "Ah_ranking";
    case NamedBound::As_subset_hamming:
      return "As_subset_hamming";
    case NamedBound::As_ranking:
      return "As_ranking";
    case NamedBound::Ar_ranking:
      return "Ar_ranking";
    case NamedBound::Ar_hamming:
      return "Ar_hamming";
    case NamedBound::Ar_subset:
      return "Ar_subset";
    case NamedBound::BR_hamming:
      return "BR_hamming";
    case NamedBound::RankSVM_ranking:
      return "RankSVM_ranking";
  }
  return "?";
}

NamedBound parse_named_bound(std::string_view name) {
  for (NamedBound b : kAllBounds)
    if (to_string(b) == name) return b;
  throw InvalidInput("unknown bound '" + std::string(name) + "'");
}

BoundReport named_bound(NamedBound bound, const NamedBoundInputs& in) {
  check_common(in.c, in.n, in.Lambda, in.r, in.delta, in.empirical_risk);
  if (!(in.B >= 0.0)) throw InvalidInput("B must be non-negative");
  const Form form = form_of(bound);
  const double rho = form.hinge_rho ? 1.0 : in.rho;
  if (!(rho > 0.0)) throw InvalidInput("rho must be positive");
  const double cd = static_cast<double>(in.c), nd = static_cast<double>(in.n);
  const double risk_scale = std::pow(cd, form.risk_pow);
  const double complexity = 2.0 * std::numbers::sqrt2 * rho * std::pow(cd, form.outer_pow) *
                            std::sqrt(std::pow(cd, form.inner_pow) * in.Lambda * in.Lambda *
                                      in.r * in.r / nd);
  const double confidence = 3.0 * in.B * risk_scale * confidence_root(in.delta, in.n);
  return assemble(std::string(to_string(bound)), risk_scale * in.empirical_risk, complexity,
                  confidence);
}

BoundReport named_bound(std::string_view name, const NamedBoundInputs& in) {
  return named_bound(parse_named_bound(name), in);
}

RademacherEstimate rademacher_kernel_estimate(double kernel_trace, std::size_t c, double Lambda,
                                              std::size_t n, double r) {
  if (!(kernel_trace >= 0.0)) throw InvalidInput("kernel trace must be non-negative");
  if (n < 1 || c < 1) throw InvalidInput("need n >= 1 and c >= 1");
  if (!(Lambda >= 0.0) || !(r >= 0.0)) throw InvalidInput("Lambda and r must be non-negative");
  const double cd = static_cast<double>(c), nd = static_cast<double>(n);
  return {Lambda * std::sqrt(cd * kernel_trace) / nd, std::sqrt(cd * Lambda * Lambda * r * r / nd)};
}

KernelSpec parse_kernel(std::string_view name, double gamma) {
  if (name == "linear") return {KernelKind::linear, gamma};
  if (name == "rbf") {
    if (!(gamma > 0.0)) throw InvalidInput("rbf gamma must be positive");
    return {KernelKind::rbf, gamma};
  }
  throw InvalidInput("unknown kernel '" + std::string(name) + "'");
}

HypothesisStats hypothesis_stats(const LinearModel& model, const Dataset& data,
                                 const KernelSpec& kernel) {
  if (model.input_dim() != data.d() || model.c() != data.c())
    throw DimensionError("model and dataset dimensions differ");
  HypothesisStats stats;
  stats.Lambda_realized = model.frobenius_norm();
  double max_k = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    double k = 1.0;
    if (kernel.kind == KernelKind::linear) {
      k = simd::squared_norm(data.features.row(i).value) + (model.bias() ? 1.0 : 0.0);
    }
    stats.kernel_trace += k;
    max_k = std::max(max_k, k);
  }
  stats.r_empirical = std::sqrt(max_k);
  return stats;
}

}  // namespace mlc
