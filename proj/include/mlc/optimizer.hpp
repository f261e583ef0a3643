#pragma once

// Regularized empirical risk minimization for the three surrogate learners:
//
//     min_W (1/n) sum_i L(W^T x_i, y_i) + lambda ||W||_F^2
//
// solved with SVRG using Barzilai-Borwein step sizes, plus a deterministic
// full-batch subgradient solver used as a reference.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "mlc/data_io.hpp"
#include "mlc/error.hpp"
#include "mlc/loss_kernel.hpp"
#include "mlc/matrix.hpp"
#include "mlc/model.hpp"

namespace mlc {

enum class Learner { hamming, subset, ranking };

/// "A_h", "A_s", "A_r".
std::string_view to_string(Learner learner) noexcept;
/// Accepts the names above and "hamming", "subset", "ranking".
Learner parse_learner(std::string_view name);
SurrogateKind surrogate_of(Learner learner) noexcept;

/// Divisor in the Barzilai-Borwein step: the feature count d (default) or
/// the inner-loop length m (the original SVRG-BB rule).
enum class BbScale { features, inner_length };
std::string_view to_string(BbScale scale) noexcept;
BbScale parse_bb_scale(std::string_view name);

struct TrainConfig {
  Learner learner = Learner::hamming;
  double lambda = 0.0;
  double eta0 = 0.05;
  std::size_t inner_length = 0;  // m; 0 selects 2n
  std::size_t outer_epochs = 30;
  std::uint64_t seed = 0;
  BaseLoss base_loss = BaseLoss::hinge();
  bool bias = false;
  bool early_stop = false;  // stop once ||G_s||_F < early_stop_tol
  double early_stop_tol = 1e-6;

  // Step-size safeguards around the Barzilai-Borwein estimate.
  BbScale bb_scale = BbScale::features;
  double bb_min_denominator = 1e-12;
  double eta_min = 1e-8;
  double eta_max = 1e3;
  double divergence_factor = 1e6;

  /// Throws InvalidInput unless eta0 > 0, lambda >= 0, outer_epochs >= 1.
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double eta = 0.0;
  double objective = 0.0;
  double grad_norm = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

/// One record per outer epoch s, measured at the snapshot W~_s; the last record
/// is the returned model.
struct TrainTrace {
  std::vector<EpochRecord> records;

  /// Columns: epoch, eta, objective, grad_norm.
  void write_csv(std::ostream& out) const;
  friend bool operator==(const TrainTrace&, const TrainTrace&) = default;
};

class DivergedError : public Error {
 public:
  DivergedError(const std::string& what, TrainTrace trace) : Error(what), trace_(std::move(trace)) {}
  const TrainTrace& trace() const noexcept { return trace_; }

 private:
  TrainTrace trace_;
};

struct TrainResult {
  LinearModel model;
  TrainTrace trace;
  std::size_t effective_samples = 0;  // n after dropping degenerate ranking samples
};

/// (1/n) sum_i L(f(x_i), y_i) + lambda ||W||^2 over the effective samples.
/// Throws InvalidInput when no sample is usable.
double objective(const LinearModel& model, const Dataset& data, const TrainConfig& config);

/// (1/n) sum_i grad g_i(W) with g_i(W) = L(W^T x_i, y_i) + lambda ||W||^2.
Matrix full_gradient(const LinearModel& model, const Dataset& data, const TrainConfig& config);

/// Indices of samples that enter the objective: all rows, or the
/// non-degenerate ones for the ranking learner.
std::vector<std::size_t> effective_samples(const Dataset& data, Learner learner);

/// Passed to an observer after the first inner step of every outer epoch.
struct FirstStepProbe {
  std::size_t epoch;
  double eta;
  const Matrix& snapshot;       // W~_s
  const Matrix& full_gradient;  // G_s
  const Matrix& step;           // W_1 - W_0
};
using FirstStepObserver = std::function<void(const FirstStepProbe&)>;

/// ||dW||_F^2 / (divisor * <dW, dG>) clamped to [eta_min, eta_max];
/// `previous` when <dW, dG> is not above bb_min_denominator.
double barzilai_borwein_step(const Matrix& delta_w, const Matrix& delta_g, double previous,
                             double divisor, const TrainConfig& config);

/// SVRG with Barzilai-Borwein steps. W~_0 = 0; each outer epoch computes G_s,
/// sets eta_s = ||dW||^2 / (d * <dW, dG>) for s > 0 and runs `inner_length`
/// variance-reduced steps on uniformly drawn samples. Throws DivergedError if
/// the objective becomes non-finite or exceeds divergence_factor times its
/// initial value.
TrainResult svrg_bb_train(const Dataset& data, const TrainConfig& config,
                          const FirstStepObserver& observer = {});

enum class StepRule { inv_sqrt, constant };

/// Full-batch subgradient descent from W = 0 with eta_t = eta0 / sqrt(t + 1)
/// (or constant). Returns the best iterate seen; the trace has one record per
/// iteration plus the final iterate.
TrainResult batch_reference_train(const Dataset& data, const TrainConfig& config,
                                  std::size_t iterations, StepRule rule = StepRule::inv_sqrt);

}  // namespace mlc
