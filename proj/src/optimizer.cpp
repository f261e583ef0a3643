#include "mlc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>

#include "mlc/format.hpp"
#include "mlc/rng.hpp"
#include "mlc/simd/kernels.hpp"

namespace mlc {
namespace {

// A training problem with the bias column (if any) materialized, so rows can be
// used against the full weight matrix directly.
struct Problem {
  std::optional<Dataset> augmented;
  const Dataset* source = nullptr;
  std::vector<std::size_t> active;
  SurrogateKind kind = SurrogateKind::hamming;
  BaseLoss loss;
  double lambda = 0.0;
  std::size_t d = 0;
  std::size_t c = 0;

  const Dataset& data() const { return augmented ? *augmented : *source; }
  SparseRow row(std::size_t p) const { return data().features.row(active[p]); }
  LabelView labels(std::size_t p) const { return data().labels.row(active[p]); }
  std::size_t n() const { return active.size(); }
};

Problem make_problem(const Dataset& data, const TrainConfig& config, bool bias) {
  data.validate();
  Problem p;
  p.source = &data;
  if (bias) p.augmented = data.with_bias_column();
  p.active = effective_samples(data, config.learner);
  if (p.active.empty())
    throw InvalidInput("no usable samples (every sample is degenerate for the ranking learner)");
  p.kind = surrogate_of(config.learner);
  p.loss = config.base_loss;
  p.lambda = config.lambda;
  p.d = p.data().d();
  p.c = p.data().c();
  return p;
}

void check_model(const LinearModel& model, const Dataset& data) {
  if (model.input_dim() != data.d() || model.c() != data.c())
    throw DimensionError("model is " + std::to_string(model.input_dim()) + "x" +
                         std::to_string(model.c()) + " but data is " + std::to_string(data.d()) +
                         "x" + std::to_string(data.c()));
}

// out = W^T x
void sparse_scores(const Matrix& w, SparseRow x, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const auto& axpy = simd::active().axpy;
  for (std::size_t k = 0; k < x.nnz(); ++k)
    axpy(x.value[k], w.row(x.index[k]).data(), out.data(), out.size());
}

// W += a * x g^T
void sparse_rank_one(Matrix& w, double a, SparseRow x, std::span<const double> g) {
  const auto& axpy = simd::active().axpy;
  for (std::size_t k = 0; k < x.nnz(); ++k)
    axpy(a * x.value[k], g.data(), w.row(x.index[k]).data(), g.size());
}

// Per-sample scores and subgradients at one point, kept for the inner loop.
struct Evaluation {
  Matrix scores;    // n x c
  Matrix subgrads;  // n x c
  Matrix gradient;  // d x c
  double objective = 0.0;
};

// Shared by objective(), full_gradient() and both solvers so the snapshot
// gradient is bit-identical whichever entry point computes it.
void evaluate(const Problem& p, const Matrix& w, Evaluation& ev) {
  const std::size_t n = p.n();
  if (ev.scores.rows() != n || ev.scores.cols() != p.c) {
    ev.scores = Matrix(n, p.c);
    ev.subgrads = Matrix(n, p.c);
  }
  if (ev.gradient.rows() != p.d || ev.gradient.cols() != p.c) ev.gradient = Matrix(p.d, p.c);
  ev.gradient.fill(0.0);
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const SparseRow x = p.row(i);
    auto s = ev.scores.row(i);
    auto g = ev.subgrads.row(i);
    sparse_scores(w, x, s);
    loss_sum += *surrogate_value(p.kind, s, p.labels(i), p.loss);
    surrogate_subgrad(p.kind, s, p.labels(i), p.loss, g);
    sparse_rank_one(ev.gradient, 1.0, x, g);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  simd::scale(inv_n, ev.gradient.flat());
  simd::axpy(2.0 * p.lambda, w.flat(), ev.gradient.flat());
  ev.objective = loss_sum * inv_n + p.lambda * simd::squared_norm(w.flat());
}

void write_record(std::ostream& out, const EpochRecord& r) {
  out << r.epoch << ',' << format_double(r.eta) << ',' << format_double(r.objective) << ','
      << format_double(r.grad_norm) << '\n';
}

void check_divergence(double value, double initial, const TrainConfig& config, const TrainTrace& trace) {
  const double limit = config.divergence_factor * std::max(initial, std::numeric_limits<double>::min());
  if (!std::isfinite(value) || value > limit)
    throw DivergedError("training diverged: objective " + format_double(value) + " exceeds " +
                            format_double(limit),
                        trace);
}

}  // namespace

std::string_view to_string(Learner learner) noexcept {
  switch (learner) {
    case Learner::hamming:
      return "A_h";
    case Learner::subset:
      return "A_s";
    case Learner::ranking:
      return "A_r";
  }
  return "?";
}

Learner parse_learner(std::string_view name) {
  if (name == "A_h" || name == "hamming") return Learner::hamming;
  if (name == "A_s" || name == "subset") return Learner::subset;
  if (name == "A_r" || name == "ranking") return Learner::ranking;
  throw InvalidInput("unknown learner '" + std::string(name) + "'");
}

SurrogateKind surrogate_of(Learner learner) noexcept {
  switch (learner) {
    case Learner::hamming:
      return SurrogateKind::hamming;
    case Learner::subset:
      return SurrogateKind::subset;
    case Learner::ranking:
      return SurrogateKind::ranking;
  }
  return SurrogateKind::hamming;
}

void TrainConfig::validate() const {
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw InvalidInput("eta0 must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be >= 0");
  if (outer_epochs < 1) throw InvalidInput("outer_epochs must be >= 1");
  if (!(eta_min > 0.0) || !(eta_max >= eta_min)) throw InvalidInput("invalid step-size clamp");
}

void TrainTrace::write_csv(std::ostream& out) const {
  out << "epoch,eta,objective,grad_norm\n";
  for (const auto& r : records) write_record(out, r);
}

std::vector<std::size_t> effective_samples(const Dataset& data, Learner learner) {
  std::vector<std::size_t> rows;
  rows.reserve(data.n());
  for (std::size_t i = 0; i < data.n(); ++i)
    if (learner != Learner::ranking || !is_ranking_degenerate(data.labels.row(i))) rows.push_back(i);
  return rows;
}

double objective(const LinearModel& model, const Dataset& data, const TrainConfig& config) {
  check_model(model, data);
  const Problem p = make_problem(data, config, model.bias());
  Evaluation ev;
  evaluate(p, model.weights(), ev);
  return ev.objective;
}

Matrix full_gradient(const LinearModel& model, const Dataset& data, const TrainConfig& config) {
  check_model(model, data);
  const Problem p = make_problem(data, config, model.bias());
  Evaluation ev;
  evaluate(p, model.weights(), ev);
  return std::move(ev.gradient);
}

double barzilai_borwein_step(const Matrix& delta_w, const Matrix& delta_g, double previous,
                             double divisor, const TrainConfig& config) {
  if (delta_w.rows() != delta_g.rows() || delta_w.cols() != delta_g.cols())
    throw DimensionError("step differences differ in shape");
  if (!(divisor > 0.0)) throw InvalidInput("step divisor must be positive");
  const double curvature = simd::dot(delta_w.flat(), delta_g.flat());
  if (!(curvature > config.bb_min_denominator)) return previous;
  const double bb = simd::squared_norm(delta_w.flat()) / (divisor * curvature);
  return std::clamp(bb, config.eta_min, config.eta_max);
}

std::string_view to_string(BbScale scale) noexcept {
  return scale == BbScale::features ? "features" : "inner_length";
}

BbScale parse_bb_scale(std::string_view name) {
  if (name == "features" || name == "d") return BbScale::features;
  if (name == "inner_length" || name == "m") return BbScale::inner_length;
  throw InvalidInput("unknown step scale '" + std::string(name) + "'");
}

TrainResult svrg_bb_train(const Dataset& data, const TrainConfig& config,
                          const FirstStepObserver& observer) {
  config.validate();
  const Problem p = make_problem(data, config, config.bias);
  const std::size_t n = p.n(), d = p.d, c = p.c;
  const std::size_t m = config.inner_length ? config.inner_length : 2 * n;

  Matrix snapshot(d, c), prev_snapshot(d, c), prev_gradient(d, c);
  Matrix delta_w(d, c), delta_g(d, c);
  Matrix lazy(d, c);      // V in W_t = W~_s + alpha V + gamma G_s
  Matrix projected(n, c);  // G_s^T x_i
  Matrix first_step(d, c);
  std::vector<double> current(c), vx(c), grad(c), diff(c);
  Evaluation ev;
  TrainTrace trace;
  Rng rng(config.seed);
  double eta = config.eta0;
  double initial_objective = 0.0;

  for (std::size_t s = 0;; ++s) {
    evaluate(p, snapshot, ev);
    const Matrix& full = ev.gradient;
    if (s == 0) initial_objective = ev.objective;
    check_divergence(ev.objective, initial_objective, config, trace);

    if (s > 0) {
      auto dw = delta_w.flat();
      auto dg = delta_g.flat();
      std::span<const double> sw = snapshot.flat(), pw = prev_snapshot.flat();
      std::span<const double> sg = full.flat(), pg = prev_gradient.flat();
      for (std::size_t k = 0; k < dw.size(); ++k) {
        dw[k] = sw[k] - pw[k];
        dg[k] = sg[k] - pg[k];
      }
      const double divisor = static_cast<double>(config.bb_scale == BbScale::features ? d : m);
      eta = barzilai_borwein_step(delta_w, delta_g, eta, divisor, config);
    }
    const double grad_norm = std::sqrt(simd::squared_norm(full.flat()));
    trace.records.push_back({s, eta, ev.objective, grad_norm});
    if (s == config.outer_epochs) break;
    if (config.early_stop && grad_norm < config.early_stop_tol) break;

    for (std::size_t i = 0; i < n; ++i) sparse_scores(full, p.row(i), projected.row(i));

    lazy.fill(0.0);
    double alpha = 1.0, gamma = 0.0;
    const double shrink = 1.0 - 2.0 * eta * p.lambda;
    for (std::size_t t = 0; t < m; ++t) {
      const std::size_t i = static_cast<std::size_t>(rng.below(n));
      const SparseRow x = p.row(i);
      sparse_scores(lazy, x, vx);
      const auto base = ev.scores.row(i);
      const auto proj = projected.row(i);
      for (std::size_t j = 0; j < c; ++j) current[j] = base[j] + alpha * vx[j] + gamma * proj[j];
      surrogate_subgrad(p.kind, current, p.labels(i), p.loss, grad);
      const auto anchor = ev.subgrads.row(i);
      bool any = false;
      for (std::size_t j = 0; j < c; ++j) {
        diff[j] = grad[j] - anchor[j];
        any = any || diff[j] != 0.0;
      }

      // W_{t+1} - W~ = shrink (W_t - W~) - eta G_s - eta x diff^T
      alpha *= shrink;
      gamma = shrink * gamma - eta;
      if (alpha == 0.0) {
        lazy.fill(0.0);
        alpha = 1.0;
      } else if (std::abs(alpha) < 1e-100) {
        simd::scale(alpha, lazy.flat());
        alpha = 1.0;
      }
      if (any) sparse_rank_one(lazy, -eta / alpha, x, diff);

      if (t == 0 && observer) {
        first_step.fill(0.0);
        simd::axpy(alpha, lazy.flat(), first_step.flat());
        simd::axpy(gamma, full.flat(), first_step.flat());
        observer(FirstStepProbe{s, eta, snapshot, full, first_step});
      }
    }

    prev_snapshot = snapshot;
    prev_gradient = full;
    simd::axpy(alpha, lazy.flat(), snapshot.flat());
    simd::axpy(gamma, full.flat(), snapshot.flat());
  }

  TrainResult result{LinearModel(std::move(snapshot), config.bias), std::move(trace), n};
  return result;
}

TrainResult batch_reference_train(const Dataset& data, const TrainConfig& config,
                                  std::size_t iterations, StepRule rule) {
  config.validate();
  const Problem p = make_problem(data, config, config.bias);
  Matrix w(p.d, p.c), best(p.d, p.c);
  double best_objective = std::numeric_limits<double>::infinity();
  double initial_objective = 0.0;
  Evaluation ev;
  TrainTrace trace;
  for (std::size_t t = 0;; ++t) {
    evaluate(p, w, ev);
    if (t == 0) initial_objective = ev.objective;
    check_divergence(ev.objective, initial_objective, config, trace);
    if (ev.objective < best_objective) {
      best_objective = ev.objective;
      best = w;
    }
    const double eta = rule == StepRule::inv_sqrt
                           ? config.eta0 / std::sqrt(static_cast<double>(t + 1))
                           : config.eta0;
    trace.records.push_back({t, eta, ev.objective, std::sqrt(simd::squared_norm(ev.gradient.flat()))});
    if (t == iterations) break;
    simd::axpy(-eta, ev.gradient.flat(), w.flat());
  }
  return TrainResult{LinearModel(std::move(best), config.bias), std::move(trace), p.n()};
}

}  // namespace mlc
