// Acceptance checks, one line per criterion.
//
//   mlc_acceptance            run every criterion
//   mlc_acceptance 3 7        run the listed ones
//
// Exit status: 0 all pass, 1 any failure, 77 when every requested criterion
// was skipped (missing benchmark data).

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mlc/bounds.hpp"
#include "mlc/data_io.hpp"
#include "mlc/format.hpp"
#include "mlc/harness.hpp"
#include "mlc/loss_kernel.hpp"
#include "mlc/model.hpp"
#include "mlc/optimizer.hpp"
#include "mlc/relations.hpp"
#include "mlc/rng.hpp"

using namespace mlc;
namespace fs = std::filesystem;

namespace {

enum class Verdict { pass, fail, skip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

const std::string kData = MLC_TEST_DATA;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1 ---------------------------------------------------------------------------

Outcome lemma_certification() {
  CampaignConfig cfg;
  cfg.cases = 1'000'000;
  cfg.c_min = 1;
  cfg.c_max = 12;
  cfg.scores = ScoreDistribution::normal;
  cfg.seed = 7;
  cfg.loss = BaseLoss::hinge();
  cfg.workers = 1;
  const auto t0 = std::chrono::steady_clock::now();
  const CampaignSummary s = fuzz_campaign(cfg);
  const double secs = seconds_since(t0);
  double min_slack = std::numeric_limits<double>::infinity();
  std::size_t links_checked = 0;
  for (const auto& l : s.links) {
    if (l.checked) ++links_checked;
    if (l.min_slack) min_slack = std::min(min_slack, *l.min_slack);
  }
  cfg.scores = ScoreDistribution::mixed;
  const CampaignSummary mixed = fuzz_campaign(cfg);
  const bool ok = s.violations == 0 && links_checked == relation_link_ids().size() && secs < 60 &&
                  mixed.violations == 0;
  return {ok ? Verdict::pass : Verdict::fail,
          fmt("%zu normal cases, %zu violations over %zu links, min slack %.3g, %.1f s single-threaded; "
              "mixed edge-value run: %zu violations",
              s.cases, s.violations, links_checked, min_slack, secs, mixed.violations)};
}

// 2 ---------------------------------------------------------------------------

bool smooth_point(SurrogateKind kind, const std::vector<double>& f, LabelView y, const BaseLoss& loss) {
  const double gap = 1e-3;
  const std::size_t c = f.size();
  std::vector<double> terms;
  for (std::size_t j = 0; j < c; ++j) {
    if (loss.kind == BaseLossKind::hinge && std::abs(1.0 - y[j] * f[j]) <= gap) return false;
    terms.push_back(base_loss_value(loss, y[j] * f[j]));
  }
  if (kind == SurrogateKind::subset && c > 1) {
    std::sort(terms.begin(), terms.end());
    if (terms[c - 1] - terms[c - 2] <= gap) return false;
  }
  if (kind == SurrogateKind::ranking && loss.kind == BaseLossKind::hinge)
    for (std::size_t p = 0; p < c; ++p)
      for (std::size_t q = 0; q < c; ++q)
        if (y[p] > 0 && y[q] < 0 && std::abs(1.0 - (f[p] - f[q])) <= gap) return false;
  return true;
}

Outcome gradient_correctness() {
  const double h = 1e-6;
  Rng rng(2024);
  double worst = 0;
  std::string parts;
  for (SurrogateKind kind : {SurrogateKind::hamming, SurrogateKind::subset, SurrogateKind::ranking}) {
    for (BaseLoss loss : {BaseLoss::hinge(), BaseLoss::logistic_log2()}) {
      int points = 0;
      double kind_worst = 0;
      while (points < 100) {
        const std::size_t c = 1 + rng.below(8);
        std::vector<double> f(c);
        std::vector<Label> yv(c);
        for (std::size_t j = 0; j < c; ++j) {
          f[j] = 1.5 * rng.normal();
          yv[j] = rng.below(2) ? 1 : -1;
        }
        const LabelVector y(yv);
        if (kind == SurrogateKind::ranking && is_ranking_degenerate(y)) continue;
        if (!smooth_point(kind, f, y, loss)) continue;
        const auto g = surrogate_subgrad(kind, f, y, loss);
        for (std::size_t j = 0; j < c; ++j) {
          auto fp = f, fm = f;
          fp[j] += h;
          fm[j] -= h;
          const double fd =
              (*surrogate_value(kind, fp, y, loss) - *surrogate_value(kind, fm, y, loss)) / (2 * h);
          kind_worst = std::max(kind_worst, std::abs(fd - g[j]) / std::max(1.0, std::abs(g[j])));
        }
        ++points;
      }
      worst = std::max(worst, kind_worst);
      parts += fmt("%s/%s %.2g  ", std::string(to_string(kind)).c_str(),
                   std::string(to_string(loss.kind)).c_str(), kind_worst);
    }
  }
  return {worst < 1e-5 ? Verdict::pass : Verdict::fail,
          fmt("100 smooth points per surrogate and base loss, worst relative error %.3g (", worst) +
              parts + ")"};
}

// 3 ---------------------------------------------------------------------------

// exact equality; +0 and -0 compare equal (0 + (-eta * 0) is +0)
bool exactly_equal(std::span<const double> a, std::span<const double> b, std::size_t& signed_zeros) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!(a[k] == b[k])) return false;
    signed_zeros += std::bit_cast<std::uint64_t>(a[k]) != std::bit_cast<std::uint64_t>(b[k]);
  }
  return true;
}

double reference_objective(const Dataset& ds, TrainConfig cfg) {
  // best iterate of two diminishing-step batch runs
  double best = std::numeric_limits<double>::infinity();
  for (double eta0 : {0.1, 1.0}) {
    cfg.eta0 = eta0;
    for (const auto& rec : batch_reference_train(ds, cfg, 20000).trace.records)
      best = std::min(best, rec.objective);
  }
  return best;
}

struct GridStats {
  std::size_t cells = 0, agree = 0;
  double worst = 0;
  std::string worst_cell;
};

Outcome optimizer_equivalence() {
  const std::vector<std::string> fixtures{"toy_a.svm", "toy_b.svm", "toy_c.svm"};
  std::map<std::string, GridStats> grids;
  std::size_t epochs_checked = 0, exact_steps = 0, signed_zeros = 0, deterministic = 0, runs = 0;
  for (const auto& name : fixtures) {
    const Dataset ds = load_multilabel_svm(kData + "/" + name);
    for (Learner l : {Learner::hamming, Learner::subset, Learner::ranking}) {
      for (double lambda : {0.01, 0.1}) {
        for (BaseLoss loss : {BaseLoss::hinge(), BaseLoss::logistic_log2()}) {
          TrainConfig cfg;
          cfg.learner = l;
          cfg.lambda = lambda;
          cfg.base_loss = loss;
          cfg.seed = 3;
          const double ref = reference_objective(ds, cfg);
          for (BbScale scale : {BbScale::features, BbScale::inner_length}) {
            cfg.bb_scale = scale;
            auto probe = [&](const FirstStepProbe& p) {
              ++epochs_checked;
              std::vector<double> want(p.full_gradient.size());
              for (std::size_t k = 0; k < want.size(); ++k) want[k] = -p.eta * p.full_gradient.flat()[k];
              exact_steps += exactly_equal(p.step.flat(), want, signed_zeros);
            };
            const TrainResult a = svrg_bb_train(ds, cfg, probe);
            const TrainResult b = svrg_bb_train(ds, cfg);
            ++runs;
            std::ostringstream ma, mb;
            save_model(a.model, ma);
            save_model(b.model, mb);
            deterministic += ma.str() == mb.str() && a.trace == b.trace;

            const double got = a.trace.records.back().objective;
            const double rel = std::abs(got - ref) / ref;
            const std::string key = std::string(to_string(loss.kind)) + ", 1/" +
                                    (scale == BbScale::features ? "d" : "m");
            GridStats& g = grids[key];
            ++g.cells;
            g.agree += rel <= 1e-2;
            if (rel > g.worst) {
              g.worst = rel;
              g.worst_cell = fmt("%s %s lambda=%g svrg=%.6g batch=%.6g", name.c_str(),
                                 std::string(to_string(l)).c_str(), lambda, got, ref);
            }
          }
        }
      }
    }
  }
  std::string detail = fmt("first step == -eta*G exactly in %zu/%zu epochs (%zu entries differ only in the sign of zero); "
                           "%zu/%zu fixed-seed runs identical; objective within 1e-2 of batch:",
                           exact_steps, epochs_checked, signed_zeros, deterministic, runs);
  for (const auto& [key, g] : grids)
    detail += fmt("\n    %-22s %2zu/%zu cells, worst rel %.3g (%s)", key.c_str(), g.agree, g.cells, g.worst,
                  g.worst_cell.c_str());
  const GridStats& primary = grids.at("hinge, 1/d");
  const bool ok = exact_steps == epochs_checked && deterministic == runs && primary.agree == primary.cells;
  return {ok ? Verdict::pass : Verdict::fail, detail};
}

// 4 ---------------------------------------------------------------------------

Outcome bound_fidelity() {
  Rng rng(31);
  double worst = 0;
  std::size_t evaluated = 0;
  for (int t = 0; t < 1000; ++t) {
    NamedBoundInputs in;
    in.rho = 0.05 + 4 * rng.uniform();
    in.B = 10 * rng.uniform();
    in.c = 1 + rng.below(500);
    in.n = 1 + rng.below(1'000'000);
    in.Lambda = 1e-3 + 100 * rng.uniform();
    in.r = 1e-3 + 100 * rng.uniform();
    in.delta = 1e-4 + (1 - 2e-4) * rng.uniform();
    in.empirical_risk = 5 * rng.uniform();
    const double c = double(in.c), rc = std::sqrt(c);
    for (NamedBound b : all_named_bounds()) {
      // composition written from each bound's closed form
      BoundQuery q{.mu = in.rho, .M = in.B, .c = in.c, .n = in.n, .Lambda = in.Lambda, .r = in.r,
                   .delta = in.delta, .empirical_risk = in.empirical_risk, .multiplier = 1};
      switch (b) {
        case NamedBound::Ah_hamming: q.mu = in.rho / rc; break;
        case NamedBound::Ah_subset:
        case NamedBound::Ah_ranking: q.mu = in.rho * rc, q.M = in.B * c, q.multiplier = c; break;
        case NamedBound::Ar_hamming: q.mu = in.rho * c, q.M = in.B * c, q.multiplier = c; break;
        case NamedBound::Ar_subset: q.mu = in.rho * c * c, q.M = in.B * c * c, q.multiplier = c * c; break;
        case NamedBound::BR_hamming: q.mu = 1 / rc; break;
        case NamedBound::RankSVM_ranking: q.mu = 1; break;
        default: break;
      }
      const double want = base_bound(q).total;
      const double got = named_bound(b, in).total;
      worst = std::max(worst, std::abs(got - want) / std::abs(want));
      ++evaluated;
    }
  }

  std::size_t steps = 0, broken = 0;
  NamedBoundInputs in;
  in.B = 1;
  in.empirical_risk = 0.1;
  for (NamedBound b : all_named_bounds()) {
    in.n = 1000;
    double prev = -1;
    for (std::size_t c = 1; c <= 200; ++c) {
      in.c = c;
      const double v = named_bound(b, in).total;
      if (c > 1) ++steps, broken += v < prev;
      prev = v;
    }
    in.c = 10;
    prev = 0;
    for (std::size_t n = 10; n <= 100000; n += 10) {
      in.n = n;
      const double v = named_bound(b, in).total;
      if (n > 10) ++steps, broken += v >= prev;
      prev = v;
    }
  }

  std::size_t rad = 0, rad_bad = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t n = 1 + rng.below(5000);
    const double r = 1e-2 + 10 * rng.uniform();
    const double trace = rng.uniform() * double(n) * r * r;
    const auto e = rademacher_kernel_estimate(trace, 1 + rng.below(200), 10 * rng.uniform(), n, r);
    ++rad;
    rad_bad += e.exact > e.relaxed;
  }
  const bool ok = worst <= 1e-12 && broken == 0 && rad_bad == 0;
  return {ok ? Verdict::pass : Verdict::fail,
          fmt("%zu bound evaluations, worst relative gap %.3g; %zu/%zu sweep steps monotone; "
              "Rademacher exact <= relaxed in %zu/%zu cases",
              evaluated, worst, steps - broken, steps, rad - rad_bad, rad)};
}

// 5, 6 ------------------------------------------------------------------------

struct ReportedRow {
  const char* name;
  bool normalize;
  double h_hl, s_hl, h_sa, s_sa;
};

// Hamming loss and subset accuracy means for A_h / A_s
constexpr ReportedRow kReported[] = {
    {"emotions", true, 0.202, 0.224, 0.288, 0.240},
    {"image", true, 0.180, 0.214, 0.471, 0.396},
    {"scene", true, 0.103, 0.142, 0.628, 0.515},
    {"rcv1-subset1", false, 0.027, 0.032, 0.079, 0.111},
    {"bibtex", false, 0.013, 0.015, 0.190, 0.198},
};

const ReportedRow& reported_row(const std::string& name) {
  for (const auto& r : kReported)
    if (name == r.name) return r;
  std::abort();
}

struct TrendResult {
  double hl, sa;
};

TrendResult cv_best(const fs::path& file, const ReportedRow& row, Learner learner) {
  ExperimentSpec spec;
  spec.data.path = file.string();
  spec.dataset_name = row.name;
  spec.train.learner = learner;
  spec.train.base_loss = BaseLoss::hinge();
  spec.folds = 3;
  spec.normalization = row.normalize ? NormalizationMode::per_fold : NormalizationMode::none;
  spec.workers = workers_from_env();
  const CvReport r = run_cv(spec);
  return {r.per_lambda[r.best_hamming].hamming.mean, r.per_lambda[r.best_subset_acc].subset_acc.mean};
}

std::optional<fs::path> data_dir() {
  const char* dir = std::getenv("MLC_DATA_DIR");
  if (!dir || !*dir) return std::nullopt;
  return fs::path(dir);
}

// "<name>.svm" is the full dataset; "<name>.sub.svm" a documented row subsample.
std::optional<std::pair<fs::path, bool>> find_dataset(const std::string& name) {
  const auto dir = data_dir();
  if (!dir) return std::nullopt;
  if (fs::exists(*dir / (name + ".svm"))) return std::pair{*dir / (name + ".svm"), true};
  if (fs::exists(*dir / (name + ".sub.svm"))) return std::pair{*dir / (name + ".sub.svm"), false};
  return std::nullopt;
}

Outcome trend(const std::vector<std::string>& names, bool hamming_wins, std::size_t needed) {
  std::string detail;
  std::size_t seen = 0;
  bool ok = true;
  for (const auto& name : names) {
    const auto found = find_dataset(name);
    if (!found) {
      detail += "\n    " + name + ": not found";
      continue;
    }
    ++seen;
    const ReportedRow& row = reported_row(name);
    const TrendResult h = cv_best(found->first, row, Learner::hamming);
    const TrendResult s = cv_best(found->first, row, Learner::subset);
    bool direction;
    if (hamming_wins)
      direction = h.hl < s.hl && h.sa > s.sa;
    else
      direction = s.sa > h.sa;
    bool close = true;
    if (found->second) {
      close = std::abs(h.sa - row.h_sa) <= 0.05 && std::abs(s.sa - row.s_sa) <= 0.05;
      if (hamming_wins) close = close && std::abs(h.hl - row.h_hl) <= 0.05 && std::abs(s.hl - row.s_hl) <= 0.05;
    }
    ok = ok && direction && close;
    detail += fmt("\n    %s%s: A_h HL %.3f SA %.3f | A_s HL %.3f SA %.3f | reported A_h %.3f/%.3f A_s %.3f/%.3f "
                  "| direction %s, tolerance %s",
                  name.c_str(), found->second ? "" : " (subsample)", h.hl, h.sa, s.hl, s.sa, row.h_hl, row.h_sa,
                  row.s_hl, row.s_sa, direction ? "ok" : "wrong",
                  found->second ? (close ? "ok" : "exceeded") : "n/a");
  }
  if (seen < needed)
    return {Verdict::skip, "benchmark data unavailable (set MLC_DATA_DIR; see tools/arff_to_mlsvm.py)" + detail};
  return {ok ? Verdict::pass : Verdict::fail, "3-fold CV, hinge, default lambda grid" + detail};
}

Outcome small_label_trend() { return trend({"emotions", "image", "scene"}, true, 3); }
Outcome large_label_trend() { return trend({"bibtex", "rcv1-subset1"}, false, 1); }

// 7 ---------------------------------------------------------------------------

Outcome threshold_oracle() {
  Rng rng(77);
  std::size_t agree = 0, cases = 10000;
  const double grid[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  for (std::size_t t = 0; t < cases; ++t) {
    const std::size_t c = 1 + rng.below(8);
    std::vector<double> f(c);
    std::vector<Label> yv(c);
    const bool ties = t % 2;
    for (std::size_t j = 0; j < c; ++j) {
      f[j] = ties ? grid[rng.below(5)] : rng.normal();
      yv[j] = rng.below(2) ? 1 : -1;
    }
    std::vector<std::size_t> order(c);
    for (std::size_t j = 0; j < c; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });
    std::size_t best = c + 1;
    for (std::size_t k = 0; k <= c; ++k) {
      std::size_t wrong = 0;
      for (std::size_t pos = 0; pos < c; ++pos) wrong += (pos < k ? 1 : -1) != yv[order[pos]];
      best = std::min(best, wrong);
    }
    const OracleThreshold o = oracle_threshold(f, LabelVector(yv));
    agree += o.hamming == double(best) / double(c);
  }
  return {agree == cases ? Verdict::pass : Verdict::fail,
          fmt("%zu/%zu cases equal the exhaustive prefix-split minimum (half with tied scores)", agree, cases)};
}

// 8 ---------------------------------------------------------------------------

Outcome round_trip_and_leakage() {
  std::size_t files = 0, fixpoints = 0;
  for (const char* name : {"small.svm", "crlf.svm", "separable.svm", "toy_a.svm", "toy_b.svm", "toy_c.svm"}) {
    const Dataset a = load_multilabel_svm(kData + "/" + name);
    std::ostringstream first;
    write_multilabel_svm(a, first);
    std::istringstream in(first.str());
    const Dataset b = parse_multilabel_svm(in);
    std::ostringstream second;
    write_multilabel_svm(b, second);
    ++files;
    fixpoints += a.features == b.features && a.labels == b.labels && first.str() == second.str();
  }
  {
    const Dataset a = load_dense_csv(kData + "/features.csv", kData + "/labels01.csv", {.map_zero_one = true});
    std::ostringstream first;
    write_multilabel_svm(a, first);
    std::istringstream in(first.str());
    const Dataset b = parse_multilabel_svm(in);
    ++files;
    fixpoints += a.features == b.features && a.labels == b.labels;
  }

  // CV cells must equal runs whose normalization was fit on the training rows alone
  const Dataset ds = load_multilabel_svm(kData + "/toy_b.svm");
  ExperimentSpec spec;
  spec.lambda_grid = {0.01, 1.0};
  spec.folds = 3;
  spec.fold_seed = 4;
  spec.train.outer_epochs = 10;
  const CvReport report = run_cv(spec, ds);
  const FoldPlan plan = make_folds(ds.n(), spec.folds, spec.fold_seed);
  std::size_t cells = 0, matching = 0, stats_equal = 0, folds = 0;
  for (std::size_t fold = 0; fold < spec.folds; ++fold) {
    const auto tr = plan.train_rows(fold), te = plan.test_rows(fold);
    const Dataset train = ds.select(tr), test = ds.select(te);
    const ZScoreStats ref = compute_zscore_stats(train);
    for (std::size_t li = 0; li < spec.lambda_grid.size(); ++li) {
      const TrainRun run = run_train(spec, train, spec.lambda_grid[li], &test);
      if (li == 0) ++folds, stats_equal += run.stats && run.stats->mean == ref.mean && run.stats->stddev == ref.stddev;
      const CvCell& cell = report.cells[fold * spec.lambda_grid.size() + li];
      ++cells;
      matching += cell.fold == fold && cell.test == evaluate(run.result.model, apply_zscore(test, ref));
    }
  }
  const bool ok = fixpoints == files && matching == cells && stats_equal == folds;
  return {ok ? Verdict::pass : Verdict::fail,
          fmt("%zu/%zu fixtures reach a load-write-load fixpoint; %zu/%zu folds fit z-score stats on train rows only; "
              "%zu/%zu CV cells reproduced from train-only normalization",
              fixpoints, files, stats_equal, folds, matching, cells)};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "lemma certification", lemma_certification},
      {2, "gradient correctness", gradient_correctness},
      {3, "optimizer equivalence", optimizer_equivalence},
      {4, "bound formula fidelity", bound_fidelity},
      {5, "benchmark trend, small label sets", small_label_trend},
      {6, "benchmark trend, large label sets", large_label_trend},
      {7, "t* optimality oracle", threshold_oracle},
      {8, "data round trip and leakage guard", round_trip_and_leakage},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  std::size_t ran = 0, failed = 0, skipped = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Verdict::fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::pass ? "PASS" : o.verdict == Verdict::fail ? "FAIL" : "SKIP";
    std::printf("criterion %d %s: %s: %s\n", c.id, tag, c.title, o.detail.c_str());
    std::fflush(stdout);
    ++ran;
    failed += o.verdict == Verdict::fail;
    skipped += o.verdict == Verdict::skip;
  }
  if (failed) return 1;
  if (ran > 0 && skipped == ran) return 77;
  return 0;
}
