#include "mlc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "mlc/error.hpp"
#include "mlc/format.hpp"

namespace mlc {
namespace {

using json = nlohmann::ordered_json;

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json metrics_to_json(const Metrics& m) {
  return {{"n", m.n},
          {"hamming", m.hamming},
          {"subset_acc", m.subset_acc},
          {"ranking", optional_number(m.ranking)},
          {"degenerate_count", m.degenerate_count},
          {"oracle_hamming", m.oracle_hamming}};
}

json summary_json(const Summary& s) { return {{"mean", s.mean}, {"std", s.std}, {"count", s.count}}; }

struct FoldData {
  Dataset train;
  Dataset test;
};

// Normalized train/test pair for one fold; stats only ever see train rows.
FoldData prepare_fold(const Dataset& data, const FoldPlan& plan, std::size_t fold, NormalizationMode mode) {
  const auto train_rows = plan.train_rows(fold);
  const auto test_rows = plan.test_rows(fold);
  FoldData out{data.select(train_rows), data.select(test_rows)};
  if (mode == NormalizationMode::per_fold) {
    const ZScoreStats stats = compute_zscore_stats(out.train);
    out.train = apply_zscore(out.train, stats);
    out.test = apply_zscore(out.test, stats);
  }
  return out;
}

}  // namespace

DataFormat parse_data_format(std::string_view name) {
  if (name == "svm") return DataFormat::svm;
  if (name == "csv") return DataFormat::csv;
  throw InvalidInput("unknown data format '" + std::string(name) + "'");
}

std::string_view to_string(DataFormat f) noexcept { return f == DataFormat::svm ? "svm" : "csv"; }

Dataset load_dataset(const DataSource& source) {
  if (source.format == DataFormat::svm) {
    SvmLoadOptions opt;
    opt.num_labels = source.num_labels;
    opt.num_features = source.num_features;
    return load_multilabel_svm(source.path, opt);
  }
  if (source.labels_path.empty()) throw InvalidInput("csv input needs a labels file");
  CsvLoadOptions opt;
  opt.map_zero_one = source.map_zero_one;
  return load_dense_csv(source.path, source.labels_path, opt);
}

NormalizationMode parse_normalization(std::string_view name) {
  if (name == "none") return NormalizationMode::none;
  if (name == "per-fold" || name == "per_fold") return NormalizationMode::per_fold;
  if (name == "global") return NormalizationMode::global;
  throw InvalidInput("unknown normalization '" + std::string(name) + "'");
}

std::string_view to_string(NormalizationMode m) noexcept {
  switch (m) {
    case NormalizationMode::none: return "none";
    case NormalizationMode::per_fold: return "per-fold";
    case NormalizationMode::global: return "global";
  }
  return "none";
}

std::vector<double> default_lambda_grid() { return {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0}; }

void ExperimentSpec::validate() const {
  if (lambda_grid.empty()) throw InvalidInput("lambda grid is empty");
  for (double l : lambda_grid)
    if (!(l >= 0.0) || !std::isfinite(l)) throw InvalidInput("lambda values must be finite and >= 0");
  if (folds < 2) throw InvalidInput("need at least 2 folds");
  TrainConfig probe = train;
  probe.lambda = lambda_grid.front();
  probe.validate();
}

std::vector<std::pair<std::string, std::string>> ExperimentSpec::resolved_config() const {
  std::string grid;
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) grid += (i ? ";" : "") + format_double(lambda_grid[i]);
  return {
      {"dataset", dataset_name},
      {"data_path", data.path},
      {"data_format", std::string(to_string(data.format))},
      {"learner", std::string(to_string(train.learner))},
      {"base_loss", std::string(to_string(train.base_loss.kind))},
      {"bias", train.bias ? "1" : "0"},
      {"lambda_grid", grid},
      {"folds", std::to_string(folds)},
      {"fold_seed", std::to_string(fold_seed)},
      {"normalization", std::string(to_string(normalization))},
      {"eta0", format_double(train.eta0)},
      {"inner_length", train.inner_length == 0 ? "2n" : std::to_string(train.inner_length)},
      {"outer_epochs", std::to_string(train.outer_epochs)},
      {"train_seed", std::to_string(train.seed)},
      {"early_stop", train.early_stop ? format_double(train.early_stop_tol) : "off"},
      {"bb_scale", std::string(to_string(train.bb_scale))},
      {"bb_min_denominator", format_double(train.bb_min_denominator)},
      {"eta_min", format_double(train.eta_min)},
      {"eta_max", format_double(train.eta_max)},
      {"divergence_factor", format_double(train.divergence_factor)},
  };
}

Metrics evaluate(const LinearModel& model, const Dataset& data) {
  if (data.c() != model.c())
    throw DimensionError("model has " + std::to_string(model.c()) + " labels, data has " + std::to_string(data.c()));
  if (data.d() > model.input_dim())
    throw DimensionError("model expects " + std::to_string(model.input_dim()) + " features, data has " +
                         std::to_string(data.d()));
  if (data.n() == 0) throw InvalidInput("cannot evaluate on an empty dataset");
  Metrics m;
  m.n = data.n();
  std::vector<double> f(model.c());
  std::vector<Label> pred(model.c());
  double hamming = 0.0, subset = 0.0, ranking = 0.0, oracle = 0.0;
  std::size_t ranked = 0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    model.score(data.features.row(i), f);
    const LabelView y = data.labels.row(i);
    classify_sign(f, pred);
    hamming += hamming_loss_01(pred, y);
    subset += 1.0 - subset_loss_01(pred, y);
    oracle += oracle_threshold(f, y).hamming;
    if (auto r = ranking_loss_01(f, y)) {
      ranking += *r;
      ++ranked;
    } else {
      ++m.degenerate_count;
    }
  }
  const double n = static_cast<double>(data.n());
  m.hamming = hamming / n;
  m.subset_acc = subset / n;
  m.oracle_hamming = oracle / n;
  if (ranked > 0) m.ranking = ranking / static_cast<double>(ranked);
  return m;
}

std::string metrics_json(const Metrics& m) { return metrics_to_json(m).dump(2); }

TrainRun run_train(const ExperimentSpec& spec, const Dataset& train, double lambda, const Dataset* test) {
  TrainConfig config = spec.train;
  config.lambda = lambda;
  config.validate();
  TrainRun run{.result = {}, .train_metrics = {}, .test_metrics = {}, .stats = {}};
  if (spec.normalization != NormalizationMode::none) {
    const ZScoreStats stats = compute_zscore_stats(train);
    const Dataset ntrain = apply_zscore(train, stats);
    run.result = svrg_bb_train(ntrain, config);
    run.train_metrics = evaluate(run.result.model, ntrain);
    if (test) run.test_metrics = evaluate(run.result.model, apply_zscore(*test, stats));
    run.stats = stats;
  } else {
    run.result = svrg_bb_train(train, config);
    run.train_metrics = evaluate(run.result.model, train);
    if (test) run.test_metrics = evaluate(run.result.model, *test);
  }
  return run;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

std::size_t select_index(const std::vector<double>& values, bool maximize) {
  if (values.empty()) throw InvalidInput("nothing to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (maximize ? values[i] > values[best] : values[i] < values[best]) best = i;
  return best;
}

std::size_t workers_from_env() {
  const char* env = std::getenv("MLC_WORKERS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0' || v == 0) throw InvalidInput("MLC_WORKERS must be a positive integer");
  return static_cast<std::size_t>(v);
}

CvReport run_cv(const ExperimentSpec& spec) {
  Dataset data = load_dataset(spec.data);
  return run_cv(spec, data);
}

CvReport run_cv(const ExperimentSpec& spec, const Dataset& input) {
  spec.validate();
  input.validate();
  if (input.n() < spec.folds)
    throw InvalidInput("dataset has " + std::to_string(input.n()) + " rows, fewer than " +
                       std::to_string(spec.folds) + " folds");
  const Dataset data =
      spec.normalization == NormalizationMode::global ? normalize_zscore(input).first : input;
  const FoldPlan plan = make_folds(data.n(), spec.folds, spec.fold_seed);

  std::vector<FoldData> folds;
  folds.reserve(spec.folds);
  for (std::size_t k = 0; k < spec.folds; ++k) folds.push_back(prepare_fold(data, plan, k, spec.normalization));

  const std::size_t L = spec.lambda_grid.size();
  std::vector<CvCell> cells(spec.folds * L);
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < cells.size(); idx = next++) {
      try {
        const std::size_t fold = idx / L, li = idx % L;
        TrainConfig config = spec.train;
        config.lambda = spec.lambda_grid[li];
        const TrainResult result = svrg_bb_train(folds[fold].train, config);
        cells[idx] = {fold, li, config.lambda, result.trace.records.back().objective,
                      evaluate(result.model, folds[fold].test)};
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(spec.workers, 1, cells.size());
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  CvReport report;
  report.spec = spec;
  report.fold_sizes = plan.fold_sizes();
  report.cells = std::move(cells);
  std::vector<double> mean_h, mean_s, mean_r;
  for (std::size_t li = 0; li < L; ++li) {
    std::vector<double> h, s, r;
    for (std::size_t k = 0; k < spec.folds; ++k) {
      const Metrics& m = report.cells[k * L + li].test;
      h.push_back(m.hamming);
      s.push_back(m.subset_acc);
      if (m.ranking) r.push_back(*m.ranking);
    }
    LambdaSummary ls{spec.lambda_grid[li], summarize(h), summarize(s), summarize(r)};
    mean_h.push_back(ls.hamming.mean);
    mean_s.push_back(ls.subset_acc.mean);
    mean_r.push_back(ls.ranking.count ? ls.ranking.mean : std::numeric_limits<double>::infinity());
    report.per_lambda.push_back(ls);
  }
  report.best_hamming = select_index(mean_h, false);
  report.best_subset_acc = select_index(mean_s, true);
  report.best_ranking = select_index(mean_r, false);
  return report;
}

void CvReport::write_csv(std::ostream& out, bool header) const {
  if (header) {
    for (const auto& [k, v] : spec.resolved_config()) out << "# " << k << '=' << v << '\n';
    out << "dataset,learner,lambda,fold,hamming,subset_acc,ranking,degenerate_count\n";
  }
  const std::string prefix = spec.dataset_name + ',' + std::string(to_string(spec.train.learner)) + ',';
  for (const CvCell& cell : cells) {
    out << prefix << format_double(cell.lambda) << ',' << cell.fold << ',' << format_double(cell.test.hamming)
        << ',' << format_double(cell.test.subset_acc) << ','
        << (cell.test.ranking ? format_double(*cell.test.ranking) : std::string()) << ','
        << cell.test.degenerate_count << '\n';
  }
  for (std::size_t li = 0; li < per_lambda.size(); ++li) {
    const LambdaSummary& ls = per_lambda[li];
    std::size_t degenerate = 0;
    for (const CvCell& cell : cells)
      if (cell.lambda_index == li) degenerate += cell.test.degenerate_count;
    const auto rank = [&](double v) { return ls.ranking.count ? format_double(v) : std::string(); };
    out << prefix << format_double(ls.lambda) << ",mean," << format_double(ls.hamming.mean) << ','
        << format_double(ls.subset_acc.mean) << ',' << rank(ls.ranking.mean) << ',' << degenerate << '\n';
    out << prefix << format_double(ls.lambda) << ",std," << format_double(ls.hamming.std) << ','
        << format_double(ls.subset_acc.std) << ',' << rank(ls.ranking.std) << ',' << degenerate << '\n';
  }
}

std::string CvReport::to_json() const {
  json cfg = json::object();
  for (const auto& [k, v] : spec.resolved_config()) cfg[k] = v;
  json cells_json = json::array();
  for (const CvCell& c : cells)
    cells_json.push_back({{"fold", c.fold},
                          {"lambda", c.lambda},
                          {"train_objective", c.train_objective},
                          {"test", metrics_to_json(c.test)}});
  json lambdas = json::array();
  for (const LambdaSummary& ls : per_lambda)
    lambdas.push_back({{"lambda", ls.lambda},
                       {"hamming", summary_json(ls.hamming)},
                       {"subset_acc", summary_json(ls.subset_acc)},
                       {"ranking", summary_json(ls.ranking)}});
  const auto pick = [&](std::size_t i, const Summary& s) {
    return json{{"lambda", per_lambda[i].lambda}, {"mean", s.mean}, {"std", s.std}};
  };
  json selected = {
      {"hamming", pick(best_hamming, per_lambda[best_hamming].hamming)},
      {"subset_acc", pick(best_subset_acc, per_lambda[best_subset_acc].subset_acc)},
      {"ranking", pick(best_ranking, per_lambda[best_ranking].ranking)},
  };
  json out = {{"config", cfg},     {"fold_sizes", fold_sizes}, {"cells", cells_json},
              {"per_lambda", lambdas}, {"selected", selected}};
  return out.dump(2);
}

}  // namespace mlc
