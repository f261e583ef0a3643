// mlc: train / eval / cv / bounds / verify-lemmas

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlc/bounds.hpp"
#include "mlc/error.hpp"
#include "mlc/format.hpp"
#include "mlc/harness.hpp"
#include "mlc/relations.hpp"
#include "mlc/simd/kernels.hpp"

namespace {

using namespace mlc;
using json = nlohmann::ordered_json;

constexpr int kExitError = 1;
constexpr int kExitViolation = 2;

struct DataArgs {
  std::string path;
  std::string format = "svm";
  std::string labels;
  bool map01 = false;
  std::size_t num_labels = 0;
  std::size_t num_features = 0;

  void attach(CLI::App* cmd, bool required = true) {
    auto* o = cmd->add_option("--data", path, "dataset file (features file for csv)");
    if (required) o->required();
    cmd->add_option("--format", format, "svm | csv")->capture_default_str();
    cmd->add_option("--labels", labels, "label csv (csv format only)");
    cmd->add_flag("--map-01", map01, "csv labels: map 0/1 to -1/+1");
    cmd->add_option("--num-labels", num_labels, "fix c instead of inferring it");
    cmd->add_option("--num-features", num_features, "fix d instead of inferring it");
  }

  DataSource source() const {
    DataSource s;
    s.path = path;
    s.format = parse_data_format(format);
    s.labels_path = labels;
    s.map_zero_one = map01;
    if (num_labels) s.num_labels = num_labels;
    if (num_features) s.num_features = num_features;
    return s;
  }
};

struct TrainArgs {
  std::string learner = "A_h";
  std::string base_loss = "hinge";
  double eta0 = 0.05;
  std::size_t inner = 0;
  std::size_t epochs = 30;
  std::uint64_t seed = 0;
  bool bias = false;
  double early_stop = 0.0;
  std::string bb_scale = "features";

  void attach(CLI::App* cmd) {
    cmd->add_option("--learner", learner, "A_h | A_s | A_r")->capture_default_str();
    cmd->add_option("--base-loss", base_loss, "hinge | logistic_ln | logistic_log2")->capture_default_str();
    cmd->add_option("--eta0", eta0, "initial step size")->capture_default_str();
    cmd->add_option("--inner", inner, "inner loop length m (0 = 2n)")->capture_default_str();
    cmd->add_option("--epochs", epochs, "outer epochs")->capture_default_str();
    cmd->add_option("--seed", seed, "sampling seed")->capture_default_str();
    cmd->add_flag("--bias", bias, "append a constant feature");
    cmd->add_option("--bb-scale", bb_scale, "step divisor: features (d) | inner_length (m)")->capture_default_str();
    cmd->add_option("--early-stop", early_stop, "stop when ||G||_F falls below this (0 = off)");
  }

  TrainConfig config() const {
    TrainConfig c;
    c.learner = parse_learner(learner);
    c.base_loss = parse_base_loss(base_loss);
    c.eta0 = eta0;
    c.inner_length = inner;
    c.outer_epochs = epochs;
    c.seed = seed;
    c.bias = bias;
    c.bb_scale = parse_bb_scale(bb_scale);
    if (early_stop > 0.0) {
      c.early_stop = true;
      c.early_stop_tol = early_stop;
    }
    return c;
  }
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    auto out = open_out(path);
    out << text;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json stats_json(const ZScoreStats& s) {
  return {{"mean", s.mean}, {"stddev", s.stddev}, {"min_stddev", s.min_stddev}};
}

ZScoreStats stats_from_json(const std::string& text) {
  const json j = json::parse(text);
  ZScoreStats s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.stddev = j.at("stddev").get<std::vector<double>>();
  s.min_stddev = j.value("min_stddev", s.min_stddev);
  return s;
}

// ---- train

struct TrainCmd {
  DataArgs data;
  TrainArgs train;
  DataArgs test;
  double lambda = 0.01;
  bool normalize = false;
  std::string model_out, trace_out, stats_out, json_out;

  void attach(CLI::App* cmd) {
    data.attach(cmd);
    train.attach(cmd);
    cmd->add_option("--lambda", lambda, "regularization weight")->capture_default_str();
    cmd->add_flag("--normalize", normalize, "z-score features with stats fit on the training data");
    cmd->add_option("--test", test.path, "held-out dataset (same format)");
    cmd->add_option("--model-out", model_out, "write the trained model");
    cmd->add_option("--trace-out", trace_out, "write the per-epoch trace as csv");
    cmd->add_option("--stats-out", stats_out, "write z-score stats as json");
    cmd->add_option("--json", json_out, "metrics report path (default stdout)");
  }

  int run() {
    ExperimentSpec spec;
    spec.data = data.source();
    spec.train = train.config();
    spec.normalization = normalize ? NormalizationMode::per_fold : NormalizationMode::none;
    const Dataset ds = load_dataset(spec.data);
    std::optional<Dataset> held;
    if (!test.path.empty()) {
      DataArgs t = data;
      t.path = test.path;
      DataSource src = t.source();
      src.num_labels = ds.c();
      held = load_dataset(src);
    }
    const TrainRun run = run_train(spec, ds, lambda, held ? &*held : nullptr);
    if (!model_out.empty()) save_model(run.result.model, model_out);
    if (!trace_out.empty()) {
      auto out = open_out(trace_out);
      run.result.trace.write_csv(out);
    }
    if (!stats_out.empty()) {
      if (!run.stats) throw InvalidInput("--stats-out needs --normalize");
      emit(stats_out, stats_json(*run.stats).dump(2) + "\n");
    }
    json report = {{"config", json::object()}};
    for (const auto& [k, v] : spec.resolved_config())
      if (k != "lambda_grid" && k != "folds" && k != "fold_seed") report["config"][k] = v;
    report["config"]["lambda"] = format_double(lambda);
    report["effective_samples"] = run.result.effective_samples;
    report["final_objective"] = run.result.trace.records.back().objective;
    report["weight_norm"] = run.result.model.frobenius_norm();
    report["train"] = json::parse(metrics_json(run.train_metrics));
    if (run.test_metrics) report["test"] = json::parse(metrics_json(*run.test_metrics));
    emit(json_out, report.dump(2) + "\n");
    return 0;
  }
};

// ---- eval

struct EvalCmd {
  DataArgs data;
  std::string model_path, stats_path, json_out;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model_path, "model file")->required();
    data.attach(cmd);
    cmd->add_option("--stats", stats_path, "z-score stats json from train --stats-out");
    cmd->add_option("--json", json_out, "output path (default stdout)");
  }

  int run() {
    const LinearModel model = load_model(model_path);
    DataSource src = data.source();
    if (!src.num_labels) src.num_labels = model.c();
    Dataset ds = load_dataset(src);
    if (!stats_path.empty()) ds = apply_zscore(ds, stats_from_json(read_file(stats_path)));
    emit(json_out, metrics_json(evaluate(model, ds)) + "\n");
    return 0;
  }
};

// ---- cv

struct CvCmd {
  DataArgs data;
  TrainArgs train;
  std::string learners = "A_h";
  std::string lambdas;
  std::string name;
  std::size_t folds = 3;
  std::uint64_t fold_seed = 0;
  std::string normalization = "per-fold";
  std::size_t workers = 0;
  std::string csv_out, json_out;

  void attach(CLI::App* cmd) {
    data.attach(cmd);
    train.attach(cmd);
    cmd->add_option("--learners", learners, "comma-separated learners")->capture_default_str();
    cmd->add_option("--lambdas", lambdas, "comma-separated grid (default 1e-4,...,10)");
    cmd->add_option("--name", name, "dataset name in reports (default: file stem)");
    cmd->add_option("--folds", folds, "k")->capture_default_str();
    cmd->add_option("--fold-seed", fold_seed, "fold shuffle seed")->capture_default_str();
    cmd->add_option("--normalization", normalization, "none | per-fold | global")->capture_default_str();
    cmd->add_option("--workers", workers, "threads (default MLC_WORKERS or 1)");
    cmd->add_option("--csv", csv_out, "csv report path (default stdout)");
    cmd->add_option("--json", json_out, "json report path");
  }

  int run() {
    ExperimentSpec spec;
    spec.data = data.source();
    spec.dataset_name = name.empty() ? std::filesystem::path(data.path).stem().string() : name;
    spec.folds = folds;
    spec.fold_seed = fold_seed;
    spec.normalization = parse_normalization(normalization);
    spec.workers = workers ? workers : workers_from_env();
    if (!lambdas.empty()) {
      spec.lambda_grid.clear();
      for (const auto& l : split(lambdas, ',')) spec.lambda_grid.push_back(parse_double(l));
    }
    const Dataset ds = load_dataset(spec.data);
    std::ostringstream csv;
    json reports = json::array();
    bool first = true;
    for (const auto& l : split(learners, ',')) {
      spec.train = train.config();
      spec.train.learner = parse_learner(l);
      const CvReport report = run_cv(spec, ds);
      report.write_csv(csv, first);
      first = false;
      reports.push_back(json::parse(report.to_json()));
    }
    emit(csv_out, csv.str());
    if (!json_out.empty()) emit(json_out, reports.dump(2) + "\n");
    return 0;
  }
};

// ---- bounds

struct BoundsCmd {
  std::vector<std::string> names;
  std::string base_loss = "hinge";
  double B = 1.0;
  std::size_t c = 10;
  std::size_t n = 1000;
  double Lambda = 1.0, r = 1.0, delta = 0.05, risk = 0.0;
  std::string sweep;
  std::string output = "csv";
  std::string out_path;

  void attach(CLI::App* cmd) {
    cmd->add_option("--name", names, "named bound (repeatable; default all)");
    cmd->add_option("--base-loss", base_loss, "sets rho")->capture_default_str();
    cmd->add_option("--B", B, "bound on the base loss")->capture_default_str();
    cmd->add_option("--c", c, "labels")->capture_default_str();
    cmd->add_option("--n", n, "samples")->capture_default_str();
    cmd->add_option("--Lambda", Lambda, "weight-norm constraint")->capture_default_str();
    cmd->add_option("--r", r, "feature-norm bound")->capture_default_str();
    cmd->add_option("--delta", delta, "failure probability")->capture_default_str();
    cmd->add_option("--risk", risk, "empirical surrogate risk")->capture_default_str();
    cmd->add_option("--sweep", sweep, "c=LO..HI[:STEP] or n=LO..HI[:STEP]");
    cmd->add_option("--output", output, "csv | json")->capture_default_str();
    cmd->add_option("--out", out_path, "output path (default stdout)");
  }

  int run() {
    std::vector<NamedBound> bounds;
    if (names.empty()) {
      const auto all = all_named_bounds();
      bounds.assign(all.begin(), all.end());
    } else {
      for (const auto& nm : names) bounds.push_back(parse_named_bound(nm));
    }
    NamedBoundInputs base{parse_base_loss(base_loss).rho(), B, c, n, Lambda, r, delta, risk};
    if (!std::isfinite(B)) base.B = std::numeric_limits<double>::infinity();

    char var = 0;
    std::size_t lo = 0, hi = 0, step = 1;
    if (!sweep.empty()) {
      const auto eq = sweep.find('='), dots = sweep.find("..");
      if (eq != 1 || dots == std::string::npos || (sweep[0] != 'c' && sweep[0] != 'n'))
        throw InvalidInput("bad --sweep '" + sweep + "'");
      var = sweep[0];
      const auto colon = sweep.find(':', dots);
      lo = std::stoul(sweep.substr(2, dots - 2));
      hi = std::stoul(sweep.substr(dots + 2, colon == std::string::npos ? std::string::npos : colon - dots - 2));
      if (colon != std::string::npos) step = std::stoul(sweep.substr(colon + 1));
      if (lo < 1 || hi < lo || step < 1) throw InvalidInput("bad --sweep range");
    }

    json rows = json::array();
    std::ostringstream csv;
    csv << "name,c,n,total,risk,complexity,confidence\n";
    auto one = [&](const NamedBoundInputs& in) {
      for (NamedBound b : bounds) {
        const BoundReport rep = named_bound(b, in);
        csv << rep.name << ',' << in.c << ',' << in.n << ',' << format_double(rep.total) << ','
            << format_double(rep.terms.risk) << ',' << format_double(rep.terms.complexity) << ','
            << format_double(rep.terms.confidence) << '\n';
        rows.push_back({{"name", rep.name},
                        {"c", in.c},
                        {"n", in.n},
                        {"total", rep.total},
                        {"risk", rep.terms.risk},
                        {"complexity", rep.terms.complexity},
                        {"confidence", rep.terms.confidence}});
      }
    };
    if (var == 0) {
      one(base);
    } else {
      for (std::size_t v = lo; v <= hi; v += step) {
        NamedBoundInputs in = base;
        (var == 'c' ? in.c : in.n) = v;
        one(in);
      }
    }
    if (output == "csv") {
      emit(out_path, csv.str());
    } else if (output == "json") {
      json report = {{"config",
                      {{"base_loss", base_loss},
                       {"rho", base.rho},
                       {"B", std::isfinite(base.B) ? json(base.B) : json("inf")},
                       {"Lambda", Lambda},
                       {"r", r},
                       {"delta", delta},
                       {"risk", risk},
                       {"sweep", sweep}}},
                     {"rows", rows}};
      emit(out_path, report.dump(2) + "\n");
    } else {
      throw InvalidInput("--output must be csv or json");
    }
    return 0;
  }
};

// ---- verify-lemmas

struct VerifyCmd {
  std::size_t cases = 100000;
  std::uint64_t seed = 0;
  std::size_t c_min = 1, c_max = 12;
  std::string scores = "mixed";
  std::string base_loss = "hinge";
  bool allow_non_dominating = false;
  std::size_t workers = 0;
  std::size_t keep = 16;
  std::string json_out, repro;

  void attach(CLI::App* cmd) {
    cmd->add_option("--cases", cases, "random cases")->capture_default_str();
    cmd->add_option("--seed", seed, "campaign seed")->capture_default_str();
    cmd->add_option("--c-min", c_min, "smallest label count")->capture_default_str();
    cmd->add_option("--c-max", c_max, "largest label count")->capture_default_str();
    cmd->add_option("--scores", scores, "normal | mixed")->capture_default_str();
    cmd->add_option("--base-loss", base_loss, "hinge | logistic_log2 | logistic_ln")->capture_default_str();
    cmd->add_flag("--allow-non-dominating", allow_non_dominating, "run even if the base loss does not bound 0/1");
    cmd->add_option("--workers", workers, "threads (default MLC_WORKERS or 1)");
    cmd->add_option("--keep-failures", keep, "failing cases kept in the report")->capture_default_str();
    cmd->add_option("--json", json_out, "summary path (default stdout)");
    cmd->add_option("--repro", repro, "re-check one case from a json file instead of a campaign");
  }

  int run() {
    if (!repro.empty()) return run_repro();
    CampaignConfig cfg;
    cfg.cases = cases;
    cfg.seed = seed;
    cfg.c_min = c_min;
    cfg.c_max = c_max;
    cfg.scores = parse_score_distribution(scores);
    cfg.loss = parse_base_loss(base_loss);
    cfg.allow_non_dominating = allow_non_dominating;
    cfg.workers = workers ? workers : workers_from_env();
    cfg.max_failures_kept = keep;
    const CampaignSummary summary = fuzz_campaign(cfg);
    emit(json_out, summary.to_json() + "\n");
    std::cerr << summary.cases << " cases, " << summary.violations << " violations, "
              << summary.ranking_degenerate << " ranking-degenerate\n";
    return summary.violations == 0 ? 0 : kExitViolation;
  }

  int run_repro() {
    const RelationCase rc = relation_case_from_json(read_file(repro));
    const CheckOptions opt{allow_non_dominating};
    std::vector<RelationVerdict> all = check_hamming_subset(rc, opt);
    if (auto hr = check_hamming_ranking(rc, opt)) all.insert(all.end(), hr->begin(), hr->end());
    if (auto sr = check_subset_ranking(rc, opt)) all.insert(all.end(), sr->begin(), sr->end());
    json out = json::array();
    bool ok = true;
    for (const auto& v : all) {
      out.push_back({{"id", v.id}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"slack", v.slack}, {"holds", v.holds}});
      ok = ok && v.holds;
    }
    emit(json_out, json{{"ranking_degenerate", rc.ranking_degenerate()}, {"verdicts", out}}.dump(2) + "\n");
    return ok ? 0 : kExitViolation;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-label linear learners, generalization bounds and loss-relation checks"};
  app.require_subcommand(1);
  std::string simd_backend;
  app.add_option("--simd", simd_backend, "scalar | avx2 (default: best available, or MLC_SIMD)");

  TrainCmd train;
  EvalCmd eval;
  CvCmd cv;
  BoundsCmd bounds;
  VerifyCmd verify;
  train.attach(app.add_subcommand("train", "train one model"));
  eval.attach(app.add_subcommand("eval", "evaluate a saved model"));
  cv.attach(app.add_subcommand("cv", "k-fold cross-validation over a lambda grid"));
  bounds.attach(app.add_subcommand("bounds", "evaluate named generalization bounds"));
  verify.attach(app.add_subcommand("verify-lemmas", "random campaign over the loss inequalities"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (!simd_backend.empty()) {
      if (simd_backend == "scalar") simd::set_active_backend(simd::Backend::scalar);
      else if (simd_backend == "avx2") simd::set_active_backend(simd::Backend::avx2);
      else throw InvalidInput("unknown --simd backend '" + simd_backend + "'");
    }
    if (app.got_subcommand("train")) return train.run();
    if (app.got_subcommand("eval")) return eval.run();
    if (app.got_subcommand("cv")) return cv.run();
    if (app.got_subcommand("bounds")) return bounds.run();
    return verify.run();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}
