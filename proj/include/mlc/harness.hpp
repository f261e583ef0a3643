#pragma once

// Experiment driver: single training runs, k-fold cross-validation over a
// lambda grid, evaluation of saved models, and report emission.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mlc/data_io.hpp"
#include "mlc/model.hpp"
#include "mlc/optimizer.hpp"

namespace mlc {

enum class DataFormat { svm, csv };
DataFormat parse_data_format(std::string_view name);
std::string_view to_string(DataFormat f) noexcept;

struct DataSource {
  std::string path;  // features file for csv
  DataFormat format = DataFormat::svm;
  std::string labels_path;  // csv only
  bool map_zero_one = false;
  std::optional<std::size_t> num_labels;
  std::optional<std::size_t> num_features;
};

Dataset load_dataset(const DataSource& source);

enum class NormalizationMode { none, per_fold, global };
NormalizationMode parse_normalization(std::string_view name);
std::string_view to_string(NormalizationMode m) noexcept;

std::vector<double> default_lambda_grid();

struct ExperimentSpec {
  DataSource data;
  std::string dataset_name;
  TrainConfig train;  // lambda is overwritten per grid point
  std::vector<double> lambda_grid = default_lambda_grid();
  std::size_t folds = 3;
  std::uint64_t fold_seed = 0;
  NormalizationMode normalization = NormalizationMode::per_fold;
  std::size_t workers = 1;  // not part of the embedded config; never changes output

  void validate() const;
  /// Every resolved setting as (key, value) text, in a fixed order.
  std::vector<std::pair<std::string, std::string>> resolved_config() const;
};

struct Metrics {
  std::size_t n = 0;
  double hamming = 0.0;
  double subset_acc = 0.0;
  std::optional<double> ranking;  // mean over non-degenerate samples
  std::size_t degenerate_count = 0;
  double oracle_hamming = 0.0;  // with the per-sample t* threshold; diagnostic only

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// Throws DimensionError unless data.c() == model.c() and data.d() <= model.input_dim().
Metrics evaluate(const LinearModel& model, const Dataset& data);
std::string metrics_json(const Metrics& m);

struct TrainRun {
  TrainResult result;
  Metrics train_metrics;
  std::optional<Metrics> test_metrics;
  std::optional<ZScoreStats> stats;  // set when the inputs were normalized
};

/// Trains on `train` with lambda; with normalization other than none the
/// z-score stats are fit on `train` and applied to `test`.
TrainRun run_train(const ExperimentSpec& spec, const Dataset& train, double lambda,
                   const Dataset* test = nullptr);

struct CvCell {
  std::size_t fold = 0;
  std::size_t lambda_index = 0;
  double lambda = 0.0;
  double train_objective = 0.0;
  Metrics test;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t count = 0;
};

Summary summarize(const std::vector<double>& values);

struct LambdaSummary {
  double lambda = 0.0;
  Summary hamming;
  Summary subset_acc;
  Summary ranking;  // over folds that had a non-degenerate sample
};

struct CvReport {
  ExperimentSpec spec;
  std::vector<std::size_t> fold_sizes;
  std::vector<CvCell> cells;  // sorted by fold, then lambda
  std::vector<LambdaSummary> per_lambda;
  // Grid index selected per measure: lowest mean Hamming / ranking loss,
  // highest mean subset accuracy; ties go to the smaller lambda.
  std::size_t best_hamming = 0;
  std::size_t best_subset_acc = 0;
  std::size_t best_ranking = 0;

  /// Header comments with the resolved config, then
  /// dataset,learner,lambda,fold,hamming,subset_acc,ranking,degenerate_count
  /// with one row per cell followed by mean and std rows per lambda.
  void write_csv(std::ostream& out, bool header = true) const;
  std::string to_json() const;
};

CvReport run_cv(const ExperimentSpec& spec);
CvReport run_cv(const ExperimentSpec& spec, const Dataset& data);

/// Selection rule used by CvReport: index of the best value; ties to the lowest index.
std::size_t select_index(const std::vector<double>& values, bool maximize);

/// Worker count from MLC_WORKERS, defaulting to 1.
std::size_t workers_from_env();

}  // namespace mlc
