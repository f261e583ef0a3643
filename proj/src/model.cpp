#include "mlc/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "mlc/error.hpp"
#include "mlc/format.hpp"
#include "mlc/simd/kernels.hpp"

namespace mlc {

LinearModel::LinearModel(std::size_t d, std::size_t c, bool bias) : weights_(d, c), bias_(bias) {
  if (bias && d == 0) throw InvalidInput("a biased model needs at least the bias row");
}

LinearModel::LinearModel(Matrix weights, bool bias) : weights_(std::move(weights)), bias_(bias) {
  for (double w : weights_.flat())
    if (!std::isfinite(w)) throw InvalidInput("model weights must be finite");
  if (bias && weights_.rows() == 0) throw InvalidInput("a biased model needs at least the bias row");
}

double LinearModel::frobenius_norm() const { return std::sqrt(simd::squared_norm(weights_.flat())); }

void LinearModel::score(SparseRow x, std::span<double> out) const {
  if (out.size() != c()) throw DimensionError("score output has the wrong length");
  if (x.nnz() > 0 && x.index.back() >= input_dim())
    throw DimensionError("feature index " + std::to_string(x.index.back()) +
                         " exceeds model input dimension " + std::to_string(input_dim()));
  std::fill(out.begin(), out.end(), 0.0);
  const auto& axpy = simd::active().axpy;
  for (std::size_t k = 0; k < x.nnz(); ++k)
    axpy(x.value[k], weights_.row(x.index[k]).data(), out.data(), c());
  if (bias_) axpy(1.0, weights_.row(d() - 1).data(), out.data(), c());
}

std::vector<double> LinearModel::score(SparseRow x) const {
  std::vector<double> out(c());
  score(x, out);
  return out;
}

std::vector<double> LinearModel::score_dense(std::span<const double> x) const {
  if (x.size() != input_dim()) throw DimensionError("dense input has the wrong dimension");
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] == 0.0) continue;
    idx.push_back(static_cast<std::uint32_t>(j));
    val.push_back(x[j]);
  }
  return score(SparseRow{idx, val});
}

void classify_sign(ScoreView f, std::span<Label> out) {
  if (out.size() != f.size()) throw DimensionError("prediction buffer has the wrong length");
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (!std::isfinite(f[j])) throw InvalidInput("non-finite score");
    out[j] = f[j] > 0.0 ? Label{1} : Label{-1};
  }
}

LabelVector classify_sign(ScoreView f) {
  std::vector<Label> out(f.size());
  classify_sign(f, out);
  return LabelVector(std::move(out));
}

OracleThreshold oracle_threshold(ScoreView f, LabelView y) {
  if (f.size() != y.size()) throw DimensionError("scores and labels differ in length");
  const std::size_t c = y.size();
  if (c == 0) throw InvalidInput("empty label vector");
  OracleThreshold result;
  auto& order = result.split.order;
  order.resize(c);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });

  // errors(k) = relevant labels outside the top k + irrelevant labels inside it
  std::size_t errors = count_relevant(y);
  std::size_t best_errors = errors, best_k = 0;
  for (std::size_t k = 1; k <= c; ++k) {
    if (y[order[k - 1]] == 1)
      --errors;
    else
      ++errors;
    if (errors < best_errors) {
      best_errors = errors;
      best_k = k;
    }
  }
  std::vector<Label> pred(c, Label{-1});
  for (std::size_t r = 0; r < best_k; ++r) pred[order[r]] = 1;
  result.split.k = best_k;
  result.prediction = LabelVector(std::move(pred));
  result.hamming = static_cast<double>(best_errors) / static_cast<double>(c);
  return result;
}

void save_model(const LinearModel& model, std::ostream& out) {
  out << "mlc-linear-model 1\n";
  out << "dims " << model.d() << ' ' << model.c() << '\n';
  out << "bias " << (model.bias() ? 1 : 0) << '\n';
  for (std::size_t i = 0; i < model.d(); ++i) {
    const auto row = model.weights().row(i);
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << format_double(row[j]);
    out << '\n';
  }
}

LinearModel load_model(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "mlc-linear-model" || version != 1)
    throw InvalidInput("not an mlc-linear-model v1 file");
  std::string key;
  std::size_t d = 0, c = 0;
  int bias = 0;
  if (!(in >> key >> d >> c) || key != "dims") throw InvalidInput("model file: missing dims");
  if (!(in >> key >> bias) || key != "bias" || (bias != 0 && bias != 1))
    throw InvalidInput("model file: missing bias flag");
  Matrix w(d, c);
  std::string token;
  for (double& v : w.flat()) {
    if (!(in >> token)) throw InvalidInput("model file: truncated weights");
    v = parse_double(token);
  }
  if (in >> token) throw InvalidInput("model file: trailing data after weights");
  return LinearModel(std::move(w), bias == 1);
}

void save_model(const LinearModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  save_model(model, out);
}

LinearModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return load_model(in);
}

}  // namespace mlc
