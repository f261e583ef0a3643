#include "mlc/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string_view>

#include "mlc/error.hpp"
#include "mlc/format.hpp"
#include "mlc/rng.hpp"

namespace mlc {
namespace {

constexpr std::string_view kDimsTag = "# mlc-dims ";

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

template <class T>
bool parse_number(std::string_view token, T& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if constexpr (std::is_floating_point_v<T>) {
    if (first != last && *first == '+') ++first;
  }
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

// Reads "labels=C features=D" from the dims header.
void parse_dims_header(std::string_view rest, std::optional<std::size_t>& c,
                       std::optional<std::size_t>& d) {
  for (auto tok : split_ws(rest)) {
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos) continue;
    std::size_t v = 0;
    if (!parse_number(tok.substr(eq + 1), v)) continue;
    if (tok.substr(0, eq) == "labels") c = v;
    if (tok.substr(0, eq) == "features") d = v;
  }
}

struct RawRow {
  std::vector<std::size_t> labels;
  std::vector<std::uint32_t> index;
  std::vector<double> value;
  std::size_t line = 0;
};

}  // namespace

void SparseMatrix::push_row(std::span<const std::uint32_t> index, std::span<const double> value) {
  if (index.size() != value.size()) throw InvalidInput("sparse row index/value size mismatch");
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (k > 0 && index[k] <= index[k - 1])
      throw InvalidInput("sparse row indices must be strictly increasing");
    if (index[k] >= cols_) throw InvalidInput("sparse column index out of range");
    if (!std::isfinite(value[k])) throw InvalidInput("non-finite feature value");
  }
  index_.insert(index_.end(), index.begin(), index.end());
  value_.insert(value_.end(), value.begin(), value.end());
  row_ptr_.push_back(index_.size());
}

void SparseMatrix::set_cols(std::size_t cols) {
  if (!index_.empty() && *std::max_element(index_.begin(), index_.end()) >= cols)
    throw InvalidInput("cannot shrink sparse matrix below its largest column index");
  cols_ = cols;
}

void LabelMatrix::push_row(LabelView labels) {
  if (rows_ == 0 && data_.empty() && cols_ == 0) cols_ = labels.size();
  if (labels.size() != cols_) throw DimensionError("label row has the wrong length");
  for (Label v : labels)
    if (v != 1 && v != -1) throw InvalidInput("label entries must be -1 or +1");
  data_.insert(data_.end(), labels.begin(), labels.end());
  ++rows_;
}

void Dataset::validate() const {
  if (n() == 0) throw InvalidInput("dataset has no samples");
  if (d() == 0) throw InvalidInput("dataset has no features");
  if (c() == 0) throw InvalidInput("dataset has no labels");
  if (features.rows() != labels.rows())
    throw DimensionError("feature and label row counts differ");
  for (std::size_t i = 0; i < n(); ++i)
    for (Label v : labels.row(i))
      if (v != 1 && v != -1) throw InvalidInput("label entries must be -1 or +1");
}

Dataset Dataset::select(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features = SparseMatrix(d());
  out.labels = LabelMatrix(0, c());
  for (std::size_t i : rows) {
    if (i >= n()) throw InvalidInput("row selection out of range");
    const SparseRow r = features.row(i);
    out.features.push_row(r.index, r.value);
    out.labels.push_row(labels.row(i));
  }
  out.label_names = label_names;
  out.feature_names = feature_names;
  out.provenance = provenance;
  return out;
}

Dataset Dataset::with_bias_column() const {
  Dataset out;
  out.features = SparseMatrix(d() + 1);
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  const auto bias_col = static_cast<std::uint32_t>(d());
  for (std::size_t i = 0; i < n(); ++i) {
    const SparseRow r = features.row(i);
    idx.assign(r.index.begin(), r.index.end());
    val.assign(r.value.begin(), r.value.end());
    idx.push_back(bias_col);
    val.push_back(1.0);
    out.features.push_row(idx, val);
  }
  out.labels = labels;
  out.label_names = label_names;
  out.feature_names = feature_names;
  if (!out.feature_names.empty()) out.feature_names.push_back("bias");
  out.provenance = provenance;
  return out;
}

Dataset parse_multilabel_svm(std::istream& in, const SvmLoadOptions& options,
                             const std::string& source) {
  std::optional<std::size_t> header_c, header_d;
  std::vector<RawRow> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t max_label = 0, max_index = 0;
  bool any_label = false, any_index = false;

  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    std::string_view view(line);
    if (line_no == 1 && view.starts_with(kDimsTag)) {
      parse_dims_header(view.substr(kDimsTag.size()), header_c, header_d);
      continue;
    }
    if (const auto hash = view.find('#'); hash != std::string_view::npos)
      view = view.substr(0, hash);
    if (trim(view).empty()) continue;

    RawRow row;
    row.line = line_no;
    auto tokens = split_ws(view);
    std::size_t t = 0;
    const bool starts_blank = view.front() == ' ' || view.front() == '\t';
    if (!starts_blank && tokens[0].find(':') == std::string_view::npos) {
      for (auto item : split(tokens[0], ',')) {
        std::size_t id = 0;
        if (!parse_number(item, id)) throw ParseError("bad label id '" + std::string(item) + "'", line_no);
        row.labels.push_back(id);
        max_label = std::max(max_label, id);
        any_label = true;
      }
      t = 1;
    }
    std::vector<std::pair<std::uint32_t, double>> pairs;
    for (; t < tokens.size(); ++t) {
      const auto colon = tokens[t].find(':');
      if (colon == std::string_view::npos)
        throw ParseError("expected idx:val, got '" + std::string(tokens[t]) + "'", line_no);
      std::uint32_t idx = 0;
      double val = 0.0;
      if (!parse_number(tokens[t].substr(0, colon), idx))
        throw ParseError("bad feature index in '" + std::string(tokens[t]) + "'", line_no);
      if (!parse_number(tokens[t].substr(colon + 1), val) || !std::isfinite(val))
        throw ParseError("bad feature value in '" + std::string(tokens[t]) + "'", line_no);
      pairs.emplace_back(idx, val);
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (k > 0 && pairs[k].first == pairs[k - 1].first)
        throw ParseError("duplicate feature index " + std::to_string(pairs[k].first), line_no);
      row.index.push_back(pairs[k].first);
      row.value.push_back(pairs[k].second);
      max_index = std::max<std::size_t>(max_index, pairs[k].first);
      any_index = true;
    }
    rows.push_back(std::move(row));
  }

  const std::optional<std::size_t> want_c = options.num_labels ? options.num_labels : header_c;
  const std::optional<std::size_t> want_d = options.num_features ? options.num_features : header_d;
  const std::size_t c = want_c ? *want_c : (any_label ? max_label + 1 : 0);
  const std::size_t d = want_d ? *want_d : (any_index ? max_index + 1 : 0);
  if (c == 0) throw InvalidInput(source + ": cannot infer the label count (no labels present)");
  if (d == 0) throw InvalidInput(source + ": cannot infer the feature count (no features present)");

  Dataset ds;
  ds.features = SparseMatrix(d);
  ds.labels = LabelMatrix(0, c);
  std::vector<Label> y(c);
  for (const RawRow& row : rows) {
    std::fill(y.begin(), y.end(), Label{-1});
    for (std::size_t id : row.labels) {
      if (id >= c)
        throw RangeError("label id " + std::to_string(id) + " >= label count " + std::to_string(c),
                         row.line);
      y[id] = 1;
    }
    if (!row.index.empty() && row.index.back() >= d)
      throw RangeError("feature index " + std::to_string(row.index.back()) +
                           " >= feature count " + std::to_string(d),
                       row.line);
    ds.features.push_row(row.index, row.value);
    ds.labels.push_row(y);
  }
  ds.provenance = {source, "multilabel-svm", "none"};
  ds.validate();
  return ds;
}

Dataset load_multilabel_svm(const std::string& path, const SvmLoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return parse_multilabel_svm(in, options, path);
}

void write_multilabel_svm(const Dataset& ds, std::ostream& out) {
  out << kDimsTag << "labels=" << ds.c() << " features=" << ds.d() << '\n';
  for (std::size_t i = 0; i < ds.n(); ++i) {
    bool first = true;
    const LabelView y = ds.labels.row(i);
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] != 1) continue;
      if (!first) out << ',';
      out << j;
      first = false;
    }
    const SparseRow r = ds.features.row(i);
    for (std::size_t k = 0; k < r.nnz(); ++k) out << ' ' << r.index[k] << ':' << format_double(r.value[k]);
    out << '\n';
  }
}

Dataset parse_dense_csv(std::istream& features, std::istream& labels, const CsvLoadOptions& options) {
  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  std::size_t d = 0;
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  std::vector<std::vector<std::uint32_t>> all_idx;
  std::vector<std::vector<double>> all_val;
  while (std::getline(features, line)) {
    ++line_no;
    strip_cr(line);
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (d == 0) d = cells.size();
    if (cells.size() != d)
      throw ParseError("ragged feature row: expected " + std::to_string(d) + " cells, got " +
                           std::to_string(cells.size()),
                       line_no);
    idx.clear();
    val.clear();
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v = 0.0;
      if (!parse_number(trim(cells[j]), v) || !std::isfinite(v))
        throw ParseError("non-numeric feature cell '" + std::string(cells[j]) + "'", line_no);
      if (v != 0.0) {
        idx.push_back(static_cast<std::uint32_t>(j));
        val.push_back(v);
      }
    }
    all_idx.push_back(idx);
    all_val.push_back(val);
  }
  ds.features = SparseMatrix(d);
  for (std::size_t i = 0; i < all_idx.size(); ++i) ds.features.push_row(all_idx[i], all_val[i]);

  line_no = 0;
  std::size_t c = 0;
  std::vector<Label> y;
  while (std::getline(labels, line)) {
    ++line_no;
    strip_cr(line);
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (c == 0) {
      c = cells.size();
      ds.labels = LabelMatrix(0, c);
    }
    if (cells.size() != c)
      throw ParseError("ragged label row: expected " + std::to_string(c) + " cells, got " +
                           std::to_string(cells.size()),
                       line_no);
    y.clear();
    for (auto cell : cells) {
      int v = 0;
      auto t = trim(cell);
      if (!t.empty() && t.front() == '+') t.remove_prefix(1);
      if (!parse_number(t, v)) throw ParseError("non-numeric label cell '" + std::string(cell) + "'", line_no);
      if (v == 0 && options.map_zero_one) v = -1;
      if (v != 1 && v != -1)
        throw ParseError("label cell must be -1 or +1 (or 0/1 with mapping): '" + std::string(cell) + "'",
                         line_no);
      y.push_back(static_cast<Label>(v));
    }
    ds.labels.push_row(y);
  }
  if (ds.features.rows() != ds.labels.rows())
    throw DimensionError("feature file has " + std::to_string(ds.features.rows()) +
                         " rows but label file has " + std::to_string(ds.labels.rows()));
  ds.provenance = {"<stream>", "dense-csv", "none"};
  ds.validate();
  return ds;
}

Dataset load_dense_csv(const std::string& features_path, const std::string& labels_path,
                       const CsvLoadOptions& options) {
  std::ifstream fx(features_path);
  if (!fx) throw InvalidInput("cannot open '" + features_path + "'");
  std::ifstream fy(labels_path);
  if (!fy) throw InvalidInput("cannot open '" + labels_path + "'");
  Dataset ds = parse_dense_csv(fx, fy, options);
  ds.provenance.source = features_path + ";" + labels_path;
  return ds;
}

ZScoreStats compute_zscore_stats(const Dataset& ds) {
  const std::size_t n = ds.n(), d = ds.d();
  if (n < 2) throw InvalidInput("z-score normalization needs at least two rows");
  ZScoreStats stats;
  stats.mean.assign(d, 0.0);
  stats.stddev.assign(d, 0.0);
  std::vector<std::size_t> nnz(d, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const SparseRow r = ds.features.row(i);
    for (std::size_t k = 0; k < r.nnz(); ++k) {
      stats.mean[r.index[k]] += r.value[k];
      ++nnz[r.index[k]];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (double& m : stats.mean) m *= inv_n;
  std::vector<double> sq(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const SparseRow r = ds.features.row(i);
    for (std::size_t k = 0; k < r.nnz(); ++k) {
      const double dev = r.value[k] - stats.mean[r.index[k]];
      sq[r.index[k]] += dev * dev;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double implicit = static_cast<double>(n - nnz[j]);
    sq[j] += implicit * stats.mean[j] * stats.mean[j];
    stats.stddev[j] = std::sqrt(sq[j] * inv_n);
  }
  return stats;
}

Dataset apply_zscore(const Dataset& ds, const ZScoreStats& stats) {
  const std::size_t d = ds.d();
  if (stats.mean.size() != d || stats.stddev.size() != d)
    throw DimensionError("normalization stats do not match the feature count");
  Dataset out;
  out.features = SparseMatrix(d);
  std::vector<double> dense(d);
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    std::fill(dense.begin(), dense.end(), 0.0);
    const SparseRow r = ds.features.row(i);
    for (std::size_t k = 0; k < r.nnz(); ++k) dense[r.index[k]] = r.value[k];
    idx.clear();
    val.clear();
    for (std::size_t j = 0; j < d; ++j) {
      if (stats.stddev[j] < stats.min_stddev) continue;
      const double z = (dense[j] - stats.mean[j]) / stats.stddev[j];
      if (z != 0.0) {
        idx.push_back(static_cast<std::uint32_t>(j));
        val.push_back(z);
      }
    }
    out.features.push_row(idx, val);
  }
  out.labels = ds.labels;
  out.label_names = ds.label_names;
  out.feature_names = ds.feature_names;
  out.provenance = ds.provenance;
  out.provenance.normalization = "zscore";
  return out;
}

std::pair<Dataset, ZScoreStats> normalize_zscore(const Dataset& ds) {
  ZScoreStats stats = compute_zscore_stats(ds);
  Dataset out = apply_zscore(ds, stats);
  return {std::move(out), std::move(stats)};
}

std::vector<std::size_t> FoldPlan::train_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] != fold) rows.push_back(i);
  return rows;
}

std::vector<std::size_t> FoldPlan::test_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] == fold) rows.push_back(i);
  return rows;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t f : assignment) ++sizes[f];
  return sizes;
}

FoldPlan make_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InvalidInput("fold count must be at least 2");
  if (k > n) throw InvalidInput("fold count exceeds the number of samples");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignment.assign(n, 0);
  for (std::size_t p = 0; p < n; ++p) plan.assignment[perm[p]] = p % k;
  return plan;
}

}  // namespace mlc
