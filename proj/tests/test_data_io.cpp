#include <doctest.h>

#include <set>
#include <sstream>

#include "mlc/data_io.hpp"
#include "mlc/error.hpp"

using namespace mlc;

namespace {

const std::string kData = MLC_TEST_DATA;

Dataset parse(const std::string& text, SvmLoadOptions opt = {}) {
  std::istringstream in(text);
  return parse_multilabel_svm(in, opt);
}

std::vector<Label> labels_of(const Dataset& ds, std::size_t i) {
  auto r = ds.labels.row(i);
  return {r.begin(), r.end()};
}

}  // namespace

TEST_CASE("svm line with labels and features") {
  const Dataset ds = parse("0,2 1:0.5 4:1.0\n", {.num_labels = 3, .num_features = {}});
  CHECK(ds.n() == 1);
  CHECK(ds.c() == 3);
  CHECK(labels_of(ds, 0) == std::vector<Label>{1, -1, 1});
  CHECK(ds.features.row(0).nnz() == 2);
  CHECK(ds.features.row(0).index[1] == 4);
  CHECK(ds.features.row(0).value[0] == 0.5);
}

TEST_CASE("svm line without labels") {
  const Dataset ds = parse(" 1:1.0\n", {.num_labels = 2, .num_features = {}});
  CHECK(labels_of(ds, 0) == std::vector<Label>{-1, -1});
}

TEST_CASE("svm parse errors carry line numbers") {
  try {
    parse("0 1:1\n1 2:1 2:3\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse("0 1:x\n"), ParseError);
  CHECK_THROWS_AS(parse("0 1\n"), ParseError);
  CHECK_THROWS_AS(parse("a 1:1\n"), ParseError);
  CHECK_THROWS_AS(parse("0 1:inf\n"), ParseError);
  try {
    parse("0 1:1\n3 1:1\n", {.num_labels = 3, .num_features = {}});
    FAIL("expected a range error");
  } catch (const RangeError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("svm comments, crlf and unsorted pairs") {
  const Dataset ds = load_multilabel_svm(kData + "/crlf.svm");
  CHECK(ds.n() == 2);
  CHECK(ds.c() == 3);
  CHECK(ds.d() == 3);
  CHECK(ds.features.row(0).index[0] == 0);
  CHECK(ds.features.row(0).value[0] == 1.0);
  CHECK(ds.features.row(0).value[1] == 0.25);
  const Dataset small = load_multilabel_svm(kData + "/small.svm");
  CHECK(small.n() == 5);
  CHECK(small.c() == 3);
  CHECK(small.d() == 5);
  CHECK(labels_of(small, 1) == std::vector<Label>{-1, -1, -1});
  CHECK_THROWS_AS(load_multilabel_svm(kData + "/missing.svm"), Error);
}

TEST_CASE("svm round trip is a fixpoint") {
  const Dataset a = load_multilabel_svm(kData + "/small.svm");
  std::ostringstream first;
  write_multilabel_svm(a, first);
  const Dataset b = parse(first.str());
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);
  std::ostringstream second;
  write_multilabel_svm(b, second);
  CHECK(first.str() == second.str());

  // trailing empty feature column and all-negative label column survive
  Dataset wide = parse("0 0:1\n", {.num_labels = 4, .num_features = 9});
  std::ostringstream w;
  write_multilabel_svm(wide, w);
  const Dataset back = parse(w.str());
  CHECK(back.d() == 9);
  CHECK(back.c() == 4);
}

TEST_CASE("dense csv") {
  const Dataset ds = load_dense_csv(kData + "/features.csv", kData + "/labels_pm.csv");
  CHECK(ds.n() == 2);
  CHECK(ds.d() == 2);
  CHECK(ds.c() == 1);
  CHECK(labels_of(ds, 1) == std::vector<Label>{-1});
  CHECK_THROWS_AS(load_dense_csv(kData + "/features.csv", kData + "/labels01.csv"), ParseError);
  const Dataset mapped = load_dense_csv(kData + "/features.csv", kData + "/labels01.csv", {.map_zero_one = true});
  CHECK(labels_of(mapped, 0) == std::vector<Label>{1});
  CHECK(labels_of(mapped, 1) == std::vector<Label>{-1});

  std::istringstream ragged("1,2\n3\n"), lab("1\n1\n");
  CHECK_THROWS_AS(parse_dense_csv(ragged, lab), ParseError);
  std::istringstream text("1,x\n3,4\n"), lab2("1\n1\n");
  CHECK_THROWS_AS(parse_dense_csv(text, lab2), ParseError);
  std::istringstream f3("1,2\n3,4\n"), short_labels("1\n");
  CHECK_THROWS_AS(parse_dense_csv(f3, short_labels), Error);
}

TEST_CASE("z-score normalization") {
  const Dataset ds = parse("0 0:0 1:5\n0 0:2 1:5\n", {.num_labels = 1, .num_features = 2});
  auto [norm, stats] = normalize_zscore(ds);
  CHECK(stats.mean[0] == 1.0);
  CHECK(stats.stddev[0] == 1.0);
  // feature 0 becomes [-1, +1], constant feature 1 becomes 0 (dropped from the sparse rows)
  CHECK(norm.features.row(0).nnz() == 1);
  CHECK(norm.features.row(0).index[0] == 0);
  CHECK(norm.features.row(0).value[0] == -1.0);
  CHECK(norm.features.row(1).value[0] == 1.0);
  CHECK(apply_zscore(ds, stats).features == norm.features);
  const Dataset one = parse("0 0:1\n", {.num_labels = 1, .num_features = 1});
  CHECK_THROWS_AS(compute_zscore_stats(one), InvalidInput);
}

TEST_CASE("folds") {
  CHECK(make_folds(6, 3, 1).fold_sizes() == std::vector<std::size_t>{2, 2, 2});
  auto sizes = make_folds(7, 3, 1).fold_sizes();
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::size_t>{2, 2, 3});
  CHECK(make_folds(50, 5, 9).assignment == make_folds(50, 5, 9).assignment);
  CHECK(make_folds(50, 5, 9).assignment != make_folds(50, 5, 10).assignment);
  CHECK_THROWS_AS(make_folds(2, 3, 0), InvalidInput);
  CHECK_THROWS_AS(make_folds(5, 1, 0), InvalidInput);

  const FoldPlan plan = make_folds(10, 3, 4);
  for (std::size_t k = 0; k < 3; ++k) {
    auto tr = plan.train_rows(k), te = plan.test_rows(k);
    std::set<std::size_t> all(tr.begin(), tr.end());
    for (auto i : te) CHECK(all.insert(i).second);
    CHECK(all.size() == 10);
  }
}

TEST_CASE("select and bias column") {
  const Dataset ds = load_multilabel_svm(kData + "/small.svm");
  const std::size_t rows[] = {3, 0};
  const Dataset sub = ds.select(rows);
  CHECK(sub.n() == 2);
  CHECK(labels_of(sub, 1) == labels_of(ds, 0));
  const Dataset b = ds.with_bias_column();
  CHECK(b.d() == ds.d() + 1);
  CHECK(b.features.row(1).index.back() == ds.d());
  CHECK(b.features.row(1).value.back() == 1.0);
}
