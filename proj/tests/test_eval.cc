#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "eduml/cross_validation.h"
#include "eduml/error.h"
#include "eduml/metrics.h"
#include "oracles/auc_pairs.h"
#include "test_support.h"

using namespace eduml;
using eduml::testing::make_dataset;
using eduml::testing::random_dataset;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an eduml::Error");
  return ErrorCode::kIo;
}

std::vector<uint8_t> labels_of(size_t n_fail, size_t n_pass) {
  std::vector<uint8_t> y(n_fail, kFail);
  y.insert(y.end(), n_pass, kPass);
  return y;
}

LabeledDataset xor_data(size_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<uint8_t> labels;
  for (size_t i = 0; i < n; ++i) {
    const double a = rng.uniform01(), b = rng.uniform01();
    rows.push_back({a, b});
    labels.push_back(((a > 0.5) != (b > 0.5)) ? kPass : kFail);
  }
  return make_dataset(rows, labels);
}

}  // namespace

TEST_CASE("stratified folds partition each class evenly") {
  Rng rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const size_t n_fail = 1 + rng.uniform_index(60);
    const size_t n_pass = 1 + rng.uniform_index(60);
    const size_t k = 2 + rng.uniform_index(9);
    std::vector<uint8_t> y = labels_of(n_fail, n_pass);
    Rng shuffle(trial);
    shuffle.shuffle(std::span<uint8_t>(y));
    const auto plan = stratified_kfold(y, k, 100 + trial);
    std::vector<size_t> seen(y.size(), 0);
    for (size_t f = 0; f < k; ++f) {
      for (size_t r : plan.test_rows(f)) ++seen[r];
      CHECK(plan.test_rows(f).size() + plan.train_rows(f).size() == y.size());
    }
    for (size_t c : seen) CHECK(c == 1);
    for (uint8_t cls : {kFail, kPass}) {
      size_t lo = y.size(), hi = 0;
      for (size_t f = 0; f < k; ++f) {
        size_t count = 0;
        for (size_t r : plan.test_rows(f)) count += y[r] == cls;
        lo = std::min(lo, count);
        hi = std::max(hi, count);
      }
      CHECK(hi - lo <= 1);
    }
  }
}

TEST_CASE("fold examples") {
  const auto plan = stratified_kfold(labels_of(10, 10), 2, 3);
  for (size_t f = 0; f < 2; ++f) CHECK(plan.test_rows(f).size() == 10);

  const auto nine = stratified_kfold(labels_of(9, 30), 10, 3);
  size_t empty = 0;
  for (size_t f = 0; f < 10; ++f) {
    size_t fails = 0;
    for (size_t r : nine.test_rows(f)) fails += r < 9;
    CHECK(fails <= 1);
    empty += fails == 0;
  }
  CHECK(empty == 1);
  CHECK(code_of([] { stratified_kfold(labels_of(0, 5), 2, 1); }) == ErrorCode::kTooFewRows);
}

TEST_CASE("confusion metrics") {
  const std::vector<uint8_t> y = {kFail, kFail, kPass, kPass};
  const auto m = confusion_metrics(y, std::vector<double>{0.9, 0.2, 0.1, 0.4});
  CHECK(m.accuracy == 0.75);
  CHECK(m.sensitivity == 0.5);
  CHECK(m.specificity == 1.0);

  const auto perfect = confusion_metrics(y, std::vector<double>{0.9, 0.8, 0.1, 0.4});
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.sensitivity == 1.0);
  CHECK(perfect.specificity == 1.0);

  const auto all_pass = confusion_metrics(y, std::vector<double>(4, 0.1));
  CHECK(all_pass.sensitivity == 0.0);
  CHECK(all_pass.specificity == 1.0);
  CHECK(all_pass.accuracy == 0.5);

  CHECK(confusion_metrics(y, std::vector<double>{0.5, 0, 0, 0}).true_positive == 1);
  CHECK(code_of([] { confusion_metrics({}, {}); }) == ErrorCode::kEmptyInput);
}

TEST_CASE("accuracy identity") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t n = 2 + rng.uniform_index(300);
    std::vector<uint8_t> y(n);
    std::vector<double> p(n);
    for (size_t i = 0; i < n; ++i) {
      y[i] = rng.bernoulli(0.4) ? kFail : kPass;
      p[i] = rng.uniform01();
    }
    y[0] = kFail;
    y[1] = kPass;
    const auto m = confusion_metrics(y, p, rng.uniform01());
    const double n_fail = double(std::count(y.begin(), y.end(), kFail));
    const double n_pass = double(n) - n_fail;
    CHECK(std::abs(m.accuracy - (m.sensitivity * n_fail + m.specificity * n_pass) / n) <= 1e-12);
  }
}

TEST_CASE("auc examples") {
  const std::vector<uint8_t> y = {kFail, kPass, kFail, kPass};
  CHECK(roc_auc(y, std::vector<double>{0.8, 0.8, 0.4, 0.2}) == 0.625);
  CHECK(roc_auc(y, std::vector<double>{0.9, 0.1, 0.8, 0.2}) == 1.0);
  CHECK(roc_auc(y, std::vector<double>{0.1, 0.9, 0.2, 0.8}) == 0.0);
  CHECK(code_of([] { roc_auc(std::vector<uint8_t>{kFail}, std::vector<double>{1}); }) ==
        ErrorCode::kSingleClass);
}

TEST_CASE("auc agrees with pair counting and ignores monotone transforms") {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = 2 + rng.uniform_index(150);
    std::vector<uint8_t> y(n);
    std::vector<double> s(n), t(n);
    std::vector<uint8_t> flipped(n);
    for (size_t i = 0; i < n; ++i) {
      y[i] = rng.bernoulli(0.5) ? kFail : kPass;
      s[i] = std::round(rng.uniform(0, 20)) / 4;
      t[i] = std::exp(s[i]) * 3 - 2;
    }
    y[0] = kFail;
    y[1] = kPass;
    for (size_t i = 0; i < n; ++i) flipped[i] = y[i] == kFail ? kPass : kFail;
    const double auc = roc_auc(y, s);
    CHECK(auc == doctest::Approx(oracle::pairwise_auc(y, s)).epsilon(1e-14));
    CHECK(roc_auc(y, t) == auc);
    CHECK(roc_auc(flipped, s) == doctest::Approx(1.0 - auc).epsilon(1e-14));
  }
}

TEST_CASE("majority baseline on 60/40 data") {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 100; ++i) rows.push_back({double(i % 7)});
  auto y = labels_of(40, 60);
  Rng(3).shuffle(std::span<uint8_t>(y));
  const auto d = make_dataset(rows, y);
  ModelSpec spec{"majority", ModelFamily::kMajority, {}};
  CvOptions opt;
  opt.k = 5;
  opt.reps = 2;
  opt.seed = 11;
  const auto report = cross_validate(d, spec, opt);
  CHECK(report.folds.size() == 10);
  CHECK(report.accuracy.mean == doctest::Approx(0.6));
  CHECK(report.auc.mean == 0.5);
  CHECK(report.sensitivity.mean == 0.0);
}

TEST_CASE("cross validation counts and determinism") {
  const auto d = random_dataset(300, 4, 17);
  ModelSpec spec{"tree", ModelFamily::kTree, {}};
  spec.params.tree.max_depth = 3;
  CvOptions opt;
  opt.k = 10;
  opt.reps = 10;
  opt.seed = 5;
  const auto a = cross_validate(d, spec, opt);
  CHECK(a.folds.size() == 100);
  CHECK(a.accuracy.n == 100);
  const auto b = cross_validate(d, spec, opt);
  CHECK(folds_csv({a}) == folds_csv({b}));
  CHECK(performance_csv({a}) == performance_csv({b}));
  opt.seed = 6;
  CHECK(folds_csv({a}) != folds_csv({cross_validate(d, spec, opt)}));
  for (const auto& f : a.folds) CHECK(f.n_train + f.n_test <= d.n_rows);
}

TEST_CASE("balanced training folds") {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 200; ++i) rows.push_back({double(i % 13), double(i % 7)});
  const auto d = make_dataset(rows, labels_of(50, 150));
  ModelSpec spec{"logistic", ModelFamily::kLogistic, {}};
  CvOptions opt;
  opt.k = 5;
  opt.reps = 1;
  const auto report = cross_validate(d, spec, opt);
  for (const auto& f : report.folds) CHECK(f.n_train == 80);
  opt.balance = false;
  for (const auto& f : cross_validate(d, spec, opt).folds) CHECK(f.n_train == 160);
}

TEST_CASE("metric summaries skip undefined values") {
  const auto s = summarize({1.0, std::nan(""), 3.0});
  CHECK(s.n == 2);
  CHECK(s.mean == 2.0);
  CHECK(s.min == 1.0);
  CHECK(s.max == 3.0);
}

TEST_CASE("grid expansion and selection") {
  const auto cells = expand_grid({{"tree.max_depth", {1, 3}}, {"tree.min_samples_leaf", {1, 5, 9}}});
  REQUIRE(cells.size() == 6);
  CHECK(cells[1][1].second == 5);
  CHECK(cells[3][0].second == 3);
  CHECK(code_of([] { expand_grid({{"tree.max_depth", {}}}); }) == ErrorCode::kEmptyGrid);

  const auto d = xor_data(400, 2);
  ModelSpec spec{"tree", ModelFamily::kTree, {}};
  spec.params.tree.min_samples_leaf = 1;
  CvOptions opt;
  opt.k = 5;
  opt.reps = 1;
  const auto res = grid_search(d, spec, expand_grid({{"tree.max_depth", {1, 3}}}), opt);
  CHECK(res.best_index == 1);
  CHECK(res.best_params.tree.max_depth == 3);
  CHECK(res.reports[1].auc.mean > res.reports[0].auc.mean + 0.1);

  const auto single = grid_search(d, spec, {GridCell{{"tree.max_depth", 2}}}, opt);
  CHECK(single.best_index == 0);

  const auto tie = grid_search(d, spec,
                               {GridCell{{"tree.min_gain", 0.0}}, GridCell{{"tree.min_gain", 1e-9}}},
                               opt);
  CHECK(tie.reports[0].auc.mean == tie.reports[1].auc.mean);
  CHECK(tie.best_index == 0);
  CHECK(code_of([&] { grid_search(d, spec, {}, opt); }) == ErrorCode::kEmptyGrid);
}

TEST_CASE("every family fits and predicts probabilities") {
  const auto tree_data = random_dataset(200, 4, 3, 0.05);
  const auto lin_data = random_dataset(200, 4, 3);
  for (auto family : {ModelFamily::kTree, ModelFamily::kForest, ModelFamily::kBoosted,
                      ModelFamily::kLogistic, ModelFamily::kMajority}) {
    ModelSpec spec{model_family_name(family), family, {}};
    spec.params.forest.n_trees = 10;
    spec.params.boost.n_rounds = 10;
    const auto& d = encoding_for(family) == EncodingMode::kLinear ? lin_data : tree_data;
    const auto model = fit_model(spec, d, 1);
    for (double p : predict_pass(model, d)) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
    CHECK(parse_model_family(model_family_name(family)) == family);
  }
}
