#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "eduml/error.h"
#include "eduml/importance.h"
#include "eduml/shap.h"
#include "eduml/trainers.h"
#include "oracles/shapley_permutations.h"
#include "test_support.h"

using namespace eduml;
using eduml::testing::make_dataset;
using eduml::testing::random_boosted;
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

TreeNode leaf(double value) {
  TreeNode n;
  n.value = value;
  return n;
}

TreeEnsemble stump(int32_t feature, double threshold, double lo, double hi, size_t n_features) {
  TreeEnsemble m;
  m.mode = EnsembleMode::kBoosted;
  m.learning_rate = 1.0;
  for (size_t j = 0; j < n_features; ++j) m.feature_names.push_back("f" + std::to_string(j));
  Tree t;
  TreeNode root;
  root.feature = feature;
  root.threshold = threshold;
  root.left = 1;
  root.right = 2;
  t.nodes = {root, leaf(lo), leaf(hi)};
  m.trees.push_back(t);
  return m;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= tol);
}

}  // namespace

TEST_CASE("a constant model attributes nothing") {
  TreeEnsemble m;
  m.mode = EnsembleMode::kBoosted;
  m.learning_rate = 1.0;
  m.feature_names = {"x0", "x1", "x2"};
  m.trees.push_back(Tree{{leaf(0.7)}});
  const auto bg = random_dataset(10, 3, 1);
  const auto phi = tree_shap(m, bg.row(4), bg);
  CHECK(phi.base_value == doctest::Approx(0.7));
  for (double v : phi.values) CHECK(v == 0.0);
}

TEST_CASE("stump with one background row per side") {
  const auto m = stump(1, 0.5, -1.0, 1.0, 3);
  const auto bg = make_dataset({{0, 0, 0}, {0, 1, 0}}, {kFail, kPass}, {"f0", "f1", "f2"});
  const std::vector<double> x = {5, 1, 5};
  const auto phi = tree_shap(m, x, bg);
  CHECK(phi.base_value == 0.0);
  CHECK(phi.values[0] == 0.0);
  CHECK(phi.values[1] == doctest::Approx(1.0));
  CHECK(phi.values[2] == 0.0);
  check_close(shap_oracle(m, x, bg).values, phi.values, 1e-12);
}

TEST_CASE("random trees agree with the coalition oracle and the permutation oracle") {
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    const size_t f = 5;
    const auto m = random_boosted(3, 3, f, seed);
    const auto bg = random_dataset(20, f, seed + 1000, seed % 2 ? 0.1 : 0.0);
    const auto rows = random_dataset(6, f, seed + 2000, 0.1);
    const TreeShapExplainer explainer(m, bg);
    for (size_t r = 0; r < rows.n_rows; ++r) {
      const auto x = rows.row(r);
      const auto fast = explainer.explain(x);
      const auto brute = shap_oracle(m, x, bg);
      CHECK(std::abs(fast.base_value - brute.base_value) <= 1e-12);
      check_close(fast.values, brute.values, 1e-8);
      check_close(fast.values, oracle::shapley_by_permutations(m, x, bg), 1e-8);
    }
  }
}

TEST_CASE("fitted ensembles agree with the oracle") {
  for (uint64_t seed = 1; seed <= 6; ++seed) {
    const auto d = random_dataset(200, 6, seed, 0.1);
    TrainParams p;
    p.forest.n_trees = 8;
    p.tree.max_depth = 4;
    p.boost.n_rounds = 8;
    p.boost.max_depth = 4;
    const auto bg = select_background(d, 15, seed);
    for (const auto& m : {fit_forest(d, p, seed), fit_gbm(d, p, seed), fit_tree(d, p, seed)}) {
      const TreeShapExplainer explainer(m, bg);
      for (size_t r = 0; r < 5; ++r) {
        check_close(explainer.explain(d.row(r)).values, shap_oracle(m, d.row(r), bg).values,
                    1e-8);
      }
    }
  }
}

TEST_CASE("attributions add up to the margin") {
  const auto d = random_dataset(300, 5, 42, 0.05);
  TrainParams p;
  p.boost.n_rounds = 30;
  p.boost.max_depth = 4;
  const auto m = fit_gbm(d, p, 1);
  const TreeShapExplainer explainer(m, select_background(d, 50, 3));
  const auto all = explainer.explain_all(d);
  REQUIRE(all.n_rows == d.n_rows);
  for (size_t r = 0; r < d.n_rows; ++r) {
    double sum = all.base_value;
    for (size_t j = 0; j < d.n_features; ++j) sum += all.at(r, j);
    CHECK(std::abs(sum - m.margin(d.row(r))) <= 1e-9);
  }
  const auto one = explainer.explain(d.row(7));
  for (size_t j = 0; j < d.n_features; ++j) CHECK(one.values[j] == all.at(7, j));
}

TEST_CASE("unused features get zero attribution") {
  const auto m = random_boosted(4, 3, 4, 11);
  auto wide = m;
  wide.feature_names.push_back("x4");
  const auto bg = random_dataset(15, 5, 3);
  const auto rows = random_dataset(10, 5, 4);
  for (size_t r = 0; r < rows.n_rows; ++r) {
    CHECK(tree_shap(wide, rows.row(r), bg).values[4] == 0.0);
  }
}

TEST_CASE("symmetric features get equal attributions") {
  // margin = [a > 0.5] + [b > 0.5], with a symmetric background.
  TreeEnsemble m = stump(0, 0.5, 0.0, 1.0, 2);
  m.trees.push_back(stump(1, 0.5, 0.0, 1.0, 2).trees[0]);
  const auto bg = make_dataset({{0, 0}, {1, 1}, {0, 1}, {1, 0}}, {kFail, kPass, kFail, kPass},
                               {"f0", "f1"});
  const std::vector<double> x = {1, 1};
  const auto phi = tree_shap(m, x, bg);
  CHECK(phi.values[0] == doctest::Approx(phi.values[1]));
  CHECK(phi.values[0] == doctest::Approx(0.5));
}

TEST_CASE("attributions are additive across trees") {
  const auto m = random_boosted(5, 3, 5, 77);
  const auto bg = random_dataset(12, 5, 5);
  const auto probe = random_dataset(1, 5, 6);
  const auto x = probe.row(0);
  const auto whole = tree_shap(m, x, bg);
  std::vector<double> sum(5, 0.0);
  double base = m.base_score;
  for (const Tree& t : m.trees) {
    TreeEnsemble single = m;
    single.base_score = 0;
    single.trees = {t};
    const auto part = tree_shap(single, x, bg);
    for (size_t j = 0; j < 5; ++j) sum[j] += part.values[j];
    base += part.base_value;
  }
  check_close(whole.values, sum, 1e-12);
  CHECK(whole.base_value == doctest::Approx(base));
}

TEST_CASE("explainer input checks") {
  const auto m = random_boosted(1, 2, 3, 1);
  CHECK(code_of([&] { TreeShapExplainer(m, random_dataset(5, 3, 1).subset(std::vector<size_t>{})); }) ==
        ErrorCode::kEmptyBackground);
  CHECK(code_of([&] { TreeShapExplainer(m, random_dataset(5, 4, 1)); }) ==
        ErrorCode::kFeatureMismatch);
  const auto big = random_boosted(1, 2, 16, 1);
  const auto bg = random_dataset(3, 16, 1);
  CHECK(code_of([&] { shap_oracle(big, bg.row(0), bg); }) == ErrorCode::kTooManyFeatures);
}

TEST_CASE("background selection keeps original order") {
  const auto d = random_dataset(100, 2, 1);
  CHECK(select_background(d, 200, 1).features == d.features);
  const auto bg = select_background(d, 10, 9);
  CHECK(bg.n_rows == 10);
  CHECK(select_background(d, 10, 9).features == bg.features);
}

TEST_CASE("shap summary ranking and beeswarm") {
  AttributionMatrix a;
  a.n_rows = 2;
  a.n_features = 3;
  a.feature_names = {"B", "A", "C"};
  a.values = {0.1, 0.5, 0.0, -0.1, -0.5, 0.0};
  const auto rows = make_dataset({{1, 10, 3}, {3, 20, 3}}, {kFail, kPass}, a.feature_names);
  const auto s = shap_summary(a, rows);
  REQUIRE(s.ranking.size() == 3);
  CHECK(s.ranking[0].feature == "A");
  CHECK(s.ranking[0].mean_abs_shap == doctest::Approx(0.5));
  CHECK(s.ranking[1].feature == "B");
  CHECK(s.ranking[2].feature == "C");
  REQUIRE(s.points.size() == 6);
  CHECK(s.points[0].feature_value_norm == 0.0);
  CHECK(s.points[3].feature_value_norm == 1.0);
  CHECK(s.points[2].feature_value_norm == 0.5);
  CHECK(shap_ranking_csv(s).rfind("rank,feature,mean_abs_shap\n1,A,", 0) == 0);
  CHECK(beeswarm_csv(s).rfind("feature,feature_value_norm,shap\n", 0) == 0);

  a.values.assign(6, 0.0);
  const auto zeros = shap_summary(a, rows);
  CHECK(zeros.ranking[0].feature == "A");
  CHECK(zeros.ranking[1].feature == "B");
  CHECK(zeros.ranking[2].feature == "C");
}

TEST_CASE("odds ratios from weights") {
  const auto rows = odds_ratio_table({{"urban", 1.35}, {"none", 0.0}, {"toilet", -1.85}});
  CHECK(rows[0].odds_ratio == doctest::Approx(3.857).epsilon(1e-4));
  CHECK(rows[0].pct_change == doctest::Approx(285.74).epsilon(1e-4));
  CHECK(rows[1].odds_ratio == 1.0);
  CHECK(rows[1].pct_change == 0.0);
  CHECK(rows[2].odds_ratio == doctest::Approx(0.1572).epsilon(1e-3));
  CHECK(rows[2].pct_change == doctest::Approx(-84.28).epsilon(1e-4));
  CHECK(odds_ratio_csv(rows) ==
        "variable,weight,odd_ratio,pct_change\n"
        "urban,1.35,3.86,285.74\n"
        "none,0.00,1.00,0.00\n"
        "toilet,-1.85,0.16,-84.28\n");
}

TEST_CASE("linear importance sides") {
  LinearModel m;
  m.feature_names = {"a", "b", "traditional", "c", "d"};
  m.coefficients = {2.0, -3.0, -0.69, 0.5, 0.5};
  const auto ranked = linear_importance(m);
  CHECK(ranked.front().feature == "a");
  CHECK(ranked.front().side == EffectSide::kPass);
  CHECK(ranked.back().feature == "b");
  CHECK(ranked.back().side == EffectSide::kFail);
  CHECK(ranked[1].feature == "c");
  CHECK(ranked[2].feature == "d");
  CHECK(ranked[3].feature == "traditional");
  CHECK(ranked[3].side == EffectSide::kFail);
  CHECK(linear_importance_csv(ranked).rfind("feature,weight,side\na,2,pass\n", 0) == 0);
}

TEST_CASE("fixed-point formatting") {
  CHECK(format_fixed(-0.001, 2) == "0.00");
  CHECK(format_fixed(285.7438, 2) == "285.74");
  CHECK(format_fixed(-49.655, 1) == "-49.7");
}
