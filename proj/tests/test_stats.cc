#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "eduml/association.h"
#include "eduml/descriptive.h"
#include "eduml/error.h"
#include "eduml/rng.h"
#include "eduml/special_functions.h"
#include "oracles/pair_gamma.h"
#include "oracles/tails.h"

using namespace eduml;

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

std::vector<std::vector<int64_t>> random_table(Rng& rng) {
  const size_t r = 2 + rng.uniform_index(4);
  const size_t c = 2 + rng.uniform_index(4);
  std::vector<std::vector<int64_t>> t(r, std::vector<int64_t>(c));
  for (auto& row : t) {
    for (auto& x : row) x = int64_t(rng.uniform_index(15));
  }
  t[0][0] += 1;
  t[r - 1][c - 1] += 1;
  return t;
}

Column cat(const std::string& name, std::vector<std::optional<std::string>> v) {
  return Column::categorical(name, v);
}

}  // namespace

TEST_CASE("gamma on small tables") {
  const auto g = gk_gamma(ContingencyTable({{10, 5}, {5, 10}}));
  CHECK(g.concordant == 100);
  CHECK(g.discordant == 25);
  CHECK(g.statistic == 0.6);
  CHECK(gk_gamma(ContingencyTable({{4, 0, 0}, {0, 3, 0}, {0, 0, 6}})).statistic == 1.0);
  CHECK(gk_gamma(ContingencyTable({{5, 10}, {10, 5}})).statistic == -0.6);
  CHECK(code_of([] { gk_gamma(ContingencyTable({{3, 4}})); }) == ErrorCode::kDegenerateTable);
}

TEST_CASE("gamma matches pair enumeration") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = random_table(rng);
    const auto pairs = oracle::count_pairs(t);
    const auto g = gk_gamma(ContingencyTable(t));
    CHECK(g.concordant == pairs.concordant);
    CHECK(g.discordant == pairs.discordant);
    if (pairs.concordant + pairs.discordant > 0) {
      CHECK(g.statistic == double(pairs.concordant - pairs.discordant) /
                               double(pairs.concordant + pairs.discordant));
    }
    CHECK(g.p_value >= 0.0);
    CHECK(g.p_value <= 1.0);
  }
}

TEST_CASE("contingency table from columns") {
  const Column x = cat("q", {"1", "2", "2", std::nullopt, "3"});
  const Column y = cat("outcome", {"fail", "pass", "fail", "pass", "pass"});
  const auto t = ContingencyTable::from_columns(x, y, {"3", "2", "1"});
  CHECK(t.row_labels == std::vector<std::string>{"3", "2", "1"});
  CHECK(t.total() == 4);
  CHECK(t.at(0, 1) == 1);
  CHECK(t.at(1, 0) == 1);
  CHECK(t.at(2, 0) == 1);
}

TEST_CASE("kruskal-wallis") {
  const auto kw = kruskal_wallis({{1, 2}, {3, 4}});
  CHECK(kw.statistic == 2.4);
  CHECK(kw.df == 1);
  CHECK(kw.p_value == doctest::Approx(oracle::chi_square_sf(2.4, 1)).epsilon(1e-10));
  CHECK(kw.p_value == doctest::Approx(0.1213).epsilon(1e-3));

  const auto same = kruskal_wallis({{1, 2, 3}, {1, 2, 3}});
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);

  const auto logged = kruskal_wallis({{std::exp(1.0), std::exp(2.0)}, {std::exp(3.0), std::exp(4.0)}});
  CHECK(logged.statistic == kw.statistic);

  CHECK(code_of([] { kruskal_wallis({{2, 2}, {2, 2}}); }) == ErrorCode::kAllValuesIdentical);
}

TEST_CASE("kruskal-wallis exact permutation p") {
  // With groups {1,2} and {3,4} only 2 of the 6 equally likely splits reach H = 2.4.
  const auto kw = kruskal_wallis({{1, 2}, {3, 4}}, true);
  CHECK(kw.p_value == doctest::Approx(2.0 / 6.0));
}

TEST_CASE("kruskal-wallis is unchanged by strictly increasing transforms") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<double>> groups(3), moved(3);
    for (size_t g = 0; g < 3; ++g) {
      for (int i = 0; i < 8; ++i) {
        const double v = double(rng.uniform_index(10)) + g;
        groups[g].push_back(v);
        moved[g].push_back(std::pow(v + 1, 3) - 7);
      }
    }
    CHECK(kruskal_wallis(groups).statistic ==
          doctest::Approx(kruskal_wallis(moved).statistic).epsilon(1e-12));
  }
}

TEST_CASE("mid ranks") {
  CHECK(mid_ranks({10, 20, 10, 30}) == std::vector<double>{1.5, 3, 1.5, 4});
}

TEST_CASE("one-way anova") {
  const auto a = anova_oneway({{1, 2}, {3, 4}});
  CHECK(a.statistic == 8.0);
  CHECK(a.df == 1);
  CHECK(a.df2 == 2);
  CHECK(a.p_value == doctest::Approx(oracle::f_sf(8, 1, 2)).epsilon(1e-10));
  CHECK(a.p_value == doctest::Approx(0.1056).epsilon(1e-3));

  const auto equal = anova_oneway({{1, 3}, {0, 4}});
  CHECK(equal.statistic == 0.0);
  CHECK(equal.p_value == 1.0);

  CHECK(code_of([] { anova_oneway({{2, 2}, {2, 2}}); }) == ErrorCode::kZeroWithinVariance);
}

TEST_CASE("anova F is invariant under affine maps") {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<double>> groups(4), moved(4);
    const double a = rng.uniform(-5, 5) + 0.1, b = rng.uniform(-100, 100);
    for (size_t g = 0; g < 4; ++g) {
      for (int i = 0; i < 6; ++i) {
        const double v = rng.normal() + 0.3 * g;
        groups[g].push_back(v);
        moved[g].push_back(a * v + b);
      }
    }
    CHECK(anova_oneway(groups).statistic ==
          doctest::Approx(anova_oneway(moved).statistic).epsilon(1e-9));
  }
}

TEST_CASE("tail probabilities") {
  CHECK(tail_probability({Distribution::kNormal}, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(tail_probability({Distribution::kChiSquare, 1}, 3.8415) - 0.05) <= 1e-4);
  CHECK(std::abs(tail_probability({Distribution::kF, 1, 2}, 8.0) - 0.1056) <= 1e-4);
  CHECK(code_of([] { tail_probability({Distribution::kChiSquare, 0.5}, 1.0); }) ==
        ErrorCode::kInvalidParameter);
  CHECK(code_of([] { tail_probability({Distribution::kNormal}, std::nan("")); }) ==
        ErrorCode::kInvalidParameter);
}

TEST_CASE("tails agree with an independent implementation") {
  for (double df : {1.0, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0}) {
    for (double x : {0.01, 0.5, 1.0, 2.5, 3.8415, 7.0, 15.0, 40.0, 120.0}) {
      const double ref = oracle::chi_square_sf(x, df);
      CHECK(chi_square_sf(x, df) == doctest::Approx(ref).epsilon(1e-10).scale(1e-300));
    }
  }
  for (double d1 : {1.0, 2.0, 4.0, 9.0}) {
    for (double d2 : {1.0, 2.0, 5.0, 30.0, 400.0}) {
      for (double x : {0.05, 0.5, 1.0, 3.0, 8.0, 50.0}) {
        CHECK(f_sf(x, d1, d2) == doctest::Approx(oracle::f_sf(x, d1, d2)).epsilon(1e-9));
      }
    }
  }
  for (double x = -6; x <= 6; x += 0.37) {
    CHECK(normal_sf(x) == doctest::Approx(oracle::normal_sf(x)).epsilon(1e-11));
  }
}

TEST_CASE("tails decrease in x") {
  double prev = 1.0;
  for (double x = 0.0; x < 30; x += 0.25) {
    const double p = chi_square_sf(x, 3);
    CHECK(p <= prev);
    prev = p;
  }
  prev = 1.0;
  for (double x = 0.0; x < 30; x += 0.25) {
    const double p = f_sf(x, 3, 12);
    CHECK(p <= prev);
    prev = p;
  }
}

TEST_CASE("special function identities") {
  CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-13));
  CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(M_PI)).epsilon(1e-13));
  for (double a : {0.5, 1.0, 3.0, 12.0}) {
    for (double x : {0.1, 1.0, 4.0, 20.0}) {
      CHECK(gamma_p(a, x) + gamma_q(a, x) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  CHECK(beta_inc(2, 3, 0.4) == doctest::Approx(1.0 - beta_inc(3, 2, 0.6)).epsilon(1e-13));
  CHECK(beta_inc(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("mean, median and group summaries") {
  CHECK(mean({1, 2, 3}) == 2);
  CHECK(median({1, 2, 3}) == 2);
  CHECK(mean({1, 2, 100}) == doctest::Approx(34.333333333));
  CHECK(median({1, 2, 100}) == 2);
  CHECK(median({4, 1, 3, 2}) == 2.5);
  CHECK(std::isnan(median({})));

  const Column g = Column::categorical_from_codes("outcome", {"fail", "pass", "other"},
                                                  {0, 0, 1, 1, 1});
  const Table t({g, Column::numeric("score", {10, 20, 1, 2, 100})});
  const auto rows = group_summary(t, "outcome", {"score"});
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].group == "fail");
  CHECK(rows[0].mean == 15);
  CHECK(rows[1].group == "other");
  CHECK(rows[1].n == 0);
  CHECK(std::isnan(rows[1].mean));
  CHECK(rows[2].group == "pass");
  CHECK(rows[2].median == 2);
  CHECK(rows[3].group == kOverallGroup);
  CHECK(rows[3].n == 5);
  CHECK(group_summary_csv(rows).rfind("target,group,n,mean,median\n", 0) == 0);
}

TEST_CASE("frequency tables") {
  const Table t({cat("outcome", {"pass", "pass", "pass", "fail"}),
                 cat("fence", {"yes", "yes", "no", "yes"})});
  const auto rows = frequency_table(t, "outcome", "fence");
  bool found = false;
  for (const auto& r : rows) {
    if (r.group == "pass" && r.level == "yes") {
      found = true;
      CHECK(r.count == 2);
      CHECK(r.percent == doctest::Approx(200.0 / 3.0));
    }
    if (r.group == "fail" && r.level == "yes") CHECK(r.percent == 100.0);
  }
  CHECK(found);
}

TEST_CASE("histogram bins") {
  const auto h = histogram({0, 1, 2, 3, 4, std::nan("")}, 2);
  REQUIRE(h.size() == 2);
  CHECK(h[0].lo == 0);
  CHECK(h[0].hi == 2);
  CHECK(h[0].count == 2);
  CHECK(h[1].count == 3);
}
