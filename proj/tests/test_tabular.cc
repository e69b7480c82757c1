#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "eduml/association.h"
#include "eduml/csv.h"
#include "eduml/dataset.h"
#include "eduml/error.h"
#include "eduml/schema.h"
#include "eduml/synth.h"
#include "eduml/transforms.h"
#include "oracles/quantile.h"
#include "test_support.h"

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

const char* kSchoolSchema = R"(
[emiscode]
kind = integer
role = key

[sum_enrol]
kind = integer

[pass_rate]
kind = numeric
role = score

[internet]
kind = categorical

[Quintile]
kind = categorical
ordinal = true
levels = 1, 2, 3, 4, 5

[RateWater]
kind = categorical

[notes]
kind = text
role = ignore
)";

Column cat(const std::string& name, std::vector<std::optional<std::string>> v) {
  return Column::categorical(name, v);
}

}  // namespace

TEST_CASE("csv parser handles quotes, CRLF and BOM") {
  const auto doc = parse_csv("\xEF\xBB\xBF" "a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\r\n1,\n");
  REQUIRE(doc.header == std::vector<std::string>{"a", "b"});
  REQUIRE(doc.rows.size() == 2);
  CHECK(doc.rows[0][0] == "x, y");
  CHECK(doc.rows[0][1] == "say \"hi\"");
  CHECK(doc.rows[1][1] == "");
  CHECK(code_of([] { parse_csv("a,b\n1,2,3\n"); }) == ErrorCode::kMalformedRow);
  CHECK(csv_line({"plain", "a,b", "q\"q"}) == "plain,\"a,b\",\"q\"\"q\"\n");
}

TEST_CASE("read_table parses typed columns") {
  const SchemaSpec schema = parse_schema(R"(
[emiscode]
kind = integer
role = key
[sum_enrol]
kind = integer
)");
  const Table t = parse_table("emiscode,sum_enrol\n101,683\n", schema);
  REQUIRE(t.n_rows() == 1);
  CHECK(t.column("emiscode").number(0) == 101);
  CHECK(t.column("sum_enrol").number(0) == 683);
  CHECK(t.column("sum_enrol").kind() == ColumnKind::kInteger);
}

TEST_CASE("read_table keeps non-token categories and flags bad cells") {
  const SchemaSpec schema = parse_schema(kSchoolSchema);
  const std::string csv =
      "emiscode,sum_enrol,pass_rate,internet,Quintile,RateWater,notes\n"
      "1,10,55.5,unknown,3,good,x\n"
      "2,20,NA,yes,1,,y\n";
  const Table t = parse_table(csv, schema);
  CHECK_FALSE(t.has_column("notes"));
  const Column& internet = t.column("internet");
  CHECK(internet.cell_string(0) == "unknown");
  CHECK(internet.level_code("unknown").has_value());
  CHECK(t.column("pass_rate").is_missing(1));
  CHECK(t.column("RateWater").is_missing(1));

  const std::string bad =
      "emiscode,sum_enrol,pass_rate,internet,Quintile,RateWater,notes\n"
      "1,abc,55,yes,3,good,x\n";
  CHECK(code_of([&] { parse_table(bad, schema); }) == ErrorCode::kMalformedCell);
  CHECK(code_of([&] { parse_table("emiscode,extra\n1,2\n", schema); }) ==
        ErrorCode::kUnknownColumnInSchema);
  CHECK(code_of([&] {
          parse_table("emiscode,sum_enrol,pass_rate,internet,Quintile,notes\n", schema);
        }) == ErrorCode::kMissingColumn);
}

TEST_CASE("read_table reports a missing file as an io error") {
  CHECK(code_of([] { read_table("/nonexistent/file.csv", SchemaSpec{}); }) ==
        ErrorCode::kIo);
}

TEST_CASE("schema text round-trips through format_schema") {
  const SchemaSpec schema = parse_schema(kSchoolSchema);
  const SchemaSpec again = parse_schema(format_schema(schema));
  REQUIRE(again.columns().size() == schema.columns().size());
  for (size_t i = 0; i < schema.columns().size(); ++i) {
    CHECK(again.columns()[i].name == schema.columns()[i].name);
    CHECK(again.columns()[i].kind == schema.columns()[i].kind);
    CHECK(again.columns()[i].role == schema.columns()[i].role);
    CHECK(again.columns()[i].levels == schema.columns()[i].levels);
  }
  CHECK(code_of([] { parse_schema("[a]\nrole = score\n[b]\nrole = score\n").validate(true); }) ==
        ErrorCode::kSchemaError);
}

TEST_CASE("merge_on_key inner join") {
  const Table left({Column::integer("emis", {1, 2}), Column::numeric("pass_rate", {40, 70})});
  const Table right({Column::integer("emis", {2, 3}), cat("Urban_Rural", {"urban", "rural"})});
  const Table joined = merge_on_key(left, right, "emis");
  REQUIRE(joined.n_rows() == 1);
  CHECK(joined.column("emis").number(0) == 2);
  CHECK(joined.column("pass_rate").number(0) == 70);
  CHECK(joined.column("Urban_Rural").cell_string(0) == "urban");

  const Table dup({Column::integer("emis", {2, 2}), cat("Urban_Rural", {"a", "b"})});
  CHECK(code_of([&] { merge_on_key(left, dup, "emis"); }) == ErrorCode::kDuplicateKey);
  CHECK(code_of([&] { merge_on_key(left, right, "nope"); }) == ErrorCode::kMissingColumn);
}

TEST_CASE("many-to-one merge repeats the lookup row") {
  const Table schools({Column::integer("emis", {1, 2, 3}), cat("muni", {"A", "B", "A"})});
  const Table community({cat("muni", {"A", "B"}), cat("RateWater", {"good", "poor"})});
  const Table joined = merge_on_key(schools, community, "muni", JoinCardinality::kManyToOne);
  REQUIRE(joined.n_rows() == 3);
  CHECK(joined.column("RateWater").cell_string(0) == "good");
  CHECK(joined.column("RateWater").cell_string(1) == "poor");
  CHECK(joined.column("RateWater").cell_string(2) == "good");
  CHECK(code_of([&] { merge_on_key(schools, community, "muni"); }) ==
        ErrorCode::kDuplicateKey);
}

TEST_CASE("join with a unique-key table restores its rows") {
  Rng rng(5);
  std::vector<double> keys(60), vals(60);
  for (size_t i = 0; i < keys.size(); ++i) {
    keys[i] = double(i * 7 + 3);
    vals[i] = rng.uniform(0, 100);
  }
  const Table a({Column::integer("k", keys), Column::numeric("v", vals)});
  std::vector<size_t> perm(keys.size());
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(std::span<size_t>(perm));
  const Table b = a.take_rows(perm).without_column("v").with_column(
      Column::numeric("w", std::vector<double>(keys.size(), 1.0)));
  const Table joined = merge_on_key(a, b, "k");
  CHECK(joined.without_column("w") == a);
}

TEST_CASE("mode aggregation follows the tie rule") {
  const Table hh({cat("muni", {"A", "A", "A", "B", "B", "C"}),
                  cat("RateWater", {"good", "good", "poor", "poor", "good", "average"})});
  const Table agg = mode_aggregate_by_group(hh, "muni", {"RateWater"});
  REQUIRE(agg.n_rows() == 3);
  CHECK(agg.column("RateWater").cell_string(0) == "good");
  CHECK(agg.column("RateWater").cell_string(1) == "good");
  CHECK(agg.column("RateWater").cell_string(2) == "average");
  CHECK(code_of([&] { mode_aggregate_by_group(hh, "RateWater", {"nope"}); }) ==
        ErrorCode::kMissingColumn);
}

TEST_CASE("mode aggregation agrees with a recount") {
  Rng rng(17);
  const std::vector<std::string> levels = {"good", "average", "poor", "no-access"};
  std::vector<std::optional<std::string>> group, value;
  for (int i = 0; i < 500; ++i) {
    group.push_back("m" + std::to_string(rng.uniform_index(12)));
    value.push_back(levels[rng.uniform_index(levels.size())]);
  }
  const Table t({cat("muni", group), cat("v", value)});
  const Table agg = mode_aggregate_by_group(t, "muni", {"v"});
  for (size_t g = 0; g < agg.n_rows(); ++g) {
    const std::string name = agg.column("muni").cell_string(g);
    std::map<std::string, int> counts;
    for (size_t i = 0; i < group.size(); ++i) {
      if (*group[i] == name) ++counts[*value[i]];
    }
    int best = 0;
    for (const auto& [level, c] : counts) best = std::max(best, c);
    std::string expected;
    for (const auto& [level, c] : counts) {
      if (c == best) {
        expected = level;
        break;
      }
    }
    CHECK(agg.column("v").cell_string(g) == expected);
  }
}

TEST_CASE("count aggregation: counts, conditional counts and means") {
  const Table teachers({Column::integer("emis", {7, 7, 7}), cat("sex", {"F", "F", "M"}),
                        Column::numeric("service", {5, 10, 15})});
  const Table schools({Column::integer("emis", {7, 8})});
  const Table agg = count_aggregate_by_group(
      teachers, "emis",
      {AggregateSpec::count("n"), AggregateSpec::count_where("sex", "F"),
       AggregateSpec::mean("service")},
      &schools);
  REQUIRE(agg.n_rows() == 2);
  CHECK(agg.column("n").number(0) == 3);
  CHECK(agg.column("sex_F_count").number(0) == 2);
  CHECK(agg.column("service_mean").number(0) == doctest::Approx(10.0));
  CHECK(agg.column("n").number(1) == 0);
  CHECK(agg.column("sex_F_count").number(1) == 0);
  CHECK(agg.column("service_mean").is_missing(1));
}

TEST_CASE("sparse columns are dropped only above the threshold") {
  auto col = [](const std::string& name, int missing, int n) {
    std::vector<double> v(n, 1.0);
    for (int i = 0; i < missing; ++i) v[i] = std::nan("");
    return Column::numeric(name, v);
  };
  const Table t({col("sixty", 6, 10), col("fifty", 5, 10), col("full", 0, 10)});
  const auto res = drop_sparse_columns(t, 0.5);
  CHECK(res.table.column_names() == std::vector<std::string>{"fifty", "full"});
  REQUIRE(res.dropped.size() == 1);
  CHECK(res.dropped[0].name == "sixty");
  CHECK(res.dropped[0].missing_fraction == doctest::Approx(0.6));
  CHECK(drop_sparse_columns(t, 0.5, {"sixty"}).table.n_columns() == 3);
  const Table full({col("a", 0, 4), col("b", 0, 4)});
  CHECK(drop_sparse_columns(full, 0.5).table == full);
}

TEST_CASE("label rule boundary") {
  const Table t({Column::numeric("pass_rate", {50.0, 49.9, std::nan(""), 100.0, 0.0})});
  const auto res = derive_label(t, "pass_rate");
  CHECK(res.dropped_missing_score == 1);
  const Column& outcome = res.table.column(kOutcomeColumn);
  REQUIRE(outcome.size() == 4);
  CHECK(outcome.cell_string(0) == "pass");
  CHECK(outcome.cell_string(1) == "fail");
  CHECK(outcome.cell_string(2) == "pass");
  CHECK(outcome.cell_string(3) == "fail");
  CHECK(code_of([] {
          derive_label(Table({Column::numeric("s", {120.0})}), "s");
        }) == ErrorCode::kScoreOutOfRange);
}

TEST_CASE("label is monotone in the score") {
  Rng rng(3);
  std::vector<double> scores(300);
  for (double& s : scores) s = std::round(rng.uniform(0, 100) * 10) / 10;
  const auto res = derive_label(Table({Column::numeric("s", scores)}), "s");
  const Column& outcome = res.table.column(kOutcomeColumn);
  for (size_t i = 0; i < scores.size(); ++i) {
    for (size_t j = 0; j < scores.size(); ++j) {
      if (scores[i] <= scores[j] && outcome.cell_string(i) == "pass") {
        CHECK(outcome.cell_string(j) == "pass");
      }
    }
  }
}

TEST_CASE("ratio column") {
  const Table t({Column::integer("learners", {683, 100, std::nan("")}),
                 Column::integer("educators", {24, 0, 5})});
  const auto res = add_ratio_column(t, "learners", "educators", "ratio");
  const Column& r = res.table.column("ratio");
  CHECK(r.number(0) == 683.0 / 24.0);
  CHECK(r.number(0) == doctest::Approx(28.458333333));
  CHECK(r.is_missing(1));
  CHECK(r.is_missing(2));
  CHECK(res.zero_denominator == 1);
}

TEST_CASE("quantile bins") {
  const auto q = quantile_bin({1, 2, 3, 4, 5, 6, 7, 8}, 4);
  REQUIRE(q.edges.size() == 3);
  CHECK(q.edges[0] == doctest::Approx(2.75));
  CHECK(q.edges[1] == doctest::Approx(4.5));
  CHECK(q.edges[2] == doctest::Approx(6.25));

  const auto h = quantile_bin({1, 2, 3, 4}, 2);
  REQUIRE(h.edges.size() == 1);
  CHECK(h.edges[0] == 2.5);
  CHECK(h.bin == std::vector<int>{0, 0, 1, 1});
  CHECK(h.label(0) == "[1.0, 2.5]");
  CHECK(h.label(1) == "(2.5, 4.0]");

  CHECK(code_of([] { quantile_bin({3, 3, 3, 3}, 4); }) == ErrorCode::kDegenerateDistribution);
}

TEST_CASE("quantile edges match the order-statistic oracle") {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(5 + rng.uniform_index(200));
    for (double& x : v) x = std::round(rng.uniform(0, 100));
    const int k = 2 + int(rng.uniform_index(5));
    const auto q = quantile_bin(v, k);
    for (int i = 1; i < k; ++i) {
      CHECK(q.edges[i - 1] == doctest::Approx(oracle::quantile(v, double(i) / k)).epsilon(1e-12));
    }
    for (size_t i = 0; i < v.size(); ++i) {
      const int b = q.bin[i];
      if (b > 0) CHECK(v[i] > q.edges[b - 1]);
      if (b < k - 1) CHECK(v[i] <= q.edges[b]);
    }
  }
}

TEST_CASE("one-hot encoding drops the most frequent level") {
  const SchemaSpec schema = parse_schema(kSchoolSchema);
  const Table t({Column::integer("emiscode", {1, 2, 3, 4, 5}),
                 Column::numeric("sum_enrol", {1, std::nan(""), 3, 4, 5}),
                 cat("internet", {"yes", "no", "yes", "yes", "no"}),
                 cat("Quintile", {"3", "1", "5", "2", "3"}),
                 cat("RateWater", {"good", "poor", "average", "average", "average"}),
                 cat(kOutcomeColumn, {"pass", "fail", "pass", "fail", "pass"})});
  const LabeledDataset d = encode_features(t, schema, EncodingMode::kLinear);
  const std::vector<std::string> expected = {"sum_enrol", "internet: no", "Quintile",
                                             "RateWater: good", "RateWater: poor"};
  CHECK(d.feature_names == expected);
  CHECK(d.at(0, 2) == 3.0);
  CHECK(d.at(1, 0) == 3.5);
  CHECK(d.labels == std::vector<uint8_t>{kPass, kFail, kPass, kFail, kPass});

  const LabeledDataset tree = encode_features(t, schema, EncodingMode::kTree);
  CHECK(tree.is_missing(1, 0));
  for (size_t r = 0; r < t.n_rows(); ++r) {
    CHECK(decode_categorical(d, r, "RateWater") == t.column("RateWater").cell_string(r));
    CHECK(decode_categorical(d, r, "Quintile") == t.column("Quintile").cell_string(r));
    CHECK(d.at(r, 3) + d.at(r, 4) <= 1.0);
  }
}

TEST_CASE("linear-mode median imputation") {
  const SchemaSpec schema = parse_schema("[x]\nkind = numeric\n");
  const Table t({Column::numeric("x", {1, std::nan(""), 3}),
                 cat(kOutcomeColumn, {"pass", "fail", "pass"})});
  const auto d = encode_features(t, schema, EncodingMode::kLinear);
  CHECK(d.at(1, 0) == 2.0);
  CHECK(d.encoding.columns[0].impute_value == 2.0);
}

TEST_CASE("unseen levels map to the reference level or missing") {
  const SchemaSpec schema = parse_schema("[c]\nkind = categorical\n");
  const Table train({cat("c", {"a", "a", "b"}), cat(kOutcomeColumn, {"pass", "fail", "pass"})});
  const Table other({cat("c", {"z", "b"})});
  const auto lin = encode_features(train, schema, EncodingMode::kLinear);
  const auto applied = apply_encoding(other, lin.encoding);
  CHECK(applied.at(0, 0) == 0.0);
  CHECK(applied.at(1, 0) == 1.0);
  const auto tree = encode_features(train, schema, EncodingMode::kTree);
  CHECK(apply_encoding(other, tree.encoding).is_missing(0, 0));
}

TEST_CASE("balance_classes") {
  std::vector<std::vector<double>> rows;
  std::vector<uint8_t> labels;
  for (int i = 0; i < 150; ++i) {
    rows.push_back({double(i)});
    labels.push_back(i < 100 ? kPass : kFail);
  }
  const auto d = testing::make_dataset(rows, labels);
  const auto b = balance_classes(d, 7);
  CHECK(b.count(kPass) == 50);
  CHECK(b.count(kFail) == 50);
  std::set<double> seen;
  for (size_t r = 0; r < b.n_rows; ++r) {
    CHECK(seen.insert(b.at(r, 0)).second);
    CHECK(b.labels[r] == d.labels[size_t(b.at(r, 0))]);
  }
  CHECK(balance_classes(d, 7).features == b.features);

  const auto even = d.subset(std::vector<size_t>{0, 1, 2, 100, 101, 102});
  auto kept = balance_classes(even, 3).features;
  std::sort(kept.begin(), kept.end());
  CHECK(kept == std::vector<double>{0, 1, 2, 100, 101, 102});

  const auto single = d.subset(std::vector<size_t>{0, 1, 2});
  CHECK(code_of([&] { balance_classes(single, 1); }) == ErrorCode::kSingleClass);
}

TEST_CASE("synth_generate is deterministic and honours the planted signal") {
  const SchemaSpec schema = parse_schema(R"(
[emis]
kind = integer
role = key
[pass_rate]
kind = numeric
role = score
[quintile]
kind = categorical
ordinal = true
levels = 1, 2, 3, 4, 5
synth.levels = 1, 2, 3, 4, 5
[noise]
kind = numeric
synth.min = 0
synth.max = 10
)");
  const Table empty = synth_generate(schema, 0, {}, 1);
  CHECK(empty.n_rows() == 0);
  CHECK(empty.column_names() == std::vector<std::string>{"emis", "pass_rate", "quintile", "noise"});

  const PlantedSignal signal = parse_signal("logit = 2*quintile - 6");
  const Table a = synth_generate(schema, 5000, signal, 99);
  const Table b = synth_generate(schema, 5000, signal, 99);
  CHECK(table_to_csv(a) == table_to_csv(b));
  CHECK(table_to_csv(a) != table_to_csv(synth_generate(schema, 5000, signal, 100)));

  const Table labeled = derive_label(a, "pass_rate").table;
  const auto ct = ContingencyTable::from_columns(labeled.column("quintile"),
                                                 labeled.column(kOutcomeColumn),
                                                 {"1", "2", "3", "4", "5"}, {"fail", "pass"});
  const auto g = gk_gamma(ct);
  CHECK(g.statistic > 0);
  CHECK(g.p_value < 0.05);
}

TEST_CASE("signal text round-trips") {
  const auto s = parse_signal("1.5*Urban[urban] - 0.8*RateToilet[poor] + 0.02*ratio - 1");
  REQUIRE(s.terms.size() == 3);
  CHECK(s.intercept == -1);
  CHECK(s.terms[0].level == "urban");
  CHECK(s.terms[1].coefficient == -0.8);
  const auto again = parse_signal(format_signal(s));
  CHECK(again.intercept == s.intercept);
  CHECK(again.terms.size() == 3);
  CHECK(code_of([] { parse_signal("2*"); }) == ErrorCode::kInvalidConfig);
}
