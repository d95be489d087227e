#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "fairpoison/csv.hpp"
#include "fairpoison/dataspace.hpp"
#include "fairpoison/rng.hpp"
#include "fairpoison/schema.hpp"
#include "fairpoison/types.hpp"

using namespace fairpoison;

namespace {

LabeledPoint pt(std::initializer_list<double> xs, int y, int z) {
  LabeledPoint p;
  p.x = Eigen::VectorXd(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double v : xs) p.x[i++] = v;
  p.y = y;
  p.z = z;
  return p;
}

const char* kMinimalSchema =
    "label_column = outcome\n"
    "positive_label_value = good\n"
    "sensitive_column = sex\n"
    "advantaged_value = male\n"
    "feature = age numeric\n"
    "feature = income numeric\n";

}  // namespace

TEST_CASE("parse_schema: minimal config") {
  const DatasetSchema s = parse_schema(kMinimalSchema);
  CHECK(s.label_column == "outcome");
  CHECK(s.positive_label_value == "good");
  CHECK(s.sensitive_column == "sex");
  CHECK(s.advantaged_value == "male");
  REQUIRE(s.feature_columns.size() == 2);
  CHECK(s.feature_columns[0].name == "age");
  CHECK(s.feature_columns[0].kind == FeatureKind::numeric);
  CHECK_FALSE(s.sensitive_as_feature);
  CHECK_FALSE(s.label_as_feature);
}

TEST_CASE("parse_schema: missing mandatory key") {
  const char* text =
      "positive_label_value = good\n"
      "sensitive_column = sex\n"
      "advantaged_value = male\n"
      "feature = age numeric\n";
  CHECK_THROWS_WITH(parse_schema(text), Catch::Matchers::ContainsSubstring("label_column"));
}

TEST_CASE("parse_schema: sensitive column re-declared as feature is flagged") {
  std::string text = kMinimalSchema;
  text += "feature = sex categorical\n";
  const DatasetSchema s = parse_schema(text);
  CHECK(s.sensitive_as_feature);
  CHECK(s.feature_columns.size() == 3);
}

TEST_CASE("parse_schema: errors") {
  SECTION("unknown key") {
    CHECK_THROWS_AS(parse_schema(std::string(kMinimalSchema) + "frobnicate = 1\n"), ConfigError);
  }
  SECTION("double-declared feature") {
    CHECK_THROWS_WITH(parse_schema(std::string(kMinimalSchema) + "feature = age numeric\n"),
                      Catch::Matchers::ContainsSubstring("more than once"));
  }
  SECTION("feature also dropped") {
    CHECK_THROWS_AS(parse_schema(std::string(kMinimalSchema) + "drop = age\n"), ConfigError);
  }
  SECTION("malformed line") {
    CHECK_THROWS_AS(parse_schema("label_column outcome\n"), ConfigError);
  }
  SECTION("bad feature kind") {
    CHECK_THROWS_AS(parse_schema(std::string(kMinimalSchema) + "feature = height tall\n"),
                    ConfigError);
  }
  SECTION("no features") {
    CHECK_THROWS_AS(parse_schema(
                        "label_column = a\npositive_label_value = b\n"
                        "sensitive_column = c\nadvantaged_value = d\n"),
                    ConfigError);
  }
}

TEST_CASE("load_csv: label and group mapping preserves row order") {
  const char* csv =
      "age,sex,outcome\n"
      "30,male,good\n"
      "40,female,bad\n"
      "50,male,good\n";
  const Dataset ds = load_csv(csv, parse_schema(
                                       "label_column = outcome\n"
                                       "positive_label_value = good\n"
                                       "sensitive_column = sex\n"
                                       "advantaged_value = male\n"
                                       "feature = age numeric\n"));
  REQUIRE(ds.size() == 3);
  CHECK(ds.points[0].y == 1);
  CHECK(ds.points[1].y == -1);
  CHECK(ds.points[2].y == 1);
  CHECK(ds.points[0].z == 1);
  CHECK(ds.points[1].z == 0);
  CHECK(ds.points[0].x[0] == 30.0);
  CHECK(ds.points[2].x[0] == 50.0);
}

TEST_CASE("load_csv: one-hot encoding in first-appearance order") {
  const char* csv =
      "housing,sex,outcome\n"
      "a,male,good\n"
      "b,male,bad\n"
      "a,female,good\n";
  const Dataset ds = load_csv(csv, parse_schema(
                                       "label_column = outcome\n"
                                       "positive_label_value = good\n"
                                       "sensitive_column = sex\n"
                                       "advantaged_value = male\n"
                                       "feature = housing categorical\n"));
  REQUIRE(ds.feature_names.size() == 2);
  CHECK(ds.feature_names[0] == "housing=a");
  CHECK(ds.feature_names[1] == "housing=b");
  CHECK(ds.points[0].x == Eigen::Vector2d(1, 0));
  CHECK(ds.points[1].x == Eigen::Vector2d(0, 1));
  CHECK(ds.points[2].x == Eigen::Vector2d(1, 0));
  CHECK_FALSE(ds.numeric_feature[0]);
}

TEST_CASE("load_csv: error contracts") {
  const DatasetSchema schema = parse_schema(kMinimalSchema);
  SECTION("unparseable numeric cell names row and column") {
    const char* csv =
        "age,income,sex,outcome\n"
        "30,1000,male,good\n"
        "abc,2000,female,bad\n";
    CHECK_THROWS_WITH(load_csv(csv, schema),
                      Catch::Matchers::ContainsSubstring("row 2") &&
                          Catch::Matchers::ContainsSubstring("age"));
  }
  SECTION("missing column") {
    CHECK_THROWS_WITH(load_csv("age,sex,outcome\n30,male,good\n", schema),
                      Catch::Matchers::ContainsSubstring("income"));
  }
  SECTION("empty dataset") {
    CHECK_THROWS_AS(load_csv("age,income,sex,outcome\n", schema), DataError);
  }
  SECTION("ragged row") {
    CHECK_THROWS_AS(load_csv("age,income,sex,outcome\n30,male,good\n", schema), DataError);
  }
}

TEST_CASE("load_csv: quoted fields and CRLF") {
  const char* csv =
      "name,sex,outcome\r\n"
      "\"big, house\",male,good\r\n"
      "\"say \"\"hi\"\"\",female,bad\r\n";
  const Dataset ds = load_csv(csv, parse_schema(
                                       "label_column = outcome\n"
                                       "positive_label_value = good\n"
                                       "sensitive_column = sex\n"
                                       "advantaged_value = male\n"
                                       "feature = name categorical\n"));
  REQUIRE(ds.size() == 2);
  CHECK(ds.feature_names[0] == "name=big, house");
  CHECK(ds.feature_names[1] == "name=say \"hi\"");
}

TEST_CASE("load_csv + partition_counts: totals match data rows") {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    std::string csv = "age,sex,outcome\n";
    const std::size_t rows = 1 + rng.index(30);
    for (std::size_t i = 0; i < rows; ++i) {
      csv += std::to_string(rng.index(100)) + "," +
             (rng.uniform01() < 0.5 ? "male" : "female") + "," +
             (rng.uniform01() < 0.5 ? "good" : "bad") + "\n";
    }
    const Dataset ds = load_csv(csv, parse_schema(
                                         "label_column = outcome\n"
                                         "positive_label_value = good\n"
                                         "sensitive_column = sex\n"
                                         "advantaged_value = male\n"
                                         "feature = age numeric\n"));
    const GroupClassCounts c = partition_counts(ds);
    CHECK(c.n_pos + c.n_neg == rows);
    CHECK(c.n_adv + c.n_dis == rows);
    CHECK(c.n_pos_adv + c.n_pos_dis == c.n_pos);
    CHECK(c.n_neg_adv + c.n_neg_dis == c.n_neg);
  }
}

TEST_CASE("standardize: z-scores with sample stddev") {
  const Dataset ds = make_dataset({pt({1}, 1, 1), pt({2}, -1, 0), pt({3}, 1, 0)});
  auto [out, scaling] = standardize(ds);
  CHECK_THAT(out.points[0].x[0], Catch::Matchers::WithinAbs(-1.0, 1e-12));
  CHECK_THAT(out.points[1].x[0], Catch::Matchers::WithinAbs(0.0, 1e-12));
  CHECK_THAT(out.points[2].x[0], Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(scaling.mean[0], Catch::Matchers::WithinAbs(2.0, 1e-12));
  CHECK_THAT(scaling.scale[0], Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("standardize: constant column is centered only") {
  const Dataset ds = make_dataset({pt({5}, 1, 1), pt({5}, -1, 0), pt({5}, 1, 0)});
  auto [out, scaling] = standardize(ds);
  for (const auto& p : out.points) CHECK(p.x[0] == 0.0);
  CHECK(scaling.scale[0] == 1.0);
}

TEST_CASE("standardize: fresh point at the training mean maps to zero") {
  const Dataset ds = make_dataset({pt({1, 10}, 1, 1), pt({3, 30}, -1, 0)});
  auto [out, scaling] = standardize(ds);
  (void)out;
  Eigen::VectorXd fresh(2);
  fresh << 2, 20;
  const Eigen::VectorXd mapped = apply_scaling(fresh, scaling);
  CHECK_THAT(mapped.norm(), Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("standardize: one-hot columns are untouched") {
  Dataset ds = make_dataset({pt({1, 1}, 1, 1), pt({5, 0}, -1, 0), pt({9, 1}, 1, 0)});
  ds.numeric_feature[1] = false;
  auto [out, scaling] = standardize(ds);
  CHECK(out.points[0].x[1] == 1.0);
  CHECK(out.points[1].x[1] == 0.0);
  CHECK(scaling.mean[1] == 0.0);
  CHECK(scaling.scale[1] == 1.0);
}

TEST_CASE("standardize: idempotent on its own output") {
  Rng rng(11);
  std::vector<LabeledPoint> pts;
  for (int i = 0; i < 40; ++i)
    pts.push_back(pt({rng.normal(3, 2), rng.normal(-1, 0.5)}, rng.uniform01() < 0.5 ? 1 : -1,
                     rng.uniform01() < 0.5));
  auto [once, s1] = standardize(make_dataset(pts));
  auto [twice, s2] = standardize(once);
  (void)s1;
  (void)s2;
  for (std::size_t i = 0; i < once.points.size(); ++i)
    CHECK_THAT((once.points[i].x - twice.points[i].x).norm(),
               Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("split_train_test: floor rule and determinism") {
  std::vector<LabeledPoint> pts;
  for (int i = 0; i < 100; ++i) pts.push_back(pt({double(i)}, i % 2 ? 1 : -1, i % 3 == 0));
  const Dataset ds = make_dataset(pts);

  auto [train, test] = split_train_test(ds, 0.8, 99);
  CHECK(train.size() == 80);
  CHECK(test.size() == 20);

  auto [train2, test2] = split_train_test(ds, 0.8, 99);
  for (std::size_t i = 0; i < train.size(); ++i) CHECK(train.points[i].x == train2.points[i].x);
  for (std::size_t i = 0; i < test.size(); ++i) CHECK(test.points[i].x == test2.points[i].x);

  SECTION("train and test partition the input") {
    std::multiset<double> in, out;
    for (const auto& p : ds.points) in.insert(p.x[0]);
    for (const auto& p : train.points) out.insert(p.x[0]);
    for (const auto& p : test.points) out.insert(p.x[0]);
    CHECK(in == out);
  }
}

TEST_CASE("split_train_test: small n and degenerate splits") {
  std::vector<LabeledPoint> pts;
  for (int i = 0; i < 5; ++i) pts.push_back(pt({double(i)}, 1, 0));
  const Dataset ds = make_dataset(pts);
  auto [train, test] = split_train_test(ds, 0.8, 1);
  CHECK(train.size() == 4);
  CHECK(test.size() == 1);

  const Dataset two = make_dataset({pt({0}, 1, 0), pt({1}, -1, 1)});
  CHECK_THROWS_AS(split_train_test(two, 0.01, 1), DataError);   // floors to an empty train side
  CHECK_THROWS_AS(split_train_test(two, 1.0, 1), DataError);    // fraction outside (0,1)
  CHECK_THROWS_AS(split_train_test(make_dataset({pt({0}, 1, 0)}), 0.5, 1), DataError);
}

TEST_CASE("split_train_test: inexact fractions floor to the intended count") {
  std::vector<LabeledPoint> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(pt({double(i)}, 1, 0));
  auto [train, test] = split_train_test(make_dataset(pts), 0.3, 5);
  CHECK(train.size() == 3);
  CHECK(test.size() == 7);
}

TEST_CASE("partition_counts: enumeration") {
  SECTION("three points") {
    const GroupClassCounts c =
        partition_counts(make_dataset({pt({0}, 1, 1), pt({1}, -1, 0), pt({2}, 1, 0)}));
    CHECK(c.n_pos == 2);
    CHECK(c.n_neg == 1);
  }
  SECTION("empty dataset") {
    const GroupClassCounts c = partition_counts(Dataset{});
    CHECK(c.n_pos == 0);
    CHECK(c.n_neg == 0);
    CHECK(c.total() == 0);
  }
  SECTION("all four cells") {
    const GroupClassCounts c = partition_counts(
        make_dataset({pt({0}, 1, 1), pt({1}, 1, 0), pt({2}, -1, 1), pt({3}, -1, 0)}));
    CHECK(c.n_pos_adv == 1);
    CHECK(c.n_pos_dis == 1);
    CHECK(c.n_neg_adv == 1);
    CHECK(c.n_neg_dis == 1);
    CHECK(attack_eligible(c));
  }
}

TEST_CASE("gen_synthetic: exact cell counts and determinism") {
  SyntheticSpec spec;
  Eigen::VectorXd m(2);
  m << 0, 0;
  spec.pos_adv = {100, m, 1.0};
  spec.pos_dis = {100, m, 1.0};
  spec.neg_adv = {100, m, 1.0};
  spec.neg_dis = {100, m, 1.0};

  const Dataset a = gen_synthetic(spec, 5);
  CHECK(a.size() == 400);
  const GroupClassCounts c = partition_counts(a);
  CHECK(c.n_pos_adv == 100);
  CHECK(c.n_pos_dis == 100);
  CHECK(c.n_neg_adv == 100);
  CHECK(c.n_neg_dis == 100);

  const Dataset b = gen_synthetic(spec, 5);
  REQUIRE(b.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.points[i].x == b.points[i].x);
    CHECK(a.points[i].y == b.points[i].y);
    CHECK(a.points[i].z == b.points[i].z);
  }
}

TEST_CASE("gen_synthetic: empirical cell mean within 5 standard errors") {
  SyntheticSpec spec;
  Eigen::VectorXd m(2);
  m << 2, 0;
  spec.pos_adv = {10000, m, 0.1};
  const Dataset ds = gen_synthetic(spec, 123);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  for (const auto& p : ds.points) mean += p.x;
  mean /= static_cast<double>(ds.size());
  // 5 * 0.1 / sqrt(10000) = 0.005; the 0.02 bound leaves slack on top.
  CHECK(std::abs(mean[0] - 2.0) < 0.02);
  CHECK(std::abs(mean[1] - 0.0) < 0.02);
}

TEST_CASE("gen_synthetic: all-zero counts rejected") {
  CHECK_THROWS_AS(gen_synthetic(SyntheticSpec{}, 1), DataError);
}
