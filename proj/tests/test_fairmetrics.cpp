#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fairpoison/fairmetrics.hpp"
#include "fairpoison/rng.hpp"
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

// Brute-force oracle: enumerate predictions and count cells with separate
// filters, independent of the library's single-pass counting.
struct BruteForce {
  double spd, eod, err;
};

BruteForce brute_force_metrics(const ModelParams& m, const Dataset& ds) {
  auto rate = [&](auto&& in_group, auto&& event) {
    long denom = 0, num = 0;
    for (const auto& p : ds.points) {
      if (!in_group(p)) continue;
      ++denom;
      if (event(p)) ++num;
    }
    return static_cast<double>(num) / static_cast<double>(denom);
  };
  auto pred_pos = [&](const LabeledPoint& p) { return m.w.dot(p.x) + m.b >= 0.0; };
  BruteForce r{};
  r.spd = std::abs(rate([](const LabeledPoint& p) { return p.z == 1; }, pred_pos) -
                   rate([](const LabeledPoint& p) { return p.z == 0; }, pred_pos));
  r.eod = std::abs(rate([](const LabeledPoint& p) { return p.z == 1 && p.y == 1; }, pred_pos) -
                   rate([](const LabeledPoint& p) { return p.z == 0 && p.y == 1; }, pred_pos));
  long wrong = 0;
  for (const auto& p : ds.points)
    if ((pred_pos(p) ? 1 : -1) != p.y) ++wrong;
  r.err = static_cast<double>(wrong) / static_cast<double>(ds.size());
  return r;
}

// x-threshold model: predicts +1 iff x0 >= 0.
ModelParams threshold_model() {
  ModelParams m;
  m.w = Eigen::VectorXd::Constant(1, 1.0);
  m.b = 0.0;
  return m;
}

}  // namespace

TEST_CASE("statistical_parity_difference: extremes") {
  const ModelParams m = threshold_model();
  SECTION("fully split by group") {
    const Dataset ds = make_dataset(
        {pt({1}, 1, 1), pt({2}, -1, 1), pt({-1}, 1, 0), pt({-2}, -1, 0)});
    CHECK(statistical_parity_difference(m, ds) == 1.0);
  }
  SECTION("everything predicted positive") {
    const Dataset ds = make_dataset(
        {pt({1}, 1, 1), pt({2}, -1, 1), pt({1}, 1, 0), pt({2}, -1, 0)});
    CHECK(statistical_parity_difference(m, ds) == 0.0);
  }
}

TEST_CASE("statistical_parity_difference: 8-point hand count") {
  // Advantaged rate 3/4, disadvantaged 1/4.
  const Dataset ds = make_dataset({
      pt({1}, 1, 1), pt({1}, -1, 1), pt({1}, 1, 1), pt({-1}, -1, 1),
      pt({1}, 1, 0), pt({-1}, -1, 0), pt({-1}, 1, 0), pt({-1}, -1, 0),
  });
  const ModelParams m = threshold_model();
  CHECK_THAT(statistical_parity_difference(m, ds), Catch::Matchers::WithinAbs(0.5, 1e-15));
  CHECK(statistical_parity_difference(m, ds) == brute_force_metrics(m, ds).spd);
}

TEST_CASE("statistical_parity_difference: empty group is an error naming it") {
  const Dataset adv_only = make_dataset({pt({1}, 1, 1), pt({-1}, -1, 1)});
  CHECK_THROWS_WITH(statistical_parity_difference(threshold_model(), adv_only),
                    Catch::Matchers::ContainsSubstring("disadvantaged"));
  const Dataset dis_only = make_dataset({pt({1}, 1, 0), pt({-1}, -1, 0)});
  CHECK_THROWS_WITH(statistical_parity_difference(threshold_model(), dis_only),
                    Catch::Matchers::ContainsSubstring("advantaged"));
}

TEST_CASE("equal_opportunity_difference: all positives correct gives zero") {
  const Dataset ds = make_dataset(
      {pt({1}, 1, 1), pt({1}, 1, 0), pt({-1}, -1, 1), pt({1}, -1, 0)});
  CHECK(equal_opportunity_difference(threshold_model(), ds) == 0.0);
}

TEST_CASE("equal_opportunity_difference: extreme gap") {
  const Dataset ds = make_dataset({pt({1}, 1, 1), pt({-1}, 1, 0)});
  CHECK(equal_opportunity_difference(threshold_model(), ds) == 1.0);
}

TEST_CASE("equal_opportunity_difference: 10-point hand count gives 1/6") {
  // Advantaged TPR 2/3, disadvantaged TPR 1/2.
  const Dataset ds = make_dataset({
      pt({1}, 1, 1), pt({1}, 1, 1), pt({-1}, 1, 1),
      pt({1}, 1, 0), pt({-1}, 1, 0),
      pt({-1}, -1, 1), pt({-1}, -1, 0), pt({-1}, -1, 0), pt({1}, -1, 1), pt({-1}, -1, 0),
  });
  const ModelParams m = threshold_model();
  CHECK_THAT(equal_opportunity_difference(m, ds),
             Catch::Matchers::WithinAbs(1.0 / 6.0, 1e-15));
  CHECK(equal_opportunity_difference(m, ds) == brute_force_metrics(m, ds).eod);
}

TEST_CASE("equal_opportunity_difference: group without positives is an error") {
  const Dataset ds = make_dataset({pt({1}, 1, 1), pt({-1}, -1, 0)});
  CHECK_THROWS_WITH(equal_opportunity_difference(threshold_model(), ds),
                    Catch::Matchers::ContainsSubstring("disadvantaged"));
}

TEST_CASE("test_error: counting") {
  const ModelParams m = threshold_model();
  SECTION("perfect classifier") {
    const Dataset ds = make_dataset({pt({1}, 1, 1), pt({-1}, -1, 0)});
    CHECK(test_error(m, ds) == 0.0);
  }
  SECTION("sign-flipped classifier") {
    ModelParams flipped = m;
    flipped.w = -flipped.w;
    const Dataset ds = make_dataset({pt({1}, 1, 1), pt({-2}, -1, 0)});
    CHECK(test_error(flipped, ds) == 1.0);
  }
  SECTION("3 wrong of 10") {
    std::vector<LabeledPoint> pts;
    for (int i = 0; i < 7; ++i) pts.push_back(pt({1}, 1, i % 2));
    for (int i = 0; i < 3; ++i) pts.push_back(pt({-1}, 1, i % 2));
    CHECK_THAT(test_error(m, make_dataset(pts)), Catch::Matchers::WithinAbs(0.3, 1e-15));
  }
}

TEST_CASE("metrics: group swap leaves SPD and EOD unchanged") {
  Rng rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<LabeledPoint> pts;
    const std::size_t n = 4 + rng.index(9);
    bool ok = false;
    while (!ok) {
      pts.clear();
      for (std::size_t i = 0; i < n; ++i)
        pts.push_back(pt({rng.normal()}, rng.uniform01() < 0.5 ? 1 : -1,
                         rng.uniform01() < 0.5 ? 1 : 0));
      GroupClassCounts c = partition_counts(make_dataset(pts));
      ok = c.n_pos_adv > 0 && c.n_pos_dis > 0;
    }
    const Dataset ds = make_dataset(pts);
    std::vector<LabeledPoint> swapped = pts;
    for (auto& p : swapped) p.z = 1 - p.z;
    const Dataset dsw = make_dataset(swapped);

    ModelParams m;
    m.w = Eigen::VectorXd::Constant(1, rng.normal());
    m.b = rng.normal();
    CHECK(statistical_parity_difference(m, ds) == statistical_parity_difference(m, dsw));
    CHECK(equal_opportunity_difference(m, ds) == equal_opportunity_difference(m, dsw));
  }
}

TEST_CASE("metrics: range, duplication invariance, oracle equivalence") {
  Rng rng(22);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<LabeledPoint> pts;
    const std::size_t n = 4 + rng.index(9);  // at most 12 points
    bool ok = false;
    while (!ok) {
      pts.clear();
      for (std::size_t i = 0; i < n; ++i)
        pts.push_back(pt({rng.normal(), rng.normal()}, rng.uniform01() < 0.5 ? 1 : -1,
                         rng.uniform01() < 0.5 ? 1 : 0));
      GroupClassCounts c = partition_counts(make_dataset(pts));
      ok = c.n_pos_adv > 0 && c.n_pos_dis > 0;
    }
    const Dataset ds = make_dataset(pts);
    ModelParams m;
    m.w = Eigen::Vector2d(rng.normal(), rng.normal());
    m.b = rng.normal();

    const MetricReport r = evaluate_metrics(m, ds);
    CHECK((r.spd >= 0.0 && r.spd <= 1.0));
    CHECK((r.eod >= 0.0 && r.eod <= 1.0));
    CHECK((r.test_error >= 0.0 && r.test_error <= 1.0));

    const BruteForce bf = brute_force_metrics(m, ds);
    CHECK(r.spd == bf.spd);
    CHECK(r.eod == bf.eod);
    CHECK(r.test_error == bf.err);

    std::vector<LabeledPoint> doubled = pts;
    doubled.insert(doubled.end(), pts.begin(), pts.end());
    const MetricReport r2 = evaluate_metrics(m, make_dataset(doubled));
    CHECK(r.spd == r2.spd);
    CHECK(r.eod == r2.eod);
    CHECK(r.test_error == r2.test_error);
  }
}

TEST_CASE("evaluate_metrics: agrees with the individual operations") {
  Rng rng(23);
  std::vector<LabeledPoint> pts;
  for (int i = 0; i < 30; ++i)
    pts.push_back(pt({rng.normal(), rng.normal()}, i % 2 ? 1 : -1, i % 3 == 0 ? 1 : 0));
  const Dataset ds = make_dataset(pts);
  ModelParams m;
  m.w = Eigen::Vector2d(0.7, -0.3);
  m.b = 0.1;
  const MetricReport r = evaluate_metrics(m, ds);
  CHECK(r.spd == statistical_parity_difference(m, ds));
  CHECK(r.eod == equal_opportunity_difference(m, ds));
  CHECK(r.test_error == test_error(m, ds));
}
