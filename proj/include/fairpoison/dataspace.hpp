#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "fairpoison/errors.hpp"
#include "fairpoison/rng.hpp"
#include "fairpoison/types.hpp"

namespace fairpoison {

/// Per-feature affine transform x -> (x - mean) / scale. One-hot columns get
/// (0, 1); constant numeric columns are centered only.
struct FeatureScaling {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
};

inline Eigen::VectorXd apply_scaling(const Eigen::VectorXd& x, const FeatureScaling& s) {
  return (x - s.mean).cwiseQuotient(s.scale);
}

inline Dataset apply_scaling(const Dataset& ds, const FeatureScaling& s) {
  std::vector<LabeledPoint> pts = ds.points;
  for (auto& p : pts) p.x = apply_scaling(p.x, s);
  return with_points(ds, std::move(pts));
}

/// Z-scores every numeric feature using the input's own statistics (sample
/// stddev, n-1 denominator). Returns the transformed dataset and the fitted
/// scaling for reuse on held-out data.
inline std::pair<Dataset, FeatureScaling> standardize(const Dataset& ds) {
  if (ds.points.empty()) throw DataError("standardize: empty dataset");
  const Eigen::Index d = ds.dim();
  const double n = static_cast<double>(ds.size());

  FeatureScaling s;
  s.mean = Eigen::VectorXd::Zero(d);
  s.scale = Eigen::VectorXd::Ones(d);

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  for (const auto& p : ds.points) sum += p.x;
  const Eigen::VectorXd mean = sum / n;

  Eigen::VectorXd sq = Eigen::VectorXd::Zero(d);
  for (const auto& p : ds.points) sq += (p.x - mean).cwiseAbs2();

  for (Eigen::Index j = 0; j < d; ++j) {
    if (!ds.numeric_feature[static_cast<std::size_t>(j)]) continue;
    s.mean[j] = mean[j];
    if (ds.size() > 1) {
      const double sd = std::sqrt(sq[j] / (n - 1.0));
      if (sd > 0.0) s.scale[j] = sd;
    }
  }
  return {apply_scaling(ds, s), s};
}

/// Seeded uniform shuffle, first floor(n * train_fraction) points to train.
inline std::pair<Dataset, Dataset> split_train_test(const Dataset& ds,
                                                    double train_fraction,
                                                    std::uint64_t seed) {
  if (ds.size() < 2) throw DataError("split_train_test: need at least 2 points");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw DataError("split_train_test: train_fraction must be in (0,1)");

  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  // Epsilon guard so fractions whose binary form sits just under an integer
  // product (e.g. 0.3 * 10) still floor to the intended count.
  const auto n_train = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(ds.size()) + 1e-9));
  if (n_train == 0 || n_train >= ds.size())
    throw DataError("split_train_test: degenerate split (train=" +
                    std::to_string(n_train) + " of " + std::to_string(ds.size()) + ")");

  std::vector<LabeledPoint> train, test;
  train.reserve(n_train);
  test.reserve(ds.size() - n_train);
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_train ? train : test).push_back(ds.points[order[i]]);
  return {with_points(ds, std::move(train)), with_points(ds, std::move(test))};
}

/// Gaussian cell of a synthetic dataset: `count` points at `mean` with
/// isotropic standard deviation `scale`.
struct CellSpec {
  std::size_t count = 0;
  Eigen::VectorXd mean;
  double scale = 1.0;
};

/// One cell per (label, group) combination.
struct SyntheticSpec {
  CellSpec pos_adv;  // y=+1, z=1
  CellSpec pos_dis;  // y=+1, z=0
  CellSpec neg_adv;  // y=-1, z=1
  CellSpec neg_dis;  // y=-1, z=0
};

inline Dataset gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  struct CellRef {
    const CellSpec* cell;
    int y, z;
  };
  const CellRef cells[] = {{&spec.pos_adv, 1, 1},
                           {&spec.pos_dis, 1, 0},
                           {&spec.neg_adv, -1, 1},
                           {&spec.neg_dis, -1, 0}};

  Eigen::Index d = -1;
  std::size_t total = 0;
  for (const auto& c : cells) {
    if (c.cell->count == 0) continue;
    total += c.cell->count;
    if (d < 0)
      d = c.cell->mean.size();
    else if (c.cell->mean.size() != d)
      throw DataError("gen_synthetic: cell means disagree on dimension");
  }
  if (total == 0) throw DataError("gen_synthetic: all cell counts are zero");

  Rng rng(seed);
  std::vector<LabeledPoint> pts;
  pts.reserve(total);
  for (const auto& c : cells) {
    for (std::size_t i = 0; i < c.cell->count; ++i) {
      LabeledPoint p;
      p.x = Eigen::VectorXd(d);
      for (Eigen::Index j = 0; j < d; ++j)
        p.x[j] = c.cell->mean[j] + c.cell->scale * rng.normal();
      p.y = c.y;
      p.z = c.z;
      pts.push_back(std::move(p));
    }
  }
  rng.shuffle(pts);
  return make_dataset(std::move(pts), "synthetic");
}

}  // namespace fairpoison
