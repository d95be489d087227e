#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fairpoison/errors.hpp"

namespace fairpoison {

/// One example: standardized feature vector, binary label in {+1,-1} and
/// demographic group flag (1 = advantaged, 0 = disadvantaged).
struct LabeledPoint {
  Eigen::VectorXd x;
  int y = 1;
  int z = 0;
};

/// Ordered collection of points plus feature metadata. `numeric_feature`
/// marks columns that standardization may rescale; one-hot columns stay as
/// emitted by the encoder.
struct Dataset {
  std::vector<LabeledPoint> points;
  std::vector<std::string> feature_names;
  std::vector<bool> numeric_feature;
  std::string provenance;

  std::size_t size() const { return points.size(); }
  Eigen::Index dim() const {
    return points.empty() ? static_cast<Eigen::Index>(feature_names.size())
                          : points.front().x.size();
  }
};

struct GroupClassCounts {
  std::size_t n_pos = 0, n_neg = 0;
  std::size_t n_adv = 0, n_dis = 0;
  std::size_t n_pos_adv = 0, n_pos_dis = 0;
  std::size_t n_neg_adv = 0, n_neg_dis = 0;

  std::size_t total() const { return n_pos + n_neg; }
};

inline GroupClassCounts partition_counts(const Dataset& ds) {
  GroupClassCounts c;
  for (const auto& p : ds.points) {
    if (p.y > 0) {
      ++c.n_pos;
      (p.z == 1 ? c.n_pos_adv : c.n_pos_dis)++;
    } else {
      ++c.n_neg;
      (p.z == 1 ? c.n_neg_adv : c.n_neg_dis)++;
    }
    (p.z == 1 ? c.n_adv : c.n_dis)++;
  }
  return c;
}

/// A dataset can be attacked only when all four (label, group) cells are
/// populated.
inline bool attack_eligible(const GroupClassCounts& c) {
  return c.n_pos_adv > 0 && c.n_pos_dis > 0 && c.n_neg_adv > 0 && c.n_neg_dis > 0;
}

inline void validate_dataset(const Dataset& ds) {
  const Eigen::Index d = static_cast<Eigen::Index>(ds.feature_names.size());
  if (ds.numeric_feature.size() != ds.feature_names.size())
    throw DataError("dataset: numeric_feature mask does not match feature_names");
  for (std::size_t i = 0; i < ds.points.size(); ++i) {
    const auto& p = ds.points[i];
    if (p.x.size() != d)
      throw DataError("dataset: point " + std::to_string(i) +
                      " has dimension " + std::to_string(p.x.size()) +
                      ", expected " + std::to_string(d));
    if (p.y != 1 && p.y != -1)
      throw DataError("dataset: point " + std::to_string(i) + " has label outside {+1,-1}");
    if (p.z != 0 && p.z != 1)
      throw DataError("dataset: point " + std::to_string(i) + " has group outside {0,1}");
  }
}

/// Builds a dataset with generated feature names ("f0", "f1", ...) and an
/// all-numeric mask. Convenience for synthetic and hand-built data.
inline Dataset make_dataset(std::vector<LabeledPoint> points, std::string provenance = "") {
  Dataset ds;
  ds.points = std::move(points);
  const Eigen::Index d = ds.points.empty() ? 0 : ds.points.front().x.size();
  for (Eigen::Index j = 0; j < d; ++j) ds.feature_names.push_back("f" + std::to_string(j));
  ds.numeric_feature.assign(static_cast<std::size_t>(d), true);
  ds.provenance = std::move(provenance);
  validate_dataset(ds);
  return ds;
}

/// Same metadata, different point list.
inline Dataset with_points(const Dataset& base, std::vector<LabeledPoint> points) {
  Dataset ds = base;
  ds.points = std::move(points);
  return ds;
}

inline Dataset concat(const Dataset& base, const std::vector<LabeledPoint>& extra) {
  Dataset ds = base;
  ds.points.insert(ds.points.end(), extra.begin(), extra.end());
  return ds;
}

}  // namespace fairpoison
