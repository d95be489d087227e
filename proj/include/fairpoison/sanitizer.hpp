#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fairpoison/errors.hpp"
#include "fairpoison/types.hpp"

namespace fairpoison {

/// Anomaly-detector acceptance region fitted per class: a sphere around each
/// class centroid, optionally intersected with a slab along the
/// inter-centroid axis. Membership slack is 1e-9.
struct FeasibleSet {
  Eigen::VectorXd centroid_pos;
  Eigen::VectorXd centroid_neg;
  double radius_pos = 0.0;
  double radius_neg = 0.0;
  bool slab_enabled = false;
  Eigen::VectorXd slab_axis;      // unit vector; zero when centroids coincide
  Eigen::VectorXd slab_midpoint;
  double slab_pos = 0.0;          // half-width for class +1
  double slab_neg = 0.0;          // half-width for class -1
  double percentile = 95.0;

  const Eigen::VectorXd& centroid(int y) const { return y > 0 ? centroid_pos : centroid_neg; }
  double radius(int y) const { return y > 0 ? radius_pos : radius_neg; }
  double slab_halfwidth(int y) const { return y > 0 ? slab_pos : slab_neg; }
  bool slab_active() const { return slab_enabled && slab_axis.size() > 0 && slab_axis.squaredNorm() > 0.0; }
};

namespace detail {
/// Nearest-rank percentile: the ceil(q/100 * n)-th smallest value (1-indexed).
inline double percentile_nearest_rank(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  auto k = static_cast<std::size_t>(std::ceil(q / 100.0 * n));
  k = std::max<std::size_t>(k, 1);
  k = std::min(k, values.size());
  return values[k - 1];
}
}  // namespace detail

/// Fits the acceptance region on a dataset: per-class centroid, sphere radius
/// at the q-th percentile of centroid distances, and optionally the slab
/// half-width at the q-th percentile of axis displacements from the
/// inter-centroid midpoint.
inline FeasibleSet fit_feasible(const Dataset& dataset, double q, bool slab_enabled) {
  if (!(q > 0.0 && q <= 100.0))
    throw DataError("fit_feasible: percentile must be in (0, 100]");
  std::vector<const LabeledPoint*> pos, neg;
  for (const auto& p : dataset.points) (p.y > 0 ? pos : neg).push_back(&p);
  if (pos.empty() || neg.empty())
    throw DataError("fit_feasible: both classes must be present");

  const Eigen::Index d = dataset.dim();
  FeasibleSet fs;
  fs.percentile = q;
  fs.slab_enabled = slab_enabled;

  fs.centroid_pos = Eigen::VectorXd::Zero(d);
  for (const auto* p : pos) fs.centroid_pos += p->x;
  fs.centroid_pos /= static_cast<double>(pos.size());
  fs.centroid_neg = Eigen::VectorXd::Zero(d);
  for (const auto* p : neg) fs.centroid_neg += p->x;
  fs.centroid_neg /= static_cast<double>(neg.size());

  auto radius = [&](const std::vector<const LabeledPoint*>& cls, const Eigen::VectorXd& mu) {
    std::vector<double> dist;
    dist.reserve(cls.size());
    for (const auto* p : cls) dist.push_back((p->x - mu).norm());
    return detail::percentile_nearest_rank(std::move(dist), q);
  };
  fs.radius_pos = radius(pos, fs.centroid_pos);
  fs.radius_neg = radius(neg, fs.centroid_neg);

  if (slab_enabled) {
    Eigen::VectorXd axis = fs.centroid_pos - fs.centroid_neg;
    const double len = axis.norm();
    fs.slab_midpoint = 0.5 * (fs.centroid_pos + fs.centroid_neg);
    if (len > 1e-12) {
      fs.slab_axis = axis / len;
      auto halfwidth = [&](const std::vector<const LabeledPoint*>& cls) {
        std::vector<double> disp;
        disp.reserve(cls.size());
        for (const auto* p : cls)
          disp.push_back(std::abs(fs.slab_axis.dot(p->x - fs.slab_midpoint)));
        return detail::percentile_nearest_rank(std::move(disp), q);
      };
      fs.slab_pos = halfwidth(pos);
      fs.slab_neg = halfwidth(neg);
    } else {
      fs.slab_axis = Eigen::VectorXd::Zero(d);  // degenerate: slab imposes nothing
    }
  }
  return fs;
}

inline bool contains(const FeasibleSet& fs, const LabeledPoint& point) {
  constexpr double kSlack = 1e-9;
  if (point.x.size() != fs.centroid_pos.size())
    throw DataError("contains: dimension mismatch");
  if ((point.x - fs.centroid(point.y)).norm() > fs.radius(point.y) + kSlack) return false;
  if (fs.slab_active()) {
    const double disp = std::abs(fs.slab_axis.dot(point.x - fs.slab_midpoint));
    if (disp > fs.slab_halfwidth(point.y) + kSlack) return false;
  }
  return true;
}

namespace detail {
inline Eigen::VectorXd project_sphere(const Eigen::VectorXd& x, const Eigen::VectorXd& mu, double r) {
  const Eigen::VectorXd delta = x - mu;
  const double dist = delta.norm();
  if (dist <= r) return x;
  if (dist == 0.0) return mu;
  return mu + delta * (r / dist);
}

inline Eigen::VectorXd project_slab(const Eigen::VectorXd& x, const Eigen::VectorXd& mid,
                                    const Eigen::VectorXd& u, double s) {
  const double t = u.dot(x - mid);
  const double tc = std::clamp(t, -s, s);
  return x + (tc - t) * u;
}
}  // namespace detail

/// Euclidean projection onto the class-y region, label and group unchanged.
/// Sphere-only uses the closed-form radial pull; sphere+slab runs Dykstra's
/// alternating projections, which converges to the nearest point of the
/// (convex) intersection. Capped at 1000 rounds / 1e-10 movement.
inline LabeledPoint project(const FeasibleSet& fs, const LabeledPoint& point) {
  if (point.x.size() != fs.centroid_pos.size())
    throw DataError("project: dimension mismatch");
  const Eigen::VectorXd& mu = fs.centroid(point.y);
  const double r = fs.radius(point.y);

  LabeledPoint out = point;
  if (!fs.slab_active()) {
    out.x = detail::project_sphere(point.x, mu, r);
    return out;
  }

  const double s = fs.slab_halfwidth(point.y);
  Eigen::VectorXd x = point.x;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd q = Eigen::VectorXd::Zero(x.size());
  for (int round = 0; round < 1000; ++round) {
    const Eigen::VectorXd y = detail::project_sphere(x + p, mu, r);
    p = x + p - y;
    const Eigen::VectorXd xn = detail::project_slab(y + q, fs.slab_midpoint, fs.slab_axis, s);
    q = y + q - xn;
    const double moved = (xn - x).norm();
    x = xn;
    if (moved < 1e-10 && round > 0) break;
  }
  out.x = std::move(x);
  return out;
}

}  // namespace fairpoison
