#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "fairpoison/errors.hpp"
#include "fairpoison/types.hpp"

namespace fairpoison {

/// Linear classifier parameters: score(x) = w.x + b.
struct ModelParams {
  Eigen::VectorXd w;
  double b = 0.0;
};

struct TrainSettings {
  double reg = 1e-3;          // L2 coefficient on w (bias unregularized)
  double smoothing = 0.1;     // hinge smoothing width h
  double tol = 1e-7;          // gradient-norm stopping threshold
  int max_iters = 10000;
  double bias_damping = 1e-4; // added to the Hessian's bias diagonal
};

struct Hinge {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Quadratically smoothed hinge in the margin m:
///   m >= 1        : 0
///   1-h < m < 1   : (1-m)^2 / (2h)
///   m <= 1-h      : 1 - m - h/2
/// C1 everywhere; second derivative 1/h inside the quadratic band.
inline Hinge smoothed_hinge(double margin, double h) {
  Hinge r;
  if (margin >= 1.0) return r;
  if (margin > 1.0 - h) {
    const double g = 1.0 - margin;
    r.value = g * g / (2.0 * h);
    r.d1 = -g / h;
    r.d2 = 1.0 / h;
  } else {
    r.value = 1.0 - margin - h / 2.0;
    r.d1 = -1.0;
    r.d2 = 0.0;
  }
  return r;
}

inline double signed_distance(const ModelParams& params, const Eigen::VectorXd& x) {
  if (x.size() != params.w.size())
    throw DataError("signed_distance: dimension mismatch");
  return params.w.dot(x) + params.b;
}

/// Boundary ties resolve to +1.
inline int predict(const ModelParams& params, const Eigen::VectorXd& x) {
  return signed_distance(params, x) >= 0.0 ? 1 : -1;
}

namespace detail {

/// Dense view of a dataset for the optimizer: rows of X are points, y holds
/// the labels as +-1.
struct Design {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;

  explicit Design(const Dataset& ds) {
    const auto n = static_cast<Eigen::Index>(ds.size());
    const Eigen::Index d = ds.dim();
    X.resize(n, d);
    y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      X.row(i) = ds.points[static_cast<std::size_t>(i)].x;
      y[i] = ds.points[static_cast<std::size_t>(i)].y;
    }
  }
};

inline double design_loss(const Design& dz, const Eigen::VectorXd& w, double b,
                          const TrainSettings& st) {
  const Eigen::VectorXd margins = dz.y.cwiseProduct(dz.X * w + Eigen::VectorXd::Constant(dz.X.rows(), b));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i)
    acc += smoothed_hinge(margins[i], st.smoothing).value;
  return acc / static_cast<double>(dz.X.rows()) + 0.5 * st.reg * w.squaredNorm();
}

inline void design_grad(const Design& dz, const Eigen::VectorXd& w, double b,
                        const TrainSettings& st, Eigen::VectorXd& grad_w, double& grad_b) {
  const auto n = dz.X.rows();
  const Eigen::VectorXd margins = dz.y.cwiseProduct(dz.X * w + Eigen::VectorXd::Constant(n, b));
  Eigen::VectorXd coef(n);  // d1_i * y_i
  for (Eigen::Index i = 0; i < n; ++i)
    coef[i] = smoothed_hinge(margins[i], st.smoothing).d1 * dz.y[i];
  grad_w = dz.X.transpose() * coef / static_cast<double>(n) + st.reg * w;
  grad_b = coef.sum() / static_cast<double>(n);
}

}  // namespace detail

/// Mean smoothed hinge over the dataset plus (reg/2)||w||^2.
inline double train_loss(const ModelParams& params, const Dataset& dataset,
                         const TrainSettings& settings) {
  if (dataset.points.empty()) throw DataError("train_loss: empty dataset");
  double acc = 0.0;
  for (const auto& p : dataset.points) {
    const double m = p.y * signed_distance(params, p.x);
    acc += smoothed_hinge(m, settings.smoothing).value;
  }
  return acc / static_cast<double>(dataset.size()) + 0.5 * settings.reg * params.w.squaredNorm();
}

struct LossDerivatives {
  Eigen::VectorXd grad;     // dimension d+1, bias last
  Eigen::MatrixXd hessian;  // (d+1) x (d+1), symmetric positive definite
};

/// Analytic gradient and Hessian of train_loss in (w, b). The Hessian carries
/// reg*I on the weight block and bias_damping on the bias diagonal so it stays
/// invertible even when every margin is outside the quadratic band.
inline LossDerivatives train_derivatives(const ModelParams& params, const Dataset& dataset,
                                         const TrainSettings& settings) {
  if (dataset.points.empty()) throw DataError("train_derivatives: empty dataset");
  const Eigen::Index d = params.w.size();
  const double n = static_cast<double>(dataset.size());

  LossDerivatives out;
  out.grad = Eigen::VectorXd::Zero(d + 1);
  out.hessian = Eigen::MatrixXd::Zero(d + 1, d + 1);

  for (const auto& p : dataset.points) {
    const double m = p.y * signed_distance(params, p.x);
    const Hinge hg = smoothed_hinge(m, settings.smoothing);
    const double cy = hg.d1 * p.y;
    out.grad.head(d) += cy * p.x;
    out.grad[d] += cy;
    if (hg.d2 != 0.0) {
      // y^2 = 1, so the curvature terms drop the label.
      out.hessian.topLeftCorner(d, d) += hg.d2 * (p.x * p.x.transpose());
      out.hessian.block(0, d, d, 1) += hg.d2 * p.x;
      out.hessian.block(d, 0, 1, d) += hg.d2 * p.x.transpose();
      out.hessian(d, d) += hg.d2;
    }
  }
  out.grad /= n;
  out.hessian /= n;
  out.grad.head(d) += settings.reg * params.w;
  out.hessian.topLeftCorner(d, d) += settings.reg * Eigen::MatrixXd::Identity(d, d);
  out.hessian(d, d) += settings.bias_damping;
  return out;
}

struct TrainResult {
  ModelParams params;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
};

/// Full-batch gradient descent with Armijo backtracking from zero
/// initialization; bitwise deterministic for fixed inputs. The seed parameter
/// is accepted for interface stability and unused by this optimizer.
inline TrainResult train(const Dataset& dataset, const TrainSettings& settings,
                         [[maybe_unused]] std::uint64_t seed = 0) {
  GroupClassCounts counts = partition_counts(dataset);
  if (counts.n_pos == 0 || counts.n_neg == 0)
    throw DataError("train: both labels must be present");

  const detail::Design dz(dataset);
  const Eigen::Index d = dz.X.cols();

  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double b = 0.0;
  double f = detail::design_loss(dz, w, b, settings);

  TrainResult res;
  double step = 1.0;
  constexpr double kArmijo = 1e-4;

  for (int it = 0; it < settings.max_iters; ++it) {
    Eigen::VectorXd gw;
    double gb = 0.0;
    detail::design_grad(dz, w, b, settings, gw, gb);
    const double g2 = gw.squaredNorm() + gb * gb;
    res.grad_norm = std::sqrt(g2);
    res.iterations = it;
    if (res.grad_norm <= settings.tol) {
      res.converged = true;
      break;
    }

    double t = std::min(2.0 * step, 64.0);
    bool moved = false;
    for (int ls = 0; ls < 80; ++ls) {
      const Eigen::VectorXd w_try = w - t * gw;
      const double b_try = b - t * gb;
      const double f_try = detail::design_loss(dz, w_try, b_try, settings);
      if (f_try <= f - kArmijo * t * g2) {
        w = w_try;
        b = b_try;
        f = f_try;
        step = t;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;  // no descent step representable; gradient is numerically flat
  }

  res.params.w = std::move(w);
  res.params.b = b;
  if (!res.converged) {
    // Re-measure in case the loop exhausted max_iters right after a step.
    Eigen::VectorXd gw;
    double gb = 0.0;
    detail::design_grad(dz, res.params.w, res.params.b, settings, gw, gb);
    res.grad_norm = std::sqrt(gw.squaredNorm() + gb * gb);
    res.converged = res.grad_norm <= settings.tol;
  }
  return res;
}

}  // namespace fairpoison
