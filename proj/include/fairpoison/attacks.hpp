#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairpoison/errors.hpp"
#include "fairpoison/fairmetrics.hpp"
#include "fairpoison/linmodel.hpp"
#include "fairpoison/rng.hpp"
#include "fairpoison/sanitizer.hpp"
#include "fairpoison/types.hpp"

namespace fairpoison {

/// Adversarial objective steering the influence engine.
///   iaf    — mean test hinge plus lambda times the group/score covariance
///   koh    — mean test hinge only (accuracy attack)
///   solans — group-weighted hinge sums, disadvantaged plus (p/m) advantaged
enum class LossKind { iaf, koh, solans };

enum class PrototypeMode { demographic, plain };
enum class AnchorMode { random, nonrandom };

struct AttackConfig {
  double epsilon = 0.1;   // poison fraction of |clean|
  double eta = 0.01;      // influence step size (0 freezes the prototypes)
  double lambda = 1.0;    // fairness-loss weight (iaf only)
  double tau = 0.0;       // anchoring vicinity radius
  double sigma = 1.0;     // popularity radius for non-random anchoring
  int max_iters = 100;    // influence iterations; anchoring trial count
  double stop_tol = 1e-6; // relative best-loss improvement threshold
  int patience = 10;      // stall window before stopping
  std::uint64_t seed = 0;
  double defense_q = 95.0;
  bool slab_enabled = false;
  bool swap_groups = false;  // aim the skew at the disadvantaged group instead
  TrainSettings train;
};

struct TrajectoryPoint {
  double l_adv = 0.0;
  double spd = 0.0;
  double eod = 0.0;
  double test_error = 0.0;
};

/// The poison a run produced. Influence attacks carry two prototypes and
/// materialize `expanded` as copies; anchoring fills the anchoring extras
/// (targets and the generated points before projection) instead of
/// prototypes.
struct PoisonSet {
  std::optional<LabeledPoint> prototype_pos;
  std::optional<LabeledPoint> prototype_neg;
  std::size_t count_pos = 0;
  std::size_t count_neg = 0;
  std::vector<LabeledPoint> expanded;

  std::optional<LabeledPoint> target_neg;
  std::optional<LabeledPoint> target_pos;
  std::vector<LabeledPoint> pre_projection;
};

struct AttackResult {
  PoisonSet poison;
  ModelParams final_model;           // trained on clean + poison at the best iterate
  bool final_model_converged = true;
  FeasibleSet feasible;              // the set the emitted poison was projected onto
  std::vector<TrajectoryPoint> trajectory;
  std::size_t iterations_run = 0;
  bool converged = false;            // influence: stalled before the cap; anchoring: always
  bool all_trainings_converged = true;
  double hessian_condition_estimate = 0.0;
  double best_l_adv = 0.0;
  std::size_t best_iteration = 0;    // 1-based index into the trajectory
};

// ---------------------------------------------------------------------------
// Adversarial losses
// ---------------------------------------------------------------------------

inline double mean_hinge_loss(const ModelParams& params, const Dataset& ds, double h) {
  if (ds.points.empty()) throw DataError("mean_hinge_loss: empty dataset");
  double acc = 0.0;
  for (const auto& p : ds.points)
    acc += smoothed_hinge(p.y * signed_distance(params, p.x), h).value;
  return acc / static_cast<double>(ds.size());
}

/// Mean test hinge plus lambda times the empirical covariance surrogate
/// (1/N) sum (z_i - zbar) * score(x_i).
inline double adversarial_loss_iaf(const ModelParams& params, const Dataset& test,
                                   double lambda, double h) {
  if (test.points.empty()) throw DataError("adversarial_loss_iaf: empty test set");
  const double n = static_cast<double>(test.size());
  double zbar = 0.0;
  for (const auto& p : test.points) zbar += p.z;
  zbar /= n;
  double fairness = 0.0;
  for (const auto& p : test.points)
    fairness += (p.z - zbar) * signed_distance(params, p.x);
  fairness /= n;
  return mean_hinge_loss(params, test, h) + lambda * fairness;
}

/// Hinge sum over disadvantaged points plus (p/m) times the advantaged sum,
/// where p and m count the disadvantaged and advantaged points.
inline double adversarial_loss_solans(const ModelParams& params, const Dataset& test, double h) {
  double sum_dis = 0.0, sum_adv = 0.0;
  std::size_t p = 0, m = 0;
  for (const auto& pt : test.points) {
    const double v = smoothed_hinge(pt.y * signed_distance(params, pt.x), h).value;
    if (pt.z == 0) {
      sum_dis += v;
      ++p;
    } else {
      sum_adv += v;
      ++m;
    }
  }
  if (p == 0) throw DataError("adversarial_loss_solans: disadvantaged group (z=0) is empty");
  if (m == 0) throw DataError("adversarial_loss_solans: advantaged group (z=1) is empty");
  const double lambda = static_cast<double>(p) / static_cast<double>(m);
  return sum_dis + lambda * sum_adv;
}

inline double adversarial_loss(LossKind kind, const ModelParams& params, const Dataset& test,
                               double lambda, double h) {
  switch (kind) {
    case LossKind::koh:
      return mean_hinge_loss(params, test, h);
    case LossKind::iaf:
      return adversarial_loss_iaf(params, test, lambda, h);
    case LossKind::solans:
      return adversarial_loss_solans(params, test, h);
  }
  throw std::logic_error("adversarial_loss: bad kind");
}

/// Gradient of the chosen adversarial loss in (w, b); dimension d+1, bias
/// last.
inline Eigen::VectorXd adversarial_loss_gradient(LossKind kind, const ModelParams& params,
                                                 const Dataset& test, double lambda, double h) {
  if (test.points.empty()) throw DataError("adversarial_loss_gradient: empty test set");
  const Eigen::Index d = params.w.size();
  const double n = static_cast<double>(test.size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d + 1);

  if (kind == LossKind::solans) {
    std::size_t p = 0, m = 0;
    for (const auto& pt : test.points) (pt.z == 0 ? p : m)++;
    if (p == 0) throw DataError("adversarial_loss_gradient: disadvantaged group (z=0) is empty");
    if (m == 0) throw DataError("adversarial_loss_gradient: advantaged group (z=1) is empty");
    const double lam = static_cast<double>(p) / static_cast<double>(m);
    for (const auto& pt : test.points) {
      const double cy = smoothed_hinge(pt.y * signed_distance(params, pt.x), h).d1 * pt.y;
      const double wgt = pt.z == 0 ? 1.0 : lam;
      g.head(d) += wgt * cy * pt.x;
      g[d] += wgt * cy;
    }
    return g;
  }

  for (const auto& pt : test.points) {
    const double cy = smoothed_hinge(pt.y * signed_distance(params, pt.x), h).d1 * pt.y;
    g.head(d) += cy * pt.x;
    g[d] += cy;
  }
  g /= n;

  if (kind == LossKind::iaf) {
    double zbar = 0.0;
    for (const auto& pt : test.points) zbar += pt.z;
    zbar /= n;
    Eigen::VectorXd gf = Eigen::VectorXd::Zero(d + 1);
    for (const auto& pt : test.points) {
      gf.head(d) += (pt.z - zbar) * pt.x;
      gf[d] += (pt.z - zbar);
    }
    gf /= n;
    g += lambda * gf;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Prototype handling
// ---------------------------------------------------------------------------

/// Draws the two poison prototypes. Demographic mode samples the positive
/// prototype from the advantaged group and the negative one from the
/// disadvantaged group (labels forced); plain mode samples per label and
/// keeps each point's own group. The positive prototype is drawn first.
inline std::pair<LabeledPoint, LabeledPoint> sample_prototypes(const Dataset& clean,
                                                               PrototypeMode mode,
                                                               std::uint64_t seed,
                                                               bool swap_groups = false) {
  Rng rng(seed);
  auto pick = [&](auto&& pred, const char* what) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < clean.size(); ++i)
      if (pred(clean.points[i])) idx.push_back(i);
    if (idx.empty()) throw DataError(std::string("sample_prototypes: no points in ") + what);
    return clean.points[idx[rng.index(idx.size())]];
  };

  LabeledPoint pos, neg;
  if (mode == PrototypeMode::demographic) {
    const int adv = swap_groups ? 0 : 1;
    pos = pick([&](const LabeledPoint& p) { return p.z == adv; },
               swap_groups ? "the disadvantaged group" : "the advantaged group");
    neg = pick([&](const LabeledPoint& p) { return p.z == 1 - adv; },
               swap_groups ? "the advantaged group" : "the disadvantaged group");
    pos.y = 1;
    neg.y = -1;
  } else {
    pos = pick([](const LabeledPoint& p) { return p.y == 1; }, "class +1");
    neg = pick([](const LabeledPoint& p) { return p.y == -1; }, "class -1");
  }
  return {pos, neg};
}

/// Copy counts are inversely proportional to the clean class balance:
/// round(eps * |clean positives|) negative copies and round(eps * |clean
/// negatives|) positive copies, rounding half away from zero.
inline PoisonSet expand_copies(const LabeledPoint& proto_pos, const LabeledPoint& proto_neg,
                               const GroupClassCounts& clean_counts, double epsilon) {
  if (!(epsilon > 0.0)) throw DataError("expand_copies: epsilon must be positive");
  PoisonSet ps;
  ps.prototype_pos = proto_pos;
  ps.prototype_neg = proto_neg;
  ps.count_neg = static_cast<std::size_t>(
      std::llround(epsilon * static_cast<double>(clean_counts.n_pos)));
  ps.count_pos = static_cast<std::size_t>(
      std::llround(epsilon * static_cast<double>(clean_counts.n_neg)));
  if (ps.count_pos + ps.count_neg == 0)
    throw DataError("expand_copies: epsilon yields zero poison points; increase epsilon");
  ps.expanded.reserve(ps.count_pos + ps.count_neg);
  for (std::size_t i = 0; i < ps.count_pos; ++i) ps.expanded.push_back(proto_pos);
  for (std::size_t i = 0; i < ps.count_neg; ++i) ps.expanded.push_back(proto_neg);
  return ps;
}

namespace detail {
inline void refresh_copies(PoisonSet& ps) {
  ps.expanded.clear();
  for (std::size_t i = 0; i < ps.count_pos; ++i) ps.expanded.push_back(*ps.prototype_pos);
  for (std::size_t i = 0; i < ps.count_neg; ++i) ps.expanded.push_back(*ps.prototype_neg);
}
}  // namespace detail

/// Implicit gradient of the adversarial loss in a prototype's features, up to
/// the sign and step size applied by the engine: with v = H^-1 g, returns
/// v' d2l(theta; x, y)/(dtheta dx) evaluated at the prototype.
inline Eigen::VectorXd influence_direction(const ModelParams& params, const Eigen::VectorXd& v,
                                           const LabeledPoint& proto, double h) {
  const Eigen::Index d = params.w.size();
  if (v.size() != d + 1) throw DataError("influence_direction: v must have dimension d+1");
  const double margin = proto.y * signed_distance(params, proto.x);
  const Hinge hg = smoothed_hinge(margin, h);
  const Eigen::VectorXd vw = v.head(d);
  const double vb = v[d];
  return hg.d1 * proto.y * vw + hg.d2 * (vw.dot(proto.x) + vb) * params.w;
}

// ---------------------------------------------------------------------------
// Influence attack engine
// ---------------------------------------------------------------------------

/// Runs the influence loop from an already-built poison set (prototypes
/// required). Exposed so callers can force a particular prototype draw; most
/// uses go through influence_attack below.
inline AttackResult influence_attack_from(const Dataset& clean, const Dataset& test,
                                          LossKind kind, PoisonSet poison,
                                          const AttackConfig& cfg) {
  if (!poison.prototype_pos || !poison.prototype_neg)
    throw DataError("influence_attack_from: poison set lacks prototypes");
  if (cfg.eta < 0.0) throw DataError("influence_attack_from: eta must be nonnegative");
  if (cfg.lambda < 0.0) throw DataError("influence_attack_from: lambda must be nonnegative");
  if (test.points.empty()) throw DataError("influence_attack_from: empty test set");

  const double h = cfg.train.smoothing;
  const int iters = std::max(1, cfg.max_iters);
  const int patience = std::max(1, cfg.patience);

  // Enforce the feasibility constraint on the initial copies before the
  // first training pass.
  FeasibleSet fs = fit_feasible(concat(clean, poison.expanded), cfg.defense_q, cfg.slab_enabled);
  poison.prototype_pos = project(fs, *poison.prototype_pos);
  poison.prototype_neg = project(fs, *poison.prototype_neg);
  detail::refresh_copies(poison);

  AttackResult res;
  struct Snapshot {
    PoisonSet poison;
    ModelParams model;
    bool model_converged = true;
    FeasibleSet feasible;
    std::size_t iteration = 0;
  } best;
  double best_l = 0.0;
  bool have_best = false;
  int stall = 0;

  for (int t = 1; t <= iters; ++t) {
    const Dataset training = concat(clean, poison.expanded);
    const TrainResult tr = train(training, cfg.train, derive_seed(cfg.seed, "train", t));
    res.all_trainings_converged = res.all_trainings_converged && tr.converged;

    const double l_adv = adversarial_loss(kind, tr.params, test, cfg.lambda, h);
    const MetricReport met = evaluate_metrics(tr.params, test);
    res.trajectory.push_back({l_adv, met.spd, met.eod, met.test_error});
    res.iterations_run = static_cast<std::size_t>(t);

    if (!have_best) {
      stall = 0;
    } else {
      const double rel = (l_adv - best_l) / std::max(std::abs(best_l), 1e-12);
      stall = rel < cfg.stop_tol ? stall + 1 : 0;
    }
    if (!have_best || l_adv > best_l) {
      best = {poison, tr.params, tr.converged, fs, static_cast<std::size_t>(t)};
      best_l = l_adv;
      have_best = true;
    }
    if (stall >= patience) {
      res.converged = true;
      break;
    }
    if (t == iters) break;

    // One implicit-gradient step on each prototype, then the projection that
    // keeps the poison inside the current acceptance region.
    const LossDerivatives deriv = train_derivatives(tr.params, training, cfg.train);
    const Eigen::VectorXd g = adversarial_loss_gradient(kind, tr.params, test, cfg.lambda, h);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(deriv.hessian);
    const Eigen::VectorXd v = ldlt.solve(g);
    const Eigen::VectorXd diag = ldlt.vectorD().cwiseAbs();
    const double dmax = diag.maxCoeff();
    const double dmin = diag.minCoeff();
    res.hessian_condition_estimate =
        std::max(res.hessian_condition_estimate,
                 dmin > 0.0 ? dmax / dmin : std::numeric_limits<double>::infinity());

    LabeledPoint pos = *poison.prototype_pos;
    LabeledPoint neg = *poison.prototype_neg;
    pos.x -= cfg.eta * influence_direction(tr.params, v, pos, h);
    neg.x -= cfg.eta * influence_direction(tr.params, v, neg, h);
    poison.prototype_pos = project(fs, pos);
    poison.prototype_neg = project(fs, neg);
    detail::refresh_copies(poison);

    fs = fit_feasible(concat(clean, poison.expanded), cfg.defense_q, cfg.slab_enabled);
  }

  res.poison = std::move(best.poison);
  res.final_model = std::move(best.model);
  res.final_model_converged = best.model_converged;
  res.feasible = std::move(best.feasible);
  res.best_l_adv = best_l;
  res.best_iteration = best.iteration;
  return res;
}

/// Influence attack: prototype sampling per the loss kind (demographic for
/// iaf and solans, plain for koh), copy expansion, then the engine loop.
inline AttackResult influence_attack(const Dataset& clean, const Dataset& test, LossKind kind,
                                     const AttackConfig& cfg) {
  const GroupClassCounts counts = partition_counts(clean);
  if (kind == LossKind::koh) {
    if (counts.n_pos == 0 || counts.n_neg == 0)
      throw DataError("influence_attack: both labels must be present in the clean data");
  } else if (!attack_eligible(counts)) {
    throw DataError("influence_attack: clean data must populate all four (label, group) cells");
  }
  const PrototypeMode mode =
      kind == LossKind::koh ? PrototypeMode::plain : PrototypeMode::demographic;
  auto [proto_pos, proto_neg] =
      sample_prototypes(clean, mode, derive_seed(cfg.seed, "prototypes"), cfg.swap_groups);
  PoisonSet poison = expand_copies(proto_pos, proto_neg, counts, cfg.epsilon);
  return influence_attack_from(clean, test, kind, std::move(poison), cfg);
}

// ---------------------------------------------------------------------------
// Anchoring attack
// ---------------------------------------------------------------------------

inline LabeledPoint select_target_random(const Dataset& clean, int group, int label,
                                         std::uint64_t seed) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < clean.size(); ++i)
    if (clean.points[i].z == group && clean.points[i].y == label) idx.push_back(i);
  if (idx.empty())
    throw DataError("select_target_random: no points with group " + std::to_string(group) +
                    " and label " + std::to_string(label));
  Rng rng(seed);
  return clean.points[idx[rng.index(idx.size())]];
}

/// Picks the cell point with the most same-cell neighbors strictly inside
/// radius sigma; ties go to the lowest dataset index.
inline LabeledPoint select_target_popular(const Dataset& clean, int group, int label,
                                          double sigma) {
  if (!(sigma > 0.0)) throw DataError("select_target_popular: sigma must be positive");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < clean.size(); ++i)
    if (clean.points[i].z == group && clean.points[i].y == label) idx.push_back(i);
  if (idx.empty())
    throw DataError("select_target_popular: no points with group " + std::to_string(group) +
                    " and label " + std::to_string(label));

  std::size_t best = idx.front();
  std::size_t best_count = 0;
  bool first = true;
  for (const std::size_t i : idx) {
    std::size_t count = 0;
    for (const std::size_t j : idx) {
      if (j == i) continue;
      if ((clean.points[j].x - clean.points[i].x).norm() < sigma) ++count;
    }
    if (first || count > best_count) {
      best = i;
      best_count = count;
      first = false;
    }
  }
  return clean.points[best];
}

namespace detail {
/// Uniform draw from the closed tau-ball around `center` (exact copy when
/// tau is zero): normalized Gaussian direction times tau * u^(1/d).
inline Eigen::VectorXd ball_point(Rng& rng, const Eigen::VectorXd& center, double tau) {
  if (tau <= 0.0) return center;
  const Eigen::Index d = center.size();
  Eigen::VectorXd dir(d);
  double norm = 0.0;
  do {
    for (Eigen::Index j = 0; j < d; ++j) dir[j] = rng.normal();
    norm = dir.norm();
  } while (norm == 0.0);
  const double radius = tau * std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
  return center + dir * (radius / norm);
}
}  // namespace detail

/// Anchoring attack: per trial, pick a negative target in the advantaged
/// group and a positive target in the disadvantaged group (uniformly or by
/// popularity), surround each with opposite-label poison of the target's
/// group inside the tau-ball, project through the fitted acceptance region,
/// retrain and score. With several trials the one with the highest test-split
/// SPD wins; the trajectory records every trial.
inline AttackResult anchoring_attack(const Dataset& clean, const Dataset& test, AnchorMode mode,
                                     const AttackConfig& cfg) {
  if (cfg.tau < 0.0) throw DataError("anchoring_attack: tau must be nonnegative");
  const GroupClassCounts counts = partition_counts(clean);
  const int adv = cfg.swap_groups ? 0 : 1;

  const auto n_pos = static_cast<std::size_t>(
      std::llround(cfg.epsilon * static_cast<double>(counts.n_neg)));
  const auto n_neg = static_cast<std::size_t>(
      std::llround(cfg.epsilon * static_cast<double>(counts.n_pos)));
  if (!(cfg.epsilon > 0.0)) throw DataError("anchoring_attack: epsilon must be positive");
  if (n_pos + n_neg == 0)
    throw DataError("anchoring_attack: epsilon yields zero poison points; increase epsilon");

  const double h = cfg.train.smoothing;
  const int trials = std::max(1, cfg.max_iters);

  AttackResult res;
  struct Snapshot {
    PoisonSet poison;
    ModelParams model;
    bool model_converged = true;
    FeasibleSet feasible;
    std::size_t iteration = 0;
    double spd = 0.0;
  } best;
  bool have_best = false;

  for (int trial = 1; trial <= trials; ++trial) {
    const std::uint64_t tseed = derive_seed(cfg.seed, "anchor-trial", static_cast<std::uint64_t>(trial));
    const LabeledPoint target_neg =
        mode == AnchorMode::random
            ? select_target_random(clean, adv, -1, derive_seed(tseed, "target-neg"))
            : select_target_popular(clean, adv, -1, cfg.sigma);
    const LabeledPoint target_pos =
        mode == AnchorMode::random
            ? select_target_random(clean, 1 - adv, 1, derive_seed(tseed, "target-pos"))
            : select_target_popular(clean, 1 - adv, 1, cfg.sigma);

    PoisonSet poison;
    poison.target_neg = target_neg;
    poison.target_pos = target_pos;
    poison.count_pos = n_pos;
    poison.count_neg = n_neg;

    Rng cloud(derive_seed(tseed, "cloud"));
    poison.pre_projection.reserve(n_pos + n_neg);
    for (std::size_t i = 0; i < n_pos; ++i) {
      LabeledPoint p;
      p.x = detail::ball_point(cloud, target_neg.x, cfg.tau);
      p.y = 1;
      p.z = target_neg.z;
      poison.pre_projection.push_back(std::move(p));
    }
    for (std::size_t i = 0; i < n_neg; ++i) {
      LabeledPoint p;
      p.x = detail::ball_point(cloud, target_pos.x, cfg.tau);
      p.y = -1;
      p.z = target_pos.z;
      poison.pre_projection.push_back(std::move(p));
    }

    FeasibleSet fs =
        fit_feasible(concat(clean, poison.pre_projection), cfg.defense_q, cfg.slab_enabled);
    poison.expanded.reserve(poison.pre_projection.size());
    for (const auto& p : poison.pre_projection) poison.expanded.push_back(project(fs, p));

    const TrainResult tr = train(concat(clean, poison.expanded), cfg.train,
                                 derive_seed(tseed, "train"));
    res.all_trainings_converged = res.all_trainings_converged && tr.converged;
    const MetricReport met = evaluate_metrics(tr.params, test);
    const double l_acc = mean_hinge_loss(tr.params, test, h);
    res.trajectory.push_back({l_acc, met.spd, met.eod, met.test_error});
    res.iterations_run = static_cast<std::size_t>(trial);

    if (!have_best || met.spd > best.spd) {
      best = {std::move(poison), tr.params, tr.converged, std::move(fs),
              static_cast<std::size_t>(trial), met.spd};
      have_best = true;
    }
  }

  res.poison = std::move(best.poison);
  res.final_model = std::move(best.model);
  res.final_model_converged = best.model_converged;
  res.feasible = std::move(best.feasible);
  res.converged = true;
  res.best_l_adv = res.trajectory[best.iteration - 1].l_adv;
  res.best_iteration = best.iteration;
  return res;
}

}  // namespace fairpoison
