#pragma once

#include <cmath>
#include <string>

#include "fairpoison/errors.hpp"
#include "fairpoison/linmodel.hpp"
#include "fairpoison/types.hpp"

namespace fairpoison {

struct GroupRates {
  double pos_rate_adv = 0.0;  // P(pred=+1 | z=1)
  double pos_rate_dis = 0.0;  // P(pred=+1 | z=0)
  double tpr_adv = 0.0;       // P(pred=+1 | z=1, y=+1)
  double tpr_dis = 0.0;       // P(pred=+1 | z=0, y=+1)
};

struct MetricReport {
  double spd = 0.0;
  double eod = 0.0;
  double test_error = 0.0;
  GroupRates rates;
};

namespace detail {
struct MetricCounts {
  std::size_t adv = 0, dis = 0;
  std::size_t adv_pred_pos = 0, dis_pred_pos = 0;
  std::size_t adv_label_pos = 0, dis_label_pos = 0;
  std::size_t adv_true_pos = 0, dis_true_pos = 0;
  std::size_t wrong = 0, total = 0;
};

inline MetricCounts count_predictions(const ModelParams& params, const Dataset& dataset) {
  MetricCounts c;
  for (const auto& p : dataset.points) {
    const int pred = predict(params, p.x);
    ++c.total;
    if (pred != p.y) ++c.wrong;
    if (p.z == 1) {
      ++c.adv;
      if (pred == 1) ++c.adv_pred_pos;
      if (p.y == 1) {
        ++c.adv_label_pos;
        if (pred == 1) ++c.adv_true_pos;
      }
    } else {
      ++c.dis;
      if (pred == 1) ++c.dis_pred_pos;
      if (p.y == 1) {
        ++c.dis_label_pos;
        if (pred == 1) ++c.dis_true_pos;
      }
    }
  }
  return c;
}
}  // namespace detail

/// |P(pred=+1 | advantaged) - P(pred=+1 | disadvantaged)| by exact counting.
inline double statistical_parity_difference(const ModelParams& params, const Dataset& dataset) {
  const auto c = detail::count_predictions(params, dataset);
  if (c.adv == 0) throw DataError("statistical_parity_difference: advantaged group (z=1) is empty");
  if (c.dis == 0) throw DataError("statistical_parity_difference: disadvantaged group (z=0) is empty");
  return std::abs(static_cast<double>(c.adv_pred_pos) / static_cast<double>(c.adv) -
                  static_cast<double>(c.dis_pred_pos) / static_cast<double>(c.dis));
}

/// |TPR(advantaged) - TPR(disadvantaged)| by exact counting.
inline double equal_opportunity_difference(const ModelParams& params, const Dataset& dataset) {
  const auto c = detail::count_predictions(params, dataset);
  if (c.adv_label_pos == 0)
    throw DataError("equal_opportunity_difference: advantaged group (z=1) has no positive-label points");
  if (c.dis_label_pos == 0)
    throw DataError("equal_opportunity_difference: disadvantaged group (z=0) has no positive-label points");
  return std::abs(static_cast<double>(c.adv_true_pos) / static_cast<double>(c.adv_label_pos) -
                  static_cast<double>(c.dis_true_pos) / static_cast<double>(c.dis_label_pos));
}

inline double test_error(const ModelParams& params, const Dataset& dataset) {
  if (dataset.points.empty()) throw DataError("test_error: empty dataset");
  const auto c = detail::count_predictions(params, dataset);
  return static_cast<double>(c.wrong) / static_cast<double>(c.total);
}

/// All three measures plus the underlying group rates in one pass.
inline MetricReport evaluate_metrics(const ModelParams& params, const Dataset& dataset) {
  const auto c = detail::count_predictions(params, dataset);
  if (c.total == 0) throw DataError("evaluate_metrics: empty dataset");
  if (c.adv == 0) throw DataError("evaluate_metrics: advantaged group (z=1) is empty");
  if (c.dis == 0) throw DataError("evaluate_metrics: disadvantaged group (z=0) is empty");
  if (c.adv_label_pos == 0)
    throw DataError("evaluate_metrics: advantaged group (z=1) has no positive-label points");
  if (c.dis_label_pos == 0)
    throw DataError("evaluate_metrics: disadvantaged group (z=0) has no positive-label points");

  MetricReport r;
  r.rates.pos_rate_adv = static_cast<double>(c.adv_pred_pos) / static_cast<double>(c.adv);
  r.rates.pos_rate_dis = static_cast<double>(c.dis_pred_pos) / static_cast<double>(c.dis);
  r.rates.tpr_adv = static_cast<double>(c.adv_true_pos) / static_cast<double>(c.adv_label_pos);
  r.rates.tpr_dis = static_cast<double>(c.dis_true_pos) / static_cast<double>(c.dis_label_pos);
  r.spd = std::abs(r.rates.pos_rate_adv - r.rates.pos_rate_dis);
  r.eod = std::abs(r.rates.tpr_adv - r.rates.tpr_dis);
  r.test_error = static_cast<double>(c.wrong) / static_cast<double>(c.total);
  return r;
}

}  // namespace fairpoison
