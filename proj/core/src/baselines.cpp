#include "css/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace css {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

BaselineRule select_all_rule() {
  BaselineRule rule;
  rule.policy.threshold = 0.0;
  rule.policy.tie_prob = 1.0;
  rule.policy.degenerate_empty = false;
  rule.select_all_fallback = true;
  return rule;
}

}  // namespace

double PlattModel::map(double score) const { return sigmoid(slope * score + intercept); }

BaselineRule uncalibrated_rule(const Pool& pool, double k) {
  try {
    return {omniscient_rule(pool.scores, k), false};
  } catch (const Infeasible&) {
    return select_all_rule();
  }
}

PlattModel platt_fit(const CalibrationSet& cal) {
  const auto& examples = cal.examples();
  const std::size_t n = examples.size();
  if (n < 2) throw EmptyInput("platt_fit needs at least two examples");

  std::size_t positives = 0;
  for (const auto& ex : examples) positives += static_cast<std::size_t>(ex.label);
  const std::size_t negatives = n - positives;

  // Platt-smoothed targets keep the likelihood bounded on separable data.
  const double target_pos = (static_cast<double>(positives) + 1.0) /
                            (static_cast<double>(positives) + 2.0);
  const double target_neg = 1.0 / (static_cast<double>(negatives) + 2.0);

  std::vector<double> targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    targets[i] = examples[i].label == 1 ? target_pos : target_neg;
  }

  const bool constant_scores =
      examples.front().score == examples.back().score;  // sorted, so ends suffice
  const bool single_class = positives == 0 || positives == n;
  if (constant_scores || single_class) {
    double mean_target = 0.0;
    for (double t : targets) mean_target += t;
    mean_target /= static_cast<double>(n);
    PlattModel model;
    model.slope = 0.0;
    model.intercept = logit(mean_target);
    model.degenerate = true;
    return model;
  }

  double a = 0.0;
  double b = logit((static_cast<double>(positives) + 1.0) / (static_cast<double>(n) + 2.0));
  for (int iter = 0; iter < 100; ++iter) {
    double ga = 0.0, gb = 0.0;
    double haa = 0.0, hab = 0.0, hbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = examples[i].score;
      const double p = sigmoid(a * s + b);
      const double err = p - targets[i];
      const double w = std::max(p * (1.0 - p), 1e-12);
      ga += err * s;
      gb += err;
      haa += w * s * s;
      hab += w * s;
      hbb += w;
    }
    if (std::max(std::abs(ga), std::abs(gb)) < 1e-10) break;
    const double det = haa * hbb - hab * hab;
    double da, db;
    if (std::abs(det) > 1e-300) {
      da = (hbb * ga - hab * gb) / det;
      db = (haa * gb - hab * ga) / det;
    } else {
      da = ga / std::max(haa, 1e-12);
      db = gb / std::max(hbb, 1e-12);
    }
    a -= da;
    b -= db;
  }

  PlattModel model;
  model.slope = a;
  model.intercept = b;
  return model;
}

Pool map_pool(const PlattModel& model, const Pool& pool) {
  Pool mapped = pool;
  for (auto& s : mapped.scores) s = model.map(s);
  return mapped;
}

BaselineRule platt_rule(const PlattModel& model, const Pool& pool, double k) {
  std::vector<double> mapped(pool.scores.size());
  for (std::size_t i = 0; i < mapped.size(); ++i) mapped[i] = model.map(pool.scores[i]);
  try {
    return {omniscient_rule(mapped, k), false};
  } catch (const Infeasible&) {
    return select_all_rule();
  }
}

double IsotonicModel::map(double score) const {
  if (breakpoints.empty()) return 0.0;
  if (score <= breakpoints.front()) return values.front();
  if (score >= breakpoints.back()) return values.back();
  // Right-continuous step: value of the largest breakpoint <= score.
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), score);
  return values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

IsotonicModel isotonic_fit(const CalibrationSet& cal) {
  const auto& examples = cal.examples();  // descending scores

  // Merge ties first so the fit is a single-valued function of the score,
  // then run weighted pool-adjacent violators on the ascending sequence.
  std::vector<double> xs, ys, ws;
  for (auto it = examples.rbegin(); it != examples.rend(); ++it) {
    if (!xs.empty() && xs.back() == it->score) {
      ys.back() += static_cast<double>(it->label);
      ws.back() += 1.0;
    } else {
      xs.push_back(it->score);
      ys.push_back(static_cast<double>(it->label));
      ws.push_back(1.0);
    }
  }
  for (std::size_t i = 0; i < ys.size(); ++i) ys[i] /= ws[i];

  // Blocks carry (mean, weight, rightmost index); violators merge leftward.
  std::vector<double> mean, weight;
  std::vector<std::size_t> right;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean.push_back(ys[i]);
    weight.push_back(ws[i]);
    right.push_back(i);
    while (mean.size() > 1 && mean[mean.size() - 2] >= mean.back()) {
      const double w = weight[weight.size() - 2] + weight.back();
      mean[mean.size() - 2] += (weight.back() / w) * (mean.back() - mean[mean.size() - 2]);
      weight[weight.size() - 2] = w;
      right[right.size() - 2] = right.back();
      mean.pop_back();
      weight.pop_back();
      right.pop_back();
    }
  }

  IsotonicModel model;
  model.breakpoints = std::move(xs);
  model.values.resize(model.breakpoints.size());
  std::size_t start = 0;
  for (std::size_t blk = 0; blk < mean.size(); ++blk) {
    for (std::size_t i = start; i <= right[blk]; ++i) model.values[i] = mean[blk];
    start = right[blk] + 1;
  }
  return model;
}

IsotonicRule isotonic_rule(const IsotonicModel& model, const CalibrationSet& cal, double k,
                           double m, IsotonicVariant variant) {
  if (!(m > 0.0)) throw BadParams("m must be positive");
  if (!(k >= 0.0)) throw BadParams("k must be non-negative");

  const auto& examples = cal.examples();  // descending scores
  const double n = static_cast<double>(examples.size());
  const double target = k / m;

  // Scan candidate thresholds (distinct calibration scores) from the top;
  // h(t) accumulates as the threshold drops.
  double h = 0.0;
  std::size_t i = 0;
  while (i < examples.size()) {
    const double s = examples[i].score;
    while (i < examples.size() && examples[i].score == s) {
      h += (variant == IsotonicVariant::PerExample
                ? model.map(examples[i].score)
                : static_cast<double>(examples[i].label)) /
           n;
      ++i;
    }
    if (h >= target) return {ThresholdPolicy{s}, false};
  }
  // Even the full mass falls short: flagged select-all.
  return {ThresholdPolicy{0.0}, true};
}

AvgCalibratedMap avg_calibrated_map(const CalibrationSet& cal) {
  return AvgCalibratedMap(delta_curve(cal));
}

}  // namespace css
