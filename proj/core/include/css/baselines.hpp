#pragma once

#include <vector>

#include "css/bounds.hpp"
#include "css/policies.hpp"
#include "css/types.hpp"

namespace css {

// Sigmoid recalibration map sigma(slope * s + intercept), fit by regularized
// maximum likelihood against Platt-smoothed targets, which keeps the
// parameters finite even on separable data.
struct PlattModel {
  double slope = 0.0;
  double intercept = 0.0;
  bool degenerate = false;  // constant-score or single-class input

  double map(double score) const;
};

// Piecewise-constant right-continuous monotone fit from pool-adjacent
// violators. Queries outside the breakpoint range clamp to the end values.
struct IsotonicModel {
  std::vector<double> breakpoints;  // distinct scores, ascending
  std::vector<double> values;       // non-decreasing fitted probabilities

  double map(double score) const;
};

// A baseline decision rule plus the select-all fallback marker. Baselines
// carry no distribution-free guarantee; when their mass falls short of k they
// flag the run and select everyone so the metrics stay defined.
struct BaselineRule {
  RandomizedTiePolicy policy;
  bool select_all_fallback = false;
};

// The omniscient decision rule applied to raw pool scores as if they were
// true qualification probabilities.
BaselineRule uncalibrated_rule(const Pool& pool, double k);

// Newton fit of (slope, intercept); converges when the gradient infinity-norm
// drops below 1e-10 or after 100 iterations. Degenerate inputs (all scores
// identical, or a single label class) return slope 0 and the smoothed-rate
// intercept, flagged.
PlattModel platt_fit(const CalibrationSet& cal);

// Uncalibrated rule over Platt-mapped scores. The returned policy lives in
// the calibrated-score space: apply it to a pool mapped through the model.
BaselineRule platt_rule(const PlattModel& model, const Pool& pool, double k);

Pool map_pool(const PlattModel& model, const Pool& pool);

IsotonicModel isotonic_fit(const CalibrationSet& cal);

// Two readings of the isotonic screening baseline. PerExample aggregates the
// PAV-calibrated per-example probabilities into the cumulative curve
//   h(t) = (1/n) sum_i g(s_i) 1{s_i >= t};
// DeltaCurveDirect reads the calibrated regression model as the empirical
// qualified-mass curve itself, which collapses to threshold selection on
// delta_hat without the confidence margin.
enum class IsotonicVariant { PerExample, DeltaCurveDirect };

struct IsotonicRule {
  ThresholdPolicy policy;
  bool select_all_fallback = false;
};

// Largest threshold t with m * h(t) >= k, scanned over the calibration
// scores. Falls back to select-all (threshold 0) when even the full mass is
// short.
IsotonicRule isotonic_rule(const IsotonicModel& model, const CalibrationSet& cal, double k,
                           double m, IsotonicVariant variant = IsotonicVariant::PerExample);

// Monotone (non-increasing) score transform s -> delta_hat(s). Composed with
// the classifier it yields an approximately average-calibrated regression
// model.
class AvgCalibratedMap {
 public:
  explicit AvgCalibratedMap(DeltaCurve curve) : curve_(std::move(curve)) {}
  double operator()(double score) const { return curve_.value_at(score); }
  const DeltaCurve& curve() const { return curve_; }

 private:
  DeltaCurve curve_;
};

AvgCalibratedMap avg_calibrated_map(const CalibrationSet& cal);

}  // namespace css
