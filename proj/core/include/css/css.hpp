#pragma once

#include "css/bounds.hpp"
#include "css/policies.hpp"
#include "css/types.hpp"

namespace css {

// Sentinel threshold above every admissible score, used for infeasible results.
inline constexpr double kInfeasibleThreshold = 2.0;

// Output of the calibrated subset selection threshold search.
struct CssResult {
  double threshold = kInfeasibleThreshold;
  double epsilon_used = 0.0;
  double delta_at_threshold = 0.0;  // empirical qualified mass at the threshold
  bool feasible = false;
  GuaranteeConfig guarantee;

  ThresholdPolicy policy() const { return ThresholdPolicy{threshold}; }
};

// Largest threshold whose empirical lower bound on the expected number of
// qualified candidates still clears k:
//   t_hat = sup{t in [0,1] : delta_hat(t) >= k/m + epsilon(alpha, n)}.
// The sup is realized at a calibration score (the empirical curve only steps
// there), so the scan over distinct scores is exact. Infeasibility is a
// result state, not an error: the caller must be told the pool cannot be
// expected to contain k qualified candidates.
CssResult css_threshold(const CalibrationSet& cal, const GuaranteeConfig& cfg);

// Same contract with the expected pool size E[M] in place of the fixed m.
CssResult css_threshold_dynamic(const CalibrationSet& cal, double k, double expected_m,
                                double alpha);

// Deterministic application: decisions[i] = 1 iff scores[i] >= threshold.
// An infeasible result yields the all-zero shortlist.
Shortlist css_shortlist(const CssResult& result, const Pool& pool);

}  // namespace css
