#include "css/css.hpp"

namespace css {

CssResult css_threshold(const CalibrationSet& cal, const GuaranteeConfig& cfg) {
  cfg.validate();

  CssResult result;
  result.guarantee = cfg;
  result.epsilon_used = epsilon(cfg.alpha, cal.size());

  const double requirement = cfg.k / cfg.pool_size + result.epsilon_used;
  const DeltaCurve curve = delta_curve(cal);

  // values() is non-increasing over ascending breakpoints, so the feasible
  // region is a prefix; take the last breakpoint still inside it.
  const auto& values = curve.values();
  if (values.front() < requirement) {
    result.threshold = kInfeasibleThreshold;
    result.delta_at_threshold = 0.0;
    result.feasible = false;
    return result;
  }
  std::size_t lo = 0;
  std::size_t hi = values.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi + 1) / 2;
    if (values[mid] >= requirement) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  result.threshold = curve.breakpoints()[lo];
  result.delta_at_threshold = values[lo];
  result.feasible = true;
  return result;
}

CssResult css_threshold_dynamic(const CalibrationSet& cal, double k, double expected_m,
                                double alpha) {
  GuaranteeConfig cfg;
  cfg.k = k;
  cfg.pool_size = expected_m;
  cfg.alpha = alpha;
  return css_threshold(cal, cfg);
}

Shortlist css_shortlist(const CssResult& result, const Pool& pool) {
  return apply(result.policy(), pool);
}

}  // namespace css
