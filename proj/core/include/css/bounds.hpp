#pragma once

#include <cstddef>
#include <vector>

#include "css/types.hpp"

namespace css {

// DKWM uniform deviation bound: epsilon(alpha, n) = sqrt(ln(2/alpha) / (2n)).
// Valid simultaneously for all thresholds t.
double epsilon(double alpha, std::size_t n);

// Exact step function of the empirical qualified mass above a threshold,
//   delta_hat(t) = (1/n) * sum_i 1{score_i >= t} * label_i.
// Piecewise constant with left-open/right-closed pieces between the distinct
// calibration scores: value(t) = values()[j] for t in (breakpoint[j-1],
// breakpoint[j]], value_at_zero() at t = 0, and 0 above the largest score.
class DeltaCurve {
 public:
  static DeltaCurve from_calibration(const CalibrationSet& cal);

  double value_at(double t) const;
  double value_at_zero() const { return value_at_zero_; }

  // Distinct calibration scores, ascending.
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  // values()[j] = delta_hat on (breakpoints()[j-1], breakpoints()[j]].
  const std::vector<double>& values() const { return values_; }

  std::size_t n() const { return n_; }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  double value_at_zero_ = 0.0;
  std::size_t n_ = 0;
};

inline DeltaCurve delta_curve(const CalibrationSet& cal) {
  return DeltaCurve::from_calibration(cal);
}

// Per-bin empirical label mass over a fixed score partition. Edges descend
// from 1 to 0; bin b (1-indexed) covers [edges[b], edges[b-1]) except the top
// bin, which also contains score = 1. Equivalently, an example joins the
// highest bin whose lower edge is <= its score.
struct BinModel {
  std::vector<double> edges;        // size B+1, strictly descending, 1 ... 0
  std::vector<double> deltas;       // size B, delta_hat_b
  std::vector<std::size_t> counts;  // size B, examples per bin

  std::size_t bins() const { return deltas.size(); }
  std::size_t n() const;
  // 1-indexed bin id for a score in [0,1].
  std::size_t bin_of(double score) const;
};

BinModel bin_deltas(const CalibrationSet& cal, std::vector<double> edges);

// Bernstein worst-case lower bound on the realized number of qualified
// shortlisted candidates:
//   k - (1/3) ln(1/alpha2) - (1/3) sqrt(ln^2(1/alpha2) + 18 k ln(1/alpha2)).
// Returned raw (possibly negative); the stated admissible range
// alpha2 in (exp(-9k/4), 1) is a warning, not an error.
double worst_case_bound(double k, double alpha2);

// Reporting convenience: the bound clamped at zero.
double worst_case_bound_clamped(double k, double alpha2);

// True when alpha2 lies outside the admissible range of the bound.
bool worst_case_bound_out_of_range(double k, double alpha2);

// Smallest k such that worst_case_bound(k, alpha2) >= k_worst, found by
// monotone bisection to absolute tolerance 1e-9.
double solve_k_for_worst_case(double k_worst, double alpha2);

}  // namespace css
