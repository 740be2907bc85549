#pragma once

#include <cstddef>
#include <vector>

#include "css/bounds.hpp"
#include "css/policies.hpp"
#include "css/types.hpp"

namespace css {

// Uniform-mass bin edges: interior edge b is the score of the
// ceil(b * n / B)-th largest calibration example, deduplicated so the edges
// stay strictly descending (ties can shrink the effective bin count). Edges
// run 1 > t_1 > ... > 0.
std::vector<double> umb_edges(const CalibrationSet& cal, std::size_t bins);

// Bin-randomized screening rule over a fixed partition:
//   b_hat = inf{a : sum_{b <= a} (delta_hat_b - 2 eps) >= k/m},
//   theta_hat = (k/m - sum_{b < b_hat} (delta_hat_b - 2 eps)) /
//               (delta_hat_{b_hat} - 2 eps).
// eps uses the guarantee's alpha and the bin model's n. Infeasibility is a
// state on the returned policy, not an error. theta_hat lands in [0,1): a
// constraint met with equality through a bin selects that whole bin
// deterministically (cutoff moves down one bin, or select_all at the last).
BinRandomizedPolicy multibin_policy(const BinModel& bins, const GuaranteeConfig& cfg);

// Largest bin edge whose cumulative lower bound still clears k/m (the
// deterministic variant: the cutoff bin is taken with probability 1).
// Returns the infeasible sentinel threshold when no edge qualifies.
double multibin_deterministic_threshold(const BinModel& bins, const GuaranteeConfig& cfg);

// Select all candidates in bins above the cutoff, candidates in the cutoff
// bin independently with theta_hat, none below.
Shortlist multibin_shortlist(const BinRandomizedPolicy& policy, const Pool& pool,
                             RandomSource& rng);

}  // namespace css
