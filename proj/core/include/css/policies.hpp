#pragma once

#include <span>
#include <vector>

#include "css/bounds.hpp"
#include "css/random.hpp"
#include "css/types.hpp"
#include "css/worlds.hpp"

namespace css {

// Deterministic rule: select iff score >= threshold (weak boundary).
struct ThresholdPolicy {
  double threshold = 1.0;
};

// Randomized-tie rule: select iff score > threshold, and with probability
// tie_prob iff score == threshold. degenerate_empty marks the k = 0 policy,
// where the tie probability is 0/0 and represented as 0.
struct RandomizedTiePolicy {
  double threshold = 1.0;
  double tie_prob = 0.0;
  bool degenerate_empty = false;
};

// Bin-randomized rule over a fixed score partition: select every candidate in
// bins above cutoff_bin, candidates in cutoff_bin independently with
// last_bin_prob, none below. select_all covers the saturation edge where the
// constraint is met with equality through the last bin; feasible = false
// yields the empty shortlist.
struct BinRandomizedPolicy {
  BinModel bins;
  std::size_t cutoff_bin = 0;  // 1-indexed; 0 when infeasible
  double last_bin_prob = 0.0;  // in [0,1)
  bool select_all = false;
  bool feasible = false;
};

// Optimal randomized-threshold rule for known qualification probabilities
// (the omniscient decision rule):
//   t* = sup{t : sum 1{q_i >= t} q_i >= k},
//   theta* = (k - sum_{q_i > t*} q_i) / sum_{q_i = t*} q_i.
// The returned policy's expected selected qualified mass equals k exactly.
// Throws Infeasible when the total mass falls short of k.
RandomizedTiePolicy omniscient_rule(std::span<const double> probs, double k);

// Optimal rule for a perfectly calibrated classifier with bin values mu and
// bin masses rho on pools of m i.i.d. draws:
//   t_h = sup{mu : sum_b mu_b 1{mu_b >= mu} rho_b >= k/m},
//   theta_h = (k/m - sum_{mu_b > t_h} mu_b rho_b) / sum_{mu_b = t_h} mu_b rho_b.
RandomizedTiePolicy calibrated_bins_rule(std::span<const double> mus,
                                         std::span<const double> rhos, double k, double m);

Shortlist apply(const ThresholdPolicy& policy, const Pool& pool);
// rng-taking overload for uniformity with randomized policies; rng unused.
Shortlist apply(const ThresholdPolicy& policy, const Pool& pool, RandomSource& rng);
// Draws one uniform per boundary candidate (score == threshold), in pool order.
Shortlist apply(const RandomizedTiePolicy& policy, const Pool& pool, RandomSource& rng);
// Draws one uniform per candidate falling in the cutoff bin, in pool order.
Shortlist apply(const BinRandomizedPolicy& policy, const Pool& pool, RandomSource& rng);

// Analytic expected shortlist size on a discrete world scaled by pool size m:
//   m * sum_j w_j Pr(select | score s_j).
double expected_size(const ThresholdPolicy& policy, const DiscreteWorld& world, double m);
double expected_size(const RandomizedTiePolicy& policy, const DiscreteWorld& world, double m);
double expected_size(const BinRandomizedPolicy& policy, const DiscreteWorld& world, double m);

// Analytic expected selected qualified mass, m * sum_j w_j q_j Pr(select | s_j).
double expected_qualified(const RandomizedTiePolicy& policy, const DiscreteWorld& world, double m);

}  // namespace css
