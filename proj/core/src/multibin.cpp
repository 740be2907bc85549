#include "css/multibin.hpp"

#include <algorithm>
#include <cmath>

#include "css/css.hpp"

namespace css {

std::vector<double> umb_edges(const CalibrationSet& cal, std::size_t bins) {
  const std::size_t n = cal.size();
  if (bins < 1) throw BadParams("bin count must be >= 1");
  if (bins > n) throw TooManyBins(bins, n);

  const auto& examples = cal.examples();  // descending scores
  std::vector<double> edges;
  edges.push_back(1.0);
  for (std::size_t b = 1; b < bins; ++b) {
    // ceil(b * n / bins)-th largest score, 1-indexed.
    const std::size_t rank = (b * n + bins - 1) / bins;
    const double edge = examples[rank - 1].score;
    // Ties across a boundary collapse edges; skip duplicates so the list
    // stays strictly descending (effective bin count shrinks).
    if (edge < edges.back() && edge > 0.0) edges.push_back(edge);
  }
  edges.push_back(0.0);
  return edges;
}

namespace {

struct CutoffScan {
  std::size_t cutoff = 0;  // 1-indexed; 0 = infeasible
  double below_cutoff_sum = 0.0;
  double cutoff_term = 0.0;
};

CutoffScan scan_cutoff(const BinModel& bins, const GuaranteeConfig& cfg) {
  const double eps2 = 2.0 * epsilon(cfg.alpha, bins.n());
  const double target = cfg.k / cfg.pool_size;
  CutoffScan scan;
  double cum = 0.0;
  for (std::size_t b = 1; b <= bins.bins(); ++b) {
    const double term = bins.deltas[b - 1] - eps2;
    if (cum + term >= target) {
      scan.cutoff = b;
      scan.below_cutoff_sum = cum;
      scan.cutoff_term = term;
      return scan;
    }
    cum += term;
  }
  return scan;
}

}  // namespace

BinRandomizedPolicy multibin_policy(const BinModel& bins, const GuaranteeConfig& cfg) {
  cfg.validate();
  if (bins.bins() == 0) throw EmptyInput("bin model has no bins");

  BinRandomizedPolicy policy;
  policy.bins = bins;

  if (cfg.k == 0.0) {
    // Select nobody: cutoff at the top bin with zero probability.
    policy.cutoff_bin = 1;
    policy.last_bin_prob = 0.0;
    policy.feasible = true;
    return policy;
  }

  const auto scan = scan_cutoff(bins, cfg);
  if (scan.cutoff == 0) {
    policy.feasible = false;
    return policy;
  }

  const double target = cfg.k / cfg.pool_size;
  double theta = (target - scan.below_cutoff_sum) / scan.cutoff_term;
  std::size_t cutoff = scan.cutoff;
  if (theta >= 1.0) {
    // Equality through the cutoff bin: select it deterministically.
    if (cutoff < bins.bins()) {
      cutoff += 1;
      theta = 0.0;
    } else {
      policy.select_all = true;
      theta = 0.0;
    }
  }
  policy.cutoff_bin = cutoff;
  policy.last_bin_prob = theta;
  policy.feasible = true;
  return policy;
}

double multibin_deterministic_threshold(const BinModel& bins, const GuaranteeConfig& cfg) {
  cfg.validate();
  const double eps2 = 2.0 * epsilon(cfg.alpha, bins.n());
  const double target = cfg.k / cfg.pool_size;
  double cum = 0.0;
  for (std::size_t b = 1; b <= bins.bins(); ++b) {
    cum += bins.deltas[b - 1] - eps2;
    if (cum >= target) return bins.edges[b];  // lower edge of the last included bin
  }
  return kInfeasibleThreshold;
}

Shortlist multibin_shortlist(const BinRandomizedPolicy& policy, const Pool& pool,
                             RandomSource& rng) {
  return apply(policy, pool, rng);
}

}  // namespace css
