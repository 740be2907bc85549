#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "css/random.hpp"
#include "css/types.hpp"

namespace css {

// Finite-support data distribution with analytically known truth. Each point
// carries the classifier score, the conditional qualification probability,
// the sampling weight, and an optional group key.
struct SupportPoint {
  double score = 0.0;
  double qualified_prob = 0.0;
  double weight = 0.0;
  std::string group;
};

struct DiscreteWorld {
  std::vector<SupportPoint> support;

  void validate() const;
  double qualified_rate() const;
};

// Exact qualified mass above a threshold: sum_j w_j q_j 1{s_j >= t}.
double true_delta(const DiscreteWorld& world, double t);

// Exact selection mass above a threshold: sum_j w_j 1{s_j >= t}.
double true_tail_mass(const DiscreteWorld& world, double t);

CalibrationSet sample_calibration(const DiscreteWorld& world, std::size_t n, RandomSource& rng);
Pool sample_pool(const DiscreteWorld& world, std::size_t m, RandomSource& rng);

// Synthetic screening world: a candidate's latent qualification probability p
// is Beta(1,4) (mean 0.2), the label is Bernoulli(p), and the observed score
// is p with probability 1 - noise_ratio or an independent Beta(1,4) draw
// otherwise. The score marginal is Beta(1,4) for every noise ratio. Optional
// groups carry their own weight and noise ratio.
struct WorldGroup {
  std::string name;
  double weight = 1.0;
  double noise_ratio = 0.0;
};

struct NoisyClassifierWorld {
  double noise_ratio = 0.0;
  std::vector<WorldGroup> groups;  // empty = single ungrouped population

  void validate() const;
};

// Analytic delta_{t,1} for the noisy world (mixture over groups):
//   (1-r) [(1-t)^4 - 0.8 (1-t)^5] + 0.2 r (1-t)^4.
double true_delta(const NoisyClassifierWorld& world, double t);

// Analytic unconditional qualified mass above t contributed by one group,
// i.e. E[Y 1{f >= t} 1{G = g}]. Divide by the group weight for the
// conditional curve.
double true_delta_group(const NoisyClassifierWorld& world, const std::string& group, double t);

CalibrationSet sample_calibration(const NoisyClassifierWorld& world, std::size_t n,
                                  RandomSource& rng);
Pool sample_pool(const NoisyClassifierWorld& world, std::size_t m, RandomSource& rng);

// Inverse-CDF Beta(1,4) sampler used throughout: p = 1 - u^(1/4), computed as
// two square roots so the result is correctly rounded and platform-stable.
double beta14_from_uniform(double u);

// Two-point world where only the omniscient classifier screens well: scores
// {1, k/m} with qualification probabilities {1, k/m}, plus the two adversarial
// pools (all high-type, all low-type) and the closed-form gap lower bounds.
struct ImpossibilityWorld {
  DiscreteWorld world;
  Pool pool_all_high;
  Pool pool_all_low;
  double k = 0.0;
  std::size_t m = 0;
  double size_gap_bound = 0.0;     // (m - k) / 2
  double quality_gap_bound = 0.0;  // (k/2) (1 - k/m)
};

ImpossibilityWorld impossibility_world(double k, std::size_t m);

// Gaps achieved by the constant marginally calibrated predictor against the
// omniscient rule on the two canonical pools.
struct ImpossibilityDiagnostic {
  double constant_prediction = 0.0;
  double measured_size_gap = 0.0;     // max over the two pools
  double measured_quality_gap = 0.0;  // max over the two pools
  double size_gap_bound = 0.0;
  double quality_gap_bound = 0.0;
};

ImpossibilityDiagnostic impossibility_diagnostic(const ImpossibilityWorld& iw);

}  // namespace css
