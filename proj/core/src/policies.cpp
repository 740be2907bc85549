#include "css/policies.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace css {

namespace {

constexpr double kRhoTolerance = 1e-12;

// Distinct levels in descending order with their aggregate masses. Exact
// double equality groups the levels: every candidate threshold is a member of
// the input, so no tolerance is involved.
struct Level {
  double value;
  double mass;   // sum of q (or mu * rho) at this level
  double count;  // number of entries (or rho mass) at this level
};

std::vector<Level> descending_levels(std::span<const double> values,
                                     std::span<const double> masses,
                                     std::span<const double> counts) {
  std::map<double, std::pair<double, double>, std::greater<double>> grouped;
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto& slot = grouped[values[i]];
    slot.first += masses[i];
    slot.second += counts[i];
  }
  std::vector<Level> levels;
  levels.reserve(grouped.size());
  for (const auto& [v, mc] : grouped) levels.push_back({v, mc.first, mc.second});
  return levels;
}

RandomizedTiePolicy empty_policy() {
  RandomizedTiePolicy policy;
  policy.threshold = 1.0;
  policy.tie_prob = 0.0;
  policy.degenerate_empty = true;
  return policy;
}

}  // namespace

RandomizedTiePolicy omniscient_rule(std::span<const double> probs, double k) {
  if (!(k >= 0.0)) throw BadParams("k must be non-negative");
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0 && probs[i] <= 1.0)) throw ScoreOutOfRange(i, probs[i]);
  }
  if (k == 0.0) return empty_policy();

  std::vector<double> ones(probs.size(), 1.0);
  const auto levels = descending_levels(probs, probs, ones);

  double total = 0.0;
  for (const auto& lvl : levels) total += lvl.mass;
  if (total < k) throw Infeasible(total);

  double above = 0.0;
  for (const auto& lvl : levels) {
    if (lvl.mass == 0.0) continue;  // zero-probability candidates carry no mass
    if (above + lvl.mass >= k) {
      RandomizedTiePolicy policy;
      policy.threshold = lvl.value;
      policy.tie_prob = (k - above) / lvl.mass;
      return policy;
    }
    above += lvl.mass;
  }
  // Floating accumulation placed the total just below k; the final positive
  // level absorbs the residual.
  throw Infeasible(total);
}

RandomizedTiePolicy calibrated_bins_rule(std::span<const double> mus,
                                         std::span<const double> rhos, double k, double m) {
  if (mus.size() != rhos.size()) throw DimensionMismatch("mu and rho lengths differ");
  if (mus.empty()) throw EmptyInput("calibrated_bins_rule needs at least one bin");
  if (!(m > 0.0)) throw BadParams("m must be positive");
  if (!(k >= 0.0)) throw BadParams("k must be non-negative");
  double rho_total = 0.0;
  for (std::size_t b = 0; b < rhos.size(); ++b) {
    if (!(rhos[b] >= 0.0)) throw BadDistribution("rho must be non-negative");
    if (!(mus[b] >= 0.0 && mus[b] <= 1.0)) throw ScoreOutOfRange(b, mus[b]);
    rho_total += rhos[b];
  }
  if (std::abs(rho_total - 1.0) > kRhoTolerance) {
    throw BadDistribution("rho must sum to 1, got " + std::to_string(rho_total));
  }
  if (k == 0.0) return empty_policy();

  std::vector<double> masses(mus.size());
  for (std::size_t b = 0; b < mus.size(); ++b) masses[b] = mus[b] * rhos[b];
  const auto levels = descending_levels(mus, masses, rhos);

  const double target = k / m;
  double total = 0.0;
  for (const auto& lvl : levels) total += lvl.mass;
  if (total < target) throw Infeasible(total * m);

  double above = 0.0;
  for (const auto& lvl : levels) {
    if (lvl.mass == 0.0) continue;
    if (above + lvl.mass >= target) {
      RandomizedTiePolicy policy;
      policy.threshold = lvl.value;
      policy.tie_prob = (target - above) / lvl.mass;
      return policy;
    }
    above += lvl.mass;
  }
  throw Infeasible(total * m);
}

Shortlist apply(const ThresholdPolicy& policy, const Pool& pool) {
  std::vector<std::uint8_t> decisions(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    decisions[i] = pool.scores[i] >= policy.threshold ? 1 : 0;
  }
  return Shortlist::from_decisions(std::move(decisions));
}

Shortlist apply(const ThresholdPolicy& policy, const Pool& pool, RandomSource&) {
  return apply(policy, pool);
}

Shortlist apply(const RandomizedTiePolicy& policy, const Pool& pool, RandomSource& rng) {
  std::vector<std::uint8_t> decisions(pool.size());
  bool drew = false;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const double s = pool.scores[i];
    if (s > policy.threshold) {
      decisions[i] = 1;
    } else if (s == policy.threshold) {
      drew = true;
      decisions[i] = rng.next_bernoulli(policy.tie_prob) ? 1 : 0;
    }
  }
  std::optional<StreamKey> key;
  if (drew) key = StreamKey{rng.seed(), rng.stream_id()};
  return Shortlist::from_decisions(std::move(decisions), key);
}

Shortlist apply(const BinRandomizedPolicy& policy, const Pool& pool, RandomSource& rng) {
  std::vector<std::uint8_t> decisions(pool.size(), 0);
  if (!policy.feasible) return Shortlist::from_decisions(std::move(decisions));
  bool drew = false;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (policy.select_all) {
      decisions[i] = 1;
      continue;
    }
    const std::size_t b = policy.bins.bin_of(pool.scores[i]);
    if (b < policy.cutoff_bin) {
      decisions[i] = 1;
    } else if (b == policy.cutoff_bin) {
      drew = true;
      decisions[i] = rng.next_bernoulli(policy.last_bin_prob) ? 1 : 0;
    }
  }
  std::optional<StreamKey> key;
  if (drew) key = StreamKey{rng.seed(), rng.stream_id()};
  return Shortlist::from_decisions(std::move(decisions), key);
}

namespace {

template <typename SelectProb>
double weighted_mean(const DiscreteWorld& world, double m, SelectProb prob) {
  world.validate();
  double acc = 0.0;
  for (const auto& pt : world.support) acc += pt.weight * prob(pt);
  return m * acc;
}

void check_tie_support(const RandomizedTiePolicy& policy, const DiscreteWorld& world) {
  if (policy.degenerate_empty || policy.tie_prob == 0.0) return;
  for (const auto& pt : world.support) {
    if (pt.score == policy.threshold) return;
  }
  throw SupportMismatch("tie threshold is not a support score of the world");
}

}  // namespace

double expected_size(const ThresholdPolicy& policy, const DiscreteWorld& world, double m) {
  return weighted_mean(world, m, [&](const SupportPoint& pt) {
    return pt.score >= policy.threshold ? 1.0 : 0.0;
  });
}

double expected_size(const RandomizedTiePolicy& policy, const DiscreteWorld& world, double m) {
  check_tie_support(policy, world);
  return weighted_mean(world, m, [&](const SupportPoint& pt) {
    if (pt.score > policy.threshold) return 1.0;
    if (pt.score == policy.threshold) return policy.tie_prob;
    return 0.0;
  });
}

double expected_size(const BinRandomizedPolicy& policy, const DiscreteWorld& world, double m) {
  if (!policy.feasible) return 0.0;
  return weighted_mean(world, m, [&](const SupportPoint& pt) {
    if (policy.select_all) return 1.0;
    const std::size_t b = policy.bins.bin_of(pt.score);
    if (b < policy.cutoff_bin) return 1.0;
    if (b == policy.cutoff_bin) return policy.last_bin_prob;
    return 0.0;
  });
}

double expected_qualified(const RandomizedTiePolicy& policy, const DiscreteWorld& world,
                          double m) {
  check_tie_support(policy, world);
  return weighted_mean(world, m, [&](const SupportPoint& pt) {
    if (pt.score > policy.threshold) return pt.qualified_prob;
    if (pt.score == policy.threshold) return policy.tie_prob * pt.qualified_prob;
    return 0.0;
  });
}

}  // namespace css
