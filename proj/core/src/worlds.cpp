#include "css/worlds.hpp"

#include <algorithm>
#include <cmath>

namespace css {

namespace {

constexpr double kWeightTolerance = 1e-12;

std::size_t pick_index(const std::vector<double>& cumulative, double u) {
  // First cumulative weight strictly above u; the final entry is 1 so the
  // draw always lands.
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

std::vector<double> cumulative_weights(const DiscreteWorld& world) {
  std::vector<double> cum;
  cum.reserve(world.support.size());
  double total = 0.0;
  for (const auto& pt : world.support) {
    total += pt.weight;
    cum.push_back(total);
  }
  cum.back() = 1.0;
  return cum;
}

}  // namespace

void DiscreteWorld::validate() const {
  if (support.empty()) throw EmptyInput("discrete world needs at least one support point");
  double total = 0.0;
  for (std::size_t j = 0; j < support.size(); ++j) {
    const auto& pt = support[j];
    if (!(pt.score >= 0.0 && pt.score <= 1.0)) throw ScoreOutOfRange(j, pt.score);
    if (!(pt.qualified_prob >= 0.0 && pt.qualified_prob <= 1.0)) {
      throw BadParams("qualified_prob out of [0,1] at support point " + std::to_string(j));
    }
    if (!(pt.weight >= 0.0)) throw BadParams("negative weight at support point " + std::to_string(j));
    total += pt.weight;
  }
  if (std::abs(total - 1.0) > kWeightTolerance) {
    throw BadDistribution("support weights must sum to 1, got " + std::to_string(total));
  }
}

double DiscreteWorld::qualified_rate() const { return true_delta(*this, 0.0); }

double true_delta(const DiscreteWorld& world, double t) {
  double mass = 0.0;
  for (const auto& pt : world.support) {
    if (pt.score >= t) mass += pt.weight * pt.qualified_prob;
  }
  return mass;
}

double true_tail_mass(const DiscreteWorld& world, double t) {
  double mass = 0.0;
  for (const auto& pt : world.support) {
    if (pt.score >= t) mass += pt.weight;
  }
  return mass;
}

CalibrationSet sample_calibration(const DiscreteWorld& world, std::size_t n, RandomSource& rng) {
  if (n < 1) throw InvalidN(n);
  world.validate();
  const auto cum = cumulative_weights(world);
  std::vector<ScoredExample> examples;
  examples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pt = world.support[pick_index(cum, rng.next_uniform())];
    const int label = rng.next_bernoulli(pt.qualified_prob) ? 1 : 0;
    examples.push_back({pt.score, label, pt.group});
  }
  return make_calibration_set(std::move(examples));
}

Pool sample_pool(const DiscreteWorld& world, std::size_t m, RandomSource& rng) {
  if (m < 1) throw InvalidN(m);
  world.validate();
  const auto cum = cumulative_weights(world);
  Pool pool;
  pool.scores.reserve(m);
  pool.labels.reserve(m);
  bool any_group = false;
  for (const auto& pt : world.support) any_group = any_group || !pt.group.empty();
  if (any_group) pool.groups.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& pt = world.support[pick_index(cum, rng.next_uniform())];
    pool.scores.push_back(pt.score);
    pool.labels.push_back(rng.next_bernoulli(pt.qualified_prob) ? 1 : 0);
    if (any_group) pool.groups.push_back(pt.group);
  }
  return pool;
}

double beta14_from_uniform(double u) {
  // 1 - u^(1/4); sqrt twice keeps the rounding identical everywhere.
  return 1.0 - std::sqrt(std::sqrt(u));
}

void NoisyClassifierWorld::validate() const {
  auto check_ratio = [](double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw BadParams("noise_ratio must lie in [0,1]");
  };
  check_ratio(noise_ratio);
  if (!groups.empty()) {
    double total = 0.0;
    for (const auto& g : groups) {
      if (g.name.empty()) throw BadParams("world group needs a name");
      if (!(g.weight > 0.0)) throw BadParams("world group weight must be positive");
      check_ratio(g.noise_ratio);
      total += g.weight;
    }
    if (std::abs(total - 1.0) > kWeightTolerance) {
      throw BadDistribution("group weights must sum to 1");
    }
  }
}

namespace {

// E[p 1{p >= t}] for p ~ Beta(1,4).
double beta14_upper_mean(double t) {
  const double u = 1.0 - t;
  const double u4 = u * u * u * u;
  return u4 - 0.8 * u4 * u;
}

double noisy_delta_one_group(double r, double t) {
  const double u = 1.0 - t;
  const double u4 = u * u * u * u;
  return (1.0 - r) * beta14_upper_mean(t) + 0.2 * r * u4;
}

}  // namespace

double true_delta(const NoisyClassifierWorld& world, double t) {
  world.validate();
  if (world.groups.empty()) return noisy_delta_one_group(world.noise_ratio, t);
  double mass = 0.0;
  for (const auto& g : world.groups) {
    mass += g.weight * noisy_delta_one_group(g.noise_ratio, t);
  }
  return mass;
}

double true_delta_group(const NoisyClassifierWorld& world, const std::string& group, double t) {
  world.validate();
  for (const auto& g : world.groups) {
    if (g.name == group) return g.weight * noisy_delta_one_group(g.noise_ratio, t);
  }
  throw UnknownGroup(group);
}

namespace {

// One candidate draw. Consumes a fixed number of uniforms (4, plus 1 for the
// group pick in grouped worlds) so streams stay aligned regardless of values.
struct NoisyDraw {
  double score;
  int label;
  std::string group;
};

NoisyDraw draw_noisy(const NoisyClassifierWorld& world, RandomSource& rng) {
  double r = world.noise_ratio;
  std::string group;
  if (!world.groups.empty()) {
    const double u = rng.next_uniform();
    double acc = 0.0;
    const auto* chosen = &world.groups.back();
    for (const auto& g : world.groups) {
      acc += g.weight;
      if (u < acc) {
        chosen = &g;
        break;
      }
    }
    group = chosen->name;
    r = chosen->noise_ratio;
  }
  const double p = beta14_from_uniform(rng.next_uniform());
  const int label = rng.next_bernoulli(p) ? 1 : 0;
  const bool noisy = rng.next_bernoulli(r);
  const double beta = beta14_from_uniform(rng.next_uniform());
  return {noisy ? beta : p, label, std::move(group)};
}

}  // namespace

CalibrationSet sample_calibration(const NoisyClassifierWorld& world, std::size_t n,
                                  RandomSource& rng) {
  if (n < 1) throw InvalidN(n);
  world.validate();
  std::vector<ScoredExample> examples;
  examples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto d = draw_noisy(world, rng);
    examples.push_back({d.score, d.label, std::move(d.group)});
  }
  return make_calibration_set(std::move(examples));
}

Pool sample_pool(const NoisyClassifierWorld& world, std::size_t m, RandomSource& rng) {
  if (m < 1) throw InvalidN(m);
  world.validate();
  Pool pool;
  pool.scores.reserve(m);
  pool.labels.reserve(m);
  if (!world.groups.empty()) pool.groups.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto d = draw_noisy(world, rng);
    pool.scores.push_back(d.score);
    pool.labels.push_back(d.label);
    if (!world.groups.empty()) pool.groups.push_back(std::move(d.group));
  }
  return pool;
}

ImpossibilityWorld impossibility_world(double k, std::size_t m) {
  if (!(k > 0.0) || m == 0 || !(k < static_cast<double>(m))) {
    throw BadParams("impossibility world needs 0 < k < m");
  }
  const double md = static_cast<double>(m);
  ImpossibilityWorld iw;
  iw.k = k;
  iw.m = m;
  iw.world.support = {
      {1.0, 1.0, 0.5, ""},
      {k / md, k / md, 0.5, ""},
  };
  iw.pool_all_high.scores.assign(m, 1.0);
  iw.pool_all_high.labels.assign(m, 1);
  iw.pool_all_low.scores.assign(m, k / md);
  iw.size_gap_bound = (md - k) / 2.0;
  iw.quality_gap_bound = 0.5 * k * (1.0 - k / md);
  return iw;
}

ImpossibilityDiagnostic impossibility_diagnostic(const ImpossibilityWorld& iw) {
  const double md = static_cast<double>(iw.m);
  const double k = iw.k;
  // The only perfectly calibrated predictor besides the omniscient one is the
  // constant c = Pr(Y = 1).
  const double c = 0.5 * 1.0 + 0.5 * (k / md);

  // Its induced policy sees the same constant score vector on both pools, so
  // it selects each candidate with probability k / (m c): expected size k/c.
  const double size_h = k / c;

  // Omniscient rule: expected size k on the all-high pool, m on the all-low
  // pool; expected qualified count k on both.
  const double size_gap_high = std::abs(size_h - k);
  const double size_gap_low = std::abs(size_h - md);

  const double quality_h_high = size_h;            // every high-type is qualified
  const double quality_h_low = size_h * (k / md);  // low-type qualified w.p. k/m
  const double quality_gap_high = std::abs(quality_h_high - k);
  const double quality_gap_low = std::abs(quality_h_low - k);

  ImpossibilityDiagnostic diag;
  diag.constant_prediction = c;
  diag.measured_size_gap = std::max(size_gap_high, size_gap_low);
  diag.measured_quality_gap = std::max(quality_gap_high, quality_gap_low);
  diag.size_gap_bound = iw.size_gap_bound;
  diag.quality_gap_bound = iw.quality_gap_bound;
  return diag;
}

}  // namespace css
