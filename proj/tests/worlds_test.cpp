#include <cmath>
#include <map>

#include "css/bounds.hpp"
#include "css/worlds.hpp"
#include "doctest.h"
#include "support/test_worlds.hpp"

using namespace css;

TEST_SUITE("worlds") {
  TEST_CASE("true delta on a discrete world") {
    DiscreteWorld world;
    world.support = {{0.9, 0.9, 0.25, ""}, {0.8, 0.8, 0.25, ""}, {0.5, 0.5, 0.25, ""},
                     {0.3, 0.3, 0.25, ""}};
    // Direct sum of w_j q_j over support scores >= t.
    CHECK(true_delta(world, 0.6) == doctest::Approx((0.9 + 0.8) / 4.0).epsilon(1e-12));
    CHECK(true_delta(world, 0.0) ==
          doctest::Approx((0.9 + 0.8 + 0.5 + 0.3) / 4.0).epsilon(1e-12));
    CHECK(true_delta(world, 0.95) == 0.0);
    // Non-increasing in t.
    double prev = true_delta(world, 0.0);
    for (double t = 0.05; t <= 1.0; t += 0.05) {
      const double v = true_delta(world, t);
      CHECK(v <= prev + 1e-15);
      prev = v;
    }
  }

  TEST_CASE("degenerate single-point world") {
    DiscreteWorld world;
    world.support = {{0.5, 1.0, 1.0, ""}};
    RandomSource rng = derive_stream(71, 0);
    auto cal = sample_calibration(world, 3, rng);
    for (const auto& ex : cal.examples()) {
      CHECK(ex.score == 0.5);
      CHECK(ex.label == 1);
    }
  }

  TEST_CASE("sampling consistency against the analytic curve") {
    const auto world = testing::ten_point_world();
    RandomSource rng = derive_stream(72, 0);
    const std::size_t n = 1000000;
    auto cal = sample_calibration(world, n, rng);
    const auto curve = delta_curve(cal);
    for (const auto& pt : world.support) {
      CHECK(std::abs(curve.value_at(pt.score) - true_delta(world, pt.score)) < 0.003);
    }
  }

  TEST_CASE("beta(1,4) inversion sampler matches its cdf") {
    RandomSource rng = derive_stream(73, 0);
    const int n = 100000;
    std::vector<double> draws(n);
    for (auto& d : draws) d = beta14_from_uniform(rng.next_uniform());
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = draws[i];
      const double cdf = 1.0 - std::pow(1.0 - x, 4.0);
      const double emp_hi = static_cast<double>(i + 1) / n;
      const double emp_lo = static_cast<double>(i) / n;
      ks = std::max({ks, std::abs(emp_hi - cdf), std::abs(emp_lo - cdf)});
    }
    CHECK(ks < 0.01);
  }

  TEST_CASE("noisy world positive rate and noise decoupling") {
    NoisyClassifierWorld clean;
    clean.noise_ratio = 0.0;
    RandomSource rng = derive_stream(74, 0);
    const std::size_t n = 100000;
    auto cal = sample_calibration(clean, n, rng);
    CHECK(cal.positive_rate() == doctest::Approx(0.2).epsilon(0.025));  // 0.2 +- 0.005

    // Pure noise: scores carry no signal about labels.
    NoisyClassifierWorld noisy;
    noisy.noise_ratio = 1.0;
    RandomSource rng2 = derive_stream(74, 1);
    auto cal2 = sample_calibration(noisy, n, rng2);
    double mean_s = 0.0, mean_y = 0.0;
    for (const auto& ex : cal2.examples()) {
      mean_s += ex.score;
      mean_y += ex.label;
    }
    mean_s /= n;
    mean_y /= n;
    double cov = 0.0, var_s = 0.0, var_y = 0.0;
    for (const auto& ex : cal2.examples()) {
      cov += (ex.score - mean_s) * (ex.label - mean_y);
      var_s += (ex.score - mean_s) * (ex.score - mean_s);
      var_y += (ex.label - mean_y) * (ex.label - mean_y);
    }
    const double corr = cov / std::sqrt(var_s * var_y);
    CHECK(std::abs(corr) < 0.01);
  }

  TEST_CASE("noisy world analytic delta matches sampling") {
    for (double r : {0.0, 0.5, 1.0}) {
      NoisyClassifierWorld world;
      world.noise_ratio = r;
      RandomSource rng = derive_stream(75, static_cast<std::uint64_t>(r * 10));
      auto cal = sample_calibration(world, 200000, rng);
      const auto curve = delta_curve(cal);
      for (double t : {0.0, 0.2, 0.4, 0.6}) {
        CHECK(curve.value_at(t) == doctest::Approx(true_delta(world, t)).epsilon(0.05));
      }
    }
  }

  TEST_CASE("grouped world respects weights and per-group noise") {
    const auto world = testing::two_group_world(0.0, 1.0);
    RandomSource rng = derive_stream(76, 0);
    auto pool = sample_pool(world, 50000, rng);
    REQUIRE(pool.has_groups());
    std::map<std::string, int> counts;
    for (const auto& g : pool.groups) counts[g] += 1;
    CHECK(static_cast<double>(counts["maj"]) / 50000.0 == doctest::Approx(0.7).epsilon(0.02));
    CHECK(static_cast<double>(counts["min"]) / 50000.0 == doctest::Approx(0.3).epsilon(0.05));

    // Unconditional group masses sum to the world mass.
    for (double t : {0.0, 0.3, 0.6}) {
      CHECK(true_delta_group(world, "maj", t) + true_delta_group(world, "min", t) ==
            doctest::Approx(true_delta(world, t)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(true_delta_group(world, "nope", 0.1), UnknownGroup);
  }

  TEST_CASE("impossibility world closed forms") {
    const auto iw = impossibility_world(5.0, 100);
    CHECK(iw.size_gap_bound == doctest::Approx(47.5).epsilon(1e-12));
    CHECK(iw.quality_gap_bound == doctest::Approx(2.375).epsilon(1e-12));
    CHECK(iw.pool_all_high.size() == 100);
    CHECK(iw.pool_all_low.size() == 100);
    CHECK(iw.world.support[1].qualified_prob == doctest::Approx(0.05).epsilon(1e-12));

    const auto half = impossibility_world(50.0, 100);
    CHECK(half.quality_gap_bound == doctest::Approx((100.0 / 4.0) * 0.5).epsilon(1e-12));

    CHECK_THROWS_AS(impossibility_world(100.0, 100), BadParams);
    CHECK_THROWS_AS(impossibility_world(120.0, 100), BadParams);
  }

  TEST_CASE("impossibility diagnostic meets the lower bounds") {
    const auto iw = impossibility_world(5.0, 100);
    const auto diag = impossibility_diagnostic(iw);
    CHECK(diag.measured_size_gap >= diag.size_gap_bound);
    CHECK(diag.measured_quality_gap >= diag.quality_gap_bound);
    // The two size gaps sum to exactly m - k for any constant predictor whose
    // induced size lies between k and m.
    const double c = diag.constant_prediction;
    CHECK(std::abs(5.0 / c - 5.0) + std::abs(5.0 / c - 100.0) ==
          doctest::Approx(95.0).epsilon(1e-12));
  }
}
