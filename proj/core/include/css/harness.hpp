#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "css/baselines.hpp"
#include "css/csv_io.hpp"
#include "css/css.hpp"
#include "css/diversity.hpp"
#include "css/multibin.hpp"
#include "css/worlds.hpp"

namespace css {

enum class MethodKind { Css, CssDiversity, Umb, Uncalibrated, Platt, Isotonic };

struct MethodSpec {
  MethodKind kind = MethodKind::Css;
  std::size_t bins = 10;  // UMB preset

  std::string label() const;
};

// Accepts css, css-div, umb-<B> (and the presets umb2/umb5/umb10),
// uncalibrated, platt, isotonic.
MethodSpec parse_method(const std::string& text);

enum class SweepAxis { None, Noise, CalibrationSize };

struct ExperimentConfig {
  std::vector<MethodSpec> methods = {{MethodKind::Css}};
  double k = 5.0;
  std::size_t m = 100;
  double alpha = 0.1;
  std::size_t n_cal = 10000;
  double noise = 0.0;
  std::vector<WorldGroup> groups;  // empty = ungrouped world
  // Grouped noise sweeps drive this group's ratio; empty drives every group.
  std::string sweep_group;
  SweepAxis sweep = SweepAxis::None;
  std::vector<double> sweep_values;
  std::size_t runs = 100;
  std::size_t test_pools = 1000;
  std::uint64_t master_seed = 1;
  std::size_t threads = 1;
  IsotonicVariant isotonic_variant = IsotonicVariant::PerExample;

  void validate() const;
};

// One row of experiment output. Per-run rows carry binary EQ/feasible;
// aggregate rows (run_id < 0) carry fractions plus dispersion columns.
struct TrialReport {
  std::string method;
  double sweep_value = 0.0;
  std::int64_t run_id = 0;
  std::string group = "all";
  double eq = 0.0;
  double ss = 0.0;
  double feasible = 0.0;
  double mean_realized_qualified = 0.0;
  double eq_se = 0.0;  // aggregates only
  double ss_sd = 0.0;  // aggregates only
  std::string detail;

  bool is_aggregate() const { return run_id < 0; }
};

struct ResultsTable {
  std::vector<TrialReport> rows;

  bool empty() const { return rows.empty(); }
};

// One (method, sweep point, run): draw a calibration set, fit the method,
// evaluate EQ/SS over test_pools independent pools. Grouped worlds add one
// row per group beside the "all" row. Fit failures become flagged rows.
std::vector<TrialReport> run_trial(const ExperimentConfig& cfg, const MethodSpec& method,
                                   std::size_t sweep_index, std::size_t run_id);

// Full grid: methods x sweep values x runs, optionally cell-parallel. Row
// order is fixed by (method, sweep value, run, group) regardless of thread
// count; aggregate rows follow the per-run rows.
ResultsTable run_sweep(const ExperimentConfig& cfg);

std::string results_to_csv(const ResultsTable& table);
void emit_csv(const ResultsTable& table, const std::string& path);

// Self-contained SVG line chart of an aggregate metric ("EQ" or "SS") against
// the sweep axis, one series per (method, group). EQ series carry standard
// error bars; SS series carry a +-1 sd band and are drawn only where the
// method's runs were feasible.
std::string results_to_svg(const ResultsTable& table, const std::string& x_label,
                           const std::string& metric);
void emit_svg_lines(const ResultsTable& table, const std::string& x_label,
                    const std::string& metric, const std::string& path);

}  // namespace css
