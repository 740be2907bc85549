#include "css/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <tuple>

namespace css {

std::string MethodSpec::label() const {
  switch (kind) {
    case MethodKind::Css:
      return "css";
    case MethodKind::CssDiversity:
      return "css-div";
    case MethodKind::Umb:
      return "umb-" + std::to_string(bins);
    case MethodKind::Uncalibrated:
      return "uncalibrated";
    case MethodKind::Platt:
      return "platt";
    case MethodKind::Isotonic:
      return "isotonic";
  }
  return "unknown";
}

MethodSpec parse_method(const std::string& text) {
  if (text == "css") return {MethodKind::Css};
  if (text == "css-div" || text == "css-diversity") return {MethodKind::CssDiversity};
  if (text == "uncalibrated") return {MethodKind::Uncalibrated};
  if (text == "platt") return {MethodKind::Platt};
  if (text == "isotonic") return {MethodKind::Isotonic};
  if (text.rfind("umb", 0) == 0) {
    std::string digits = text.substr(3);
    if (!digits.empty() && digits.front() == '-') digits.erase(0, 1);
    if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos) {
      MethodSpec spec{MethodKind::Umb};
      spec.bins = static_cast<std::size_t>(std::stoul(digits));
      if (spec.bins >= 1) return spec;
    }
  }
  throw BadParams("unknown method \"" + text + "\"");
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw BadParams("no methods configured");
  if (runs < 1) throw BadParams("runs must be >= 1");
  if (test_pools < 1) throw BadParams("test_pools must be >= 1");
  if (m < 1) throw BadParams("m must be >= 1");
  if (n_cal < 1) throw BadParams("n_cal must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidAlpha(alpha);
  if (!(k >= 0.0)) throw BadParams("k must be non-negative");
  if (!(noise >= 0.0 && noise <= 1.0)) throw BadParams("noise must lie in [0,1]");
  if (sweep != SweepAxis::None && sweep_values.empty()) {
    throw BadParams("sweep axis set but no sweep values given");
  }
  if (sweep == SweepAxis::CalibrationSize) {
    for (double v : sweep_values) {
      if (!(v >= 1.0)) throw BadParams("calibration-size sweep values must be >= 1");
    }
  }
  if (sweep == SweepAxis::Noise) {
    for (double v : sweep_values) {
      if (!(v >= 0.0 && v <= 1.0)) throw BadParams("noise sweep values must lie in [0,1]");
    }
  }
  for (const auto& spec : methods) {
    if (spec.kind == MethodKind::CssDiversity && groups.empty()) {
      throw BadParams("css-div needs a grouped world");
    }
    if (spec.kind == MethodKind::Umb && spec.bins < 1) throw BadParams("umb needs bins >= 1");
  }
  if (!groups.empty()) {
    NoisyClassifierWorld world;
    world.groups = groups;
    world.validate();
  }
}

namespace {

NoisyClassifierWorld world_for(const ExperimentConfig& cfg, double sweep_value) {
  NoisyClassifierWorld world;
  if (cfg.groups.empty()) {
    world.noise_ratio = cfg.sweep == SweepAxis::Noise ? sweep_value : cfg.noise;
  } else {
    world.groups = cfg.groups;
    if (cfg.sweep == SweepAxis::Noise) {
      for (auto& g : world.groups) {
        if (cfg.sweep_group.empty() || g.name == cfg.sweep_group) g.noise_ratio = sweep_value;
      }
    }
  }
  return world;
}

std::size_t ncal_for(const ExperimentConfig& cfg, double sweep_value) {
  if (cfg.sweep == SweepAxis::CalibrationSize) {
    return static_cast<std::size_t>(sweep_value);
  }
  return cfg.n_cal;
}

double sweep_value_at(const ExperimentConfig& cfg, std::size_t sweep_index) {
  if (cfg.sweep == SweepAxis::None) return cfg.noise;
  return cfg.sweep_values[sweep_index];
}

std::size_t sweep_count(const ExperimentConfig& cfg) {
  return cfg.sweep == SweepAxis::None ? 1 : cfg.sweep_values.size();
}

// A fitted method ready to screen pools.
struct FittedMethod {
  virtual ~FittedMethod() = default;
  virtual bool feasible() const { return true; }
  virtual std::string detail() const { return {}; }
  virtual std::vector<std::uint8_t> decide(const Pool& pool, RandomSource& rng) = 0;
};

struct CssFit : FittedMethod {
  CssResult result;
  bool feasible() const override { return result.feasible; }
  std::string detail() const override {
    return result.feasible ? "t=" + format_double(result.threshold) : "infeasible";
  }
  std::vector<std::uint8_t> decide(const Pool& pool, RandomSource&) override {
    return css_shortlist(result, pool).decisions;
  }
};

struct CssDivFit : FittedMethod {
  std::map<std::string, CssResult> thresholds;
  bool feasible() const override {
    for (const auto& [g, r] : thresholds) {
      if (!r.feasible) return false;
    }
    return true;
  }
  std::string detail() const override {
    std::string out;
    for (const auto& [g, r] : thresholds) {
      if (!out.empty()) out += ';';
      out += "t_" + g + "=" + (r.feasible ? format_double(r.threshold) : "inf");
    }
    return out;
  }
  std::vector<std::uint8_t> decide(const Pool& pool, RandomSource&) override {
    return css_diversity_apply(thresholds, pool).decisions;
  }
};

struct UmbFit : FittedMethod {
  BinRandomizedPolicy policy;
  bool feasible() const override { return policy.feasible; }
  std::string detail() const override {
    if (!policy.feasible) return "infeasible";
    return "b=" + std::to_string(policy.cutoff_bin) +
           ";theta=" + format_double(policy.last_bin_prob);
  }
  std::vector<std::uint8_t> decide(const Pool& pool, RandomSource& rng) override {
    return apply(policy, pool, rng).decisions;
  }
};

// Shared by the three guarantee-free baselines: in grouped worlds they screen
// each group separately against its k_g; ungrouped they screen globally.
struct BaselineFit : FittedMethod {
  double k = 0.0;
  std::map<std::string, double> k_groups;  // empty = global screening
  std::size_t fallback_pools = 0;

  std::vector<std::uint8_t> decide(const Pool& pool, RandomSource& rng) override {
    if (k_groups.empty()) {
      bool fallback = false;
      auto d = decide_subset(pool, all_indices(pool), k, rng, fallback);
      if (fallback) ++fallback_pools;
      return d;
    }
    std::vector<std::uint8_t> decisions(pool.size(), 0);
    bool fallback = false;
    for (const auto& [name, kg] : k_groups) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pool.groups[i] == name) idx.push_back(i);
      }
      if (idx.empty()) continue;
      const auto d = decide_subset(pool, idx, kg, rng, fallback);
      for (std::size_t j = 0; j < idx.size(); ++j) decisions[idx[j]] = d[j];
    }
    if (fallback) ++fallback_pools;
    return decisions;
  }

 protected:
  static std::vector<std::size_t> all_indices(const Pool& pool) {
    std::vector<std::size_t> idx(pool.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return idx;
  }

  // Decisions for the given candidate indices only, in pool order.
  virtual std::vector<std::uint8_t> decide_subset(const Pool& pool,
                                                  const std::vector<std::size_t>& idx, double kg,
                                                  RandomSource& rng, bool& fallback) = 0;
};

struct UncalibratedFit : BaselineFit {
  std::string detail() const override { return "eq3-on-raw-scores"; }
  std::vector<std::uint8_t> decide_subset(const Pool& pool, const std::vector<std::size_t>& idx,
                                          double kg, RandomSource& rng, bool& fallback) override {
    std::vector<double> scores(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) scores[j] = pool.scores[idx[j]];
    Pool sub;
    sub.scores = std::move(scores);
    const auto rule = uncalibrated_rule(sub, kg);
    fallback = fallback || rule.select_all_fallback;
    return apply(rule.policy, sub, rng).decisions;
  }
};

struct PlattFit : BaselineFit {
  std::map<std::string, PlattModel> models;  // key "" = global
  std::string detail() const override {
    std::string out;
    for (const auto& [g, mdl] : models) {
      if (!out.empty()) out += ';';
      out += (g.empty() ? std::string("ab") : "ab_" + g) + "=" + format_double(mdl.slope) + "," +
             format_double(mdl.intercept);
    }
    return out;
  }
  std::vector<std::uint8_t> decide_subset(const Pool& pool, const std::vector<std::size_t>& idx,
                                          double kg, RandomSource& rng, bool& fallback) override {
    const PlattModel& model =
        k_groups.empty() ? models.at("") : models.at(pool.groups[idx.front()]);
    Pool sub;
    sub.scores.resize(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) sub.scores[j] = model.map(pool.scores[idx[j]]);
    const auto rule = platt_rule_on_mapped(sub, kg);
    fallback = fallback || rule.select_all_fallback;
    return apply(rule.policy, sub, rng).decisions;
  }

 private:
  static BaselineRule platt_rule_on_mapped(const Pool& mapped, double kg) {
    try {
      return {omniscient_rule(mapped.scores, kg), false};
    } catch (const Infeasible&) {
      BaselineRule rule;
      rule.policy.threshold = 0.0;
      rule.policy.tie_prob = 1.0;
      rule.select_all_fallback = true;
      return rule;
    }
  }
};

struct IsotonicFitMethod : BaselineFit {
  std::map<std::string, IsotonicRule> rules;  // key "" = global
  std::string detail() const override {
    std::string out;
    for (const auto& [g, r] : rules) {
      if (!out.empty()) out += ';';
      out += (g.empty() ? std::string("t") : "t_" + g) + "=" +
             format_double(r.policy.threshold) + (r.select_all_fallback ? "(all)" : "");
    }
    return out;
  }
  std::vector<std::uint8_t> decide_subset(const Pool& pool, const std::vector<std::size_t>& idx,
                                          double, RandomSource&, bool& fallback) override {
    const IsotonicRule& rule =
        k_groups.empty() ? rules.at("") : rules.at(pool.groups[idx.front()]);
    fallback = fallback || rule.select_all_fallback;
    std::vector<std::uint8_t> d(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
      d[j] = pool.scores[idx[j]] >= rule.policy.threshold ? 1 : 0;
    }
    return d;
  }
};

std::unique_ptr<FittedMethod> fit_method(const ExperimentConfig& cfg, const MethodSpec& spec,
                                         const CalibrationSet& cal,
                                         const NoisyClassifierWorld& world,
                                         const std::map<std::string, double>& k_groups) {
  const double md = static_cast<double>(cfg.m);
  const bool grouped = !world.groups.empty();

  switch (spec.kind) {
    case MethodKind::Css: {
      auto fit = std::make_unique<CssFit>();
      fit->result = css_threshold(cal, {cfg.k, md, cfg.alpha});
      return fit;
    }
    case MethodKind::CssDiversity: {
      auto fit = std::make_unique<CssDivFit>();
      GroupPlan plan;
      auto by_group = split_by_group(cal);
      const double n = static_cast<double>(cal.size());
      for (auto& [name, group_cal] : by_group) {
        GroupPlan::Entry entry{k_groups.at(name),
                               md * static_cast<double>(group_cal.size()) / n,
                               std::move(group_cal)};
        plan.per_group.emplace(name, std::move(entry));
      }
      fit->thresholds = css_diversity_fit(plan, cfg.alpha);
      return fit;
    }
    case MethodKind::Umb: {
      auto fit = std::make_unique<UmbFit>();
      const auto edges = umb_edges(cal, spec.bins);
      const auto bins = bin_deltas(cal, edges);
      fit->policy = multibin_policy(bins, {cfg.k, md, cfg.alpha});
      return fit;
    }
    case MethodKind::Uncalibrated: {
      auto fit = std::make_unique<UncalibratedFit>();
      fit->k = cfg.k;
      if (grouped) fit->k_groups = k_groups;
      return fit;
    }
    case MethodKind::Platt: {
      auto fit = std::make_unique<PlattFit>();
      fit->k = cfg.k;
      if (grouped) {
        fit->k_groups = k_groups;
        for (auto& [name, group_cal] : split_by_group(cal)) {
          fit->models.emplace(name, platt_fit(group_cal));
        }
      } else {
        fit->models.emplace("", platt_fit(cal));
      }
      return fit;
    }
    case MethodKind::Isotonic: {
      auto fit = std::make_unique<IsotonicFitMethod>();
      fit->k = cfg.k;
      if (grouped) {
        fit->k_groups = k_groups;
        const double n = static_cast<double>(cal.size());
        for (auto& [name, group_cal] : split_by_group(cal)) {
          const double expected_mg = md * static_cast<double>(group_cal.size()) / n;
          const auto model = isotonic_fit(group_cal);
          fit->rules.emplace(name, isotonic_rule(model, group_cal, k_groups.at(name),
                                                 expected_mg, cfg.isotonic_variant));
        }
      } else {
        const auto model = isotonic_fit(cal);
        fit->rules.emplace("", isotonic_rule(model, cal, cfg.k, md, cfg.isotonic_variant));
      }
      return fit;
    }
  }
  throw BadParams("unhandled method kind");
}

}  // namespace

std::vector<TrialReport> run_trial(const ExperimentConfig& cfg, const MethodSpec& method,
                                   std::size_t sweep_index, std::size_t run_id) {
  const double sweep_value = sweep_value_at(cfg, sweep_index);
  const auto world = world_for(cfg, sweep_value);
  const std::size_t n_cal = ncal_for(cfg, sweep_value);

  const std::uint64_t cell = static_cast<std::uint64_t>(sweep_index) * cfg.runs + run_id;
  RandomSource cal_rng = derive_stream(cfg.master_seed, cell * 8 + 0);
  RandomSource pool_rng = derive_stream(cfg.master_seed, cell * 8 + 1);
  RandomSource policy_rng = derive_stream(cfg.master_seed, cell * 8 + 2);

  // Row scaffold: overall first, then one row per configured group.
  std::vector<std::string> row_groups = {"all"};
  for (const auto& g : world.groups) row_groups.push_back(g.name);

  auto make_rows = [&](double feasible_flag, const std::string& detail) {
    std::vector<TrialReport> rows;
    for (const auto& g : row_groups) {
      TrialReport row;
      row.method = method.label();
      row.sweep_value = sweep_value;
      row.run_id = static_cast<std::int64_t>(run_id);
      row.group = g;
      row.feasible = feasible_flag;
      row.detail = detail;
      rows.push_back(std::move(row));
    }
    return rows;
  };

  try {
    const CalibrationSet cal = sample_calibration(world, n_cal, cal_rng);

    std::map<std::string, double> k_groups;
    if (!world.groups.empty()) {
      k_groups = equal_opportunity_split(cfg.k, qualified_mass_from_calibration(cal));
    }

    auto fitted = fit_method(cfg, method, cal, world, k_groups);

    if (!fitted->feasible()) {
      return make_rows(0.0, fitted->detail());
    }

    // Tally shortlist size and realized qualified count per pool, overall and
    // per group.
    std::vector<double> ss_sum(row_groups.size(), 0.0);
    std::vector<double> q_sum(row_groups.size(), 0.0);
    for (std::size_t p = 0; p < cfg.test_pools; ++p) {
      const Pool pool = sample_pool(world, cfg.m, pool_rng);
      const auto decisions = fitted->decide(pool, policy_rng);
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!decisions[i]) continue;
        ss_sum[0] += 1.0;
        q_sum[0] += pool.labels[i];
        if (!pool.groups.empty()) {
          for (std::size_t g = 1; g < row_groups.size(); ++g) {
            if (pool.groups[i] == row_groups[g]) {
              ss_sum[g] += 1.0;
              q_sum[g] += pool.labels[i];
              break;
            }
          }
        }
      }
    }

    auto rows = make_rows(1.0, fitted->detail());
    const double pools = static_cast<double>(cfg.test_pools);
    for (std::size_t g = 0; g < row_groups.size(); ++g) {
      rows[g].ss = ss_sum[g] / pools;
      rows[g].mean_realized_qualified = q_sum[g] / pools;
      const double target = g == 0 ? cfg.k : k_groups.at(row_groups[g]);
      rows[g].eq = rows[g].mean_realized_qualified >= target ? 1.0 : 0.0;
    }
    return rows;
  } catch (const std::exception& e) {
    return make_rows(0.0, std::string("error:") + e.what());
  }
}

ResultsTable run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t sweeps = sweep_count(cfg);
  const std::size_t jobs_per_method = sweeps * cfg.runs;
  const std::size_t total_jobs = cfg.methods.size() * jobs_per_method;

  std::vector<std::vector<TrialReport>> slots(total_jobs);
  auto run_job = [&](std::size_t job) {
    const std::size_t method_idx = job / jobs_per_method;
    const std::size_t rest = job % jobs_per_method;
    const std::size_t sweep_idx = rest / cfg.runs;
    const std::size_t run_id = rest % cfg.runs;
    slots[job] = run_trial(cfg, cfg.methods[method_idx], sweep_idx, run_id);
  };

  const std::size_t workers = std::max<std::size_t>(1, cfg.threads);
  if (workers == 1) {
    for (std::size_t job = 0; job < total_jobs; ++job) run_job(job);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t job = next.fetch_add(1);
          if (job >= total_jobs) return;
          try {
            run_job(job);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  ResultsTable table;
  for (auto& rows : slots) {
    for (auto& row : rows) table.rows.push_back(std::move(row));
  }

  // Aggregate rows, one per (method, sweep value, group), in table order.
  struct Agg {
    std::vector<const TrialReport*> rows;
  };
  std::vector<std::tuple<std::string, double, std::string>> order;
  std::map<std::tuple<std::string, double, std::string>, Agg> cells;
  for (const auto& row : table.rows) {
    const auto key = std::make_tuple(row.method, row.sweep_value, row.group);
    if (!cells.contains(key)) order.push_back(key);
    cells[key].rows.push_back(&row);
  }
  std::vector<TrialReport> aggregates;
  for (const auto& key : order) {
    const auto& cell = cells.at(key);
    const double n = static_cast<double>(cell.rows.size());
    TrialReport agg;
    agg.method = std::get<0>(key);
    agg.sweep_value = std::get<1>(key);
    agg.group = std::get<2>(key);
    agg.run_id = -1;
    double eq = 0.0, ss = 0.0, feas = 0.0, q = 0.0;
    for (const auto* row : cell.rows) {
      eq += row->eq;
      ss += row->ss;
      feas += row->feasible;
      q += row->mean_realized_qualified;
    }
    agg.eq = eq / n;
    agg.ss = ss / n;
    agg.feasible = feas / n;
    agg.mean_realized_qualified = q / n;
    agg.eq_se = std::sqrt(agg.eq * (1.0 - agg.eq) / n);
    double var = 0.0;
    for (const auto* row : cell.rows) var += (row->ss - agg.ss) * (row->ss - agg.ss);
    agg.ss_sd = n > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    aggregates.push_back(std::move(agg));
  }
  for (auto& agg : aggregates) table.rows.push_back(std::move(agg));
  return table;
}

std::string results_to_csv(const ResultsTable& table) {
  std::string out =
      "method,sweep_value,run_id,EQ,SS,feasible,group,mean_realized_qualified,eq_se,ss_sd,"
      "detail\n";
  for (const auto& row : table.rows) {
    out += row.method;
    out += ',';
    out += format_double(row.sweep_value);
    out += ',';
    out += row.is_aggregate() ? "agg" : std::to_string(row.run_id);
    out += ',';
    out += format_double(row.eq);
    out += ',';
    out += format_double(row.ss);
    out += ',';
    out += format_double(row.feasible);
    out += ',';
    out += row.group;
    out += ',';
    out += format_double(row.mean_realized_qualified);
    out += ',';
    out += row.is_aggregate() ? format_double(row.eq_se) : "";
    out += ',';
    out += row.is_aggregate() ? format_double(row.ss_sd) : "";
    out += ',';
    out += row.detail;
    out += '\n';
  }
  return out;
}

void emit_csv(const ResultsTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << results_to_csv(table);
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace css
