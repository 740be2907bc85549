#include "css/diversity.hpp"

#include <cmath>

namespace css {

std::map<std::string, CssResult> css_diversity_fit(const GroupPlan& plan, double alpha) {
  if (plan.per_group.empty()) throw EmptyInput("group plan has no groups");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidAlpha(alpha);
  const double split_alpha = alpha / static_cast<double>(plan.per_group.size());
  std::map<std::string, CssResult> thresholds;
  for (const auto& [name, entry] : plan.per_group) {
    thresholds.emplace(
        name, css_threshold_dynamic(entry.calibration, entry.k, entry.expected_m, split_alpha));
  }
  return thresholds;
}

Shortlist css_diversity_apply(const std::map<std::string, CssResult>& thresholds,
                              const Pool& pool) {
  if (!pool.has_groups()) throw UnknownGroup("(pool carries no group labels)");
  pool.validate();
  std::vector<std::uint8_t> decisions(pool.size(), 0);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto it = thresholds.find(pool.groups[i]);
    if (it == thresholds.end()) throw UnknownGroup(pool.groups[i]);
    const CssResult& r = it->second;
    if (r.feasible && pool.scores[i] >= r.threshold) decisions[i] = 1;
  }
  return Shortlist::from_decisions(std::move(decisions));
}

DiversityResult css_diversity(const GroupPlan& plan, double alpha, const Pool& pool) {
  DiversityResult result;
  result.per_group = css_diversity_fit(plan, alpha);
  result.shortlist = css_diversity_apply(result.per_group, pool);
  return result;
}

std::map<std::string, double> equal_opportunity_split(
    double k_total, const std::map<std::string, double>& group_qualified_mass) {
  if (group_qualified_mass.empty()) throw EmptyInput("no groups to split across");
  if (!(k_total >= 0.0)) throw BadParams("k_total must be non-negative");
  double total = 0.0;
  for (const auto& [name, mass] : group_qualified_mass) {
    if (!(mass >= 0.0)) throw BadParams("negative qualified mass for group " + name);
    total += mass;
  }
  if (total == 0.0) throw ZeroMass();

  std::map<std::string, double> split;
  double assigned = 0.0;
  std::size_t index = 0;
  const std::size_t last = group_qualified_mass.size() - 1;
  for (const auto& [name, mass] : group_qualified_mass) {
    if (index == last) {
      split[name] = k_total - assigned;  // absorbs rounding residue
    } else {
      const double kg = k_total * mass / total;
      split[name] = kg;
      assigned += kg;
    }
    ++index;
  }
  return split;
}

std::map<std::string, double> qualified_mass_from_calibration(const CalibrationSet& cal) {
  std::map<std::string, double> mass;
  const double n = static_cast<double>(cal.size());
  for (const auto& ex : cal.examples()) {
    mass[ex.group];  // make sure every observed group is present
    if (ex.label == 1) mass[ex.group] += 1.0 / n;
  }
  return mass;
}

std::map<std::string, CalibrationSet> split_by_group(const CalibrationSet& cal) {
  std::map<std::string, std::vector<ScoredExample>> buckets;
  for (const auto& ex : cal.examples()) buckets[ex.group].push_back(ex);

  std::map<std::string, CalibrationSet> out;
  for (auto& [name, examples] : buckets) {
    if (examples.empty()) throw EmptyGroupCalibration(name);
    out.emplace(name, make_calibration_set(std::move(examples)));
  }
  return out;
}

}  // namespace css
