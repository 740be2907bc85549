#pragma once

#include <map>
#include <string>
#include <vector>

#include "css/css.hpp"
#include "css/types.hpp"

namespace css {

// Per-group screening targets and calibration data. Groups may overlap in the
// sense that the same underlying example can appear in several groups'
// calibration sets; a pool candidate carries one group key and is selected by
// that group's threshold.
struct GroupPlan {
  struct Entry {
    double k = 0.0;
    double expected_m = 0.0;
    CalibrationSet calibration;
  };
  std::map<std::string, Entry> per_group;  // ordered: deterministic merges
};

struct DiversityResult {
  Shortlist shortlist;
  std::map<std::string, CssResult> per_group;
};

// Calibrated subset selection per demographic group: each group's threshold
// is computed by the dynamic-pool-size search at significance alpha/|groups|,
// and the shortlist is the union of the per-group selections. A group whose
// search is infeasible contributes no candidates and is flagged in its
// CssResult.
DiversityResult css_diversity(const GroupPlan& plan, double alpha, const Pool& pool);

// The two halves of css_diversity, for callers that fit once and screen many
// pools.
std::map<std::string, CssResult> css_diversity_fit(const GroupPlan& plan, double alpha);
Shortlist css_diversity_apply(const std::map<std::string, CssResult>& thresholds,
                              const Pool& pool);

// Proportional split of the total target across groups,
//   k_g = k_total * mass_g / sum(mass),
// with the last group (identifier order) absorbing the sub-1e-12 rounding
// residue so the parts sum to k_total exactly.
std::map<std::string, double> equal_opportunity_split(
    double k_total, const std::map<std::string, double>& group_qualified_mass);

// Empirical per-group qualified mass from grouped calibration data:
//   mass_g = (1/n) sum_i y_i 1{group_i = g}.
std::map<std::string, double> qualified_mass_from_calibration(const CalibrationSet& cal);

// Partition a grouped calibration set by group key. Throws
// EmptyGroupCalibration when a requested group has no examples.
std::map<std::string, CalibrationSet> split_by_group(const CalibrationSet& cal);

}  // namespace css
