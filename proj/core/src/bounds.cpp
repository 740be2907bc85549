#include "css/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace css {

double epsilon(double alpha, std::size_t n) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidAlpha(alpha);
  if (n < 1) throw InvalidN(n);
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

DeltaCurve DeltaCurve::from_calibration(const CalibrationSet& cal) {
  const auto& examples = cal.examples();  // sorted by descending score
  DeltaCurve curve;
  curve.n_ = examples.size();

  // Walk descending scores accumulating positives; ties at one score form a
  // single step.
  std::vector<double> desc_breaks;
  std::vector<double> desc_values;
  std::size_t positives = 0;
  std::size_t i = 0;
  const double n = static_cast<double>(examples.size());
  while (i < examples.size()) {
    const double s = examples[i].score;
    std::size_t j = i;
    while (j < examples.size() && examples[j].score == s) {
      positives += static_cast<std::size_t>(examples[j].label);
      ++j;
    }
    desc_breaks.push_back(s);
    desc_values.push_back(static_cast<double>(positives) / n);
    i = j;
  }
  curve.value_at_zero_ = static_cast<double>(positives) / n;

  curve.breakpoints_.assign(desc_breaks.rbegin(), desc_breaks.rend());
  curve.values_.assign(desc_values.rbegin(), desc_values.rend());
  return curve;
}

double DeltaCurve::value_at(double t) const {
  if (t <= 0.0) return value_at_zero_;
  if (t > breakpoints_.back()) return 0.0;
  // First breakpoint >= t identifies the piece (breakpoint[j-1], breakpoint[j]].
  const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
}

std::size_t BinModel::n() const {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

std::size_t BinModel::bin_of(double score) const {
  // Highest bin whose lower edge is <= score. edges are descending, so this
  // is the first b in 1..B with edges[b] <= score; b = B always qualifies.
  const auto it = std::lower_bound(edges.begin() + 1, edges.end(), score,
                                   [](double edge, double s) { return edge > s; });
  return static_cast<std::size_t>(it - edges.begin());
}

BinModel bin_deltas(const CalibrationSet& cal, std::vector<double> edges) {
  if (edges.size() < 2) throw BadEdges("need at least two edges");
  if (edges.front() != 1.0 || edges.back() != 0.0) {
    throw BadEdges("edges must start at 1 and end at 0");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] < edges[i - 1])) throw BadEdges("edges must be strictly descending");
  }

  BinModel model;
  model.edges = std::move(edges);
  const std::size_t B = model.edges.size() - 1;
  model.deltas.assign(B, 0.0);
  model.counts.assign(B, 0);

  const double n = static_cast<double>(cal.size());
  for (const auto& ex : cal.examples()) {
    const std::size_t b = model.bin_of(ex.score);
    model.counts[b - 1] += 1;
    model.deltas[b - 1] += static_cast<double>(ex.label);
  }
  for (auto& d : model.deltas) d /= n;
  return model;
}

double worst_case_bound(double k, double alpha2) {
  if (!(alpha2 > 0.0 && alpha2 < 1.0)) throw InvalidAlpha(alpha2);
  if (!(k >= 0.0)) throw BadParams("k must be non-negative");
  const double log_term = std::log(1.0 / alpha2);
  return k - log_term / 3.0 - std::sqrt(log_term * log_term + 18.0 * k * log_term) / 3.0;
}

double worst_case_bound_clamped(double k, double alpha2) {
  return std::max(0.0, worst_case_bound(k, alpha2));
}

bool worst_case_bound_out_of_range(double k, double alpha2) {
  return !(alpha2 > std::exp(-2.25 * k) && alpha2 < 1.0);
}

double solve_k_for_worst_case(double k_worst, double alpha2) {
  if (!(alpha2 > 0.0 && alpha2 < 1.0)) throw InvalidAlpha(alpha2);
  if (!(k_worst >= 0.0)) throw BadParams("k_worst must be non-negative");

  // worst_case_bound is strictly increasing in k and <= k, so the solution
  // lies in [k_worst, hi] once the bound at hi clears k_worst.
  double lo = k_worst;
  double hi = std::max(1.0, 2.0 * k_worst);
  int doublings = 0;
  while (worst_case_bound(hi, alpha2) < k_worst) {
    hi *= 2.0;
    if (++doublings > 200) throw NoSolution("bisection bracket not found");
  }
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (worst_case_bound(mid, alpha2) >= k_worst) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace css
