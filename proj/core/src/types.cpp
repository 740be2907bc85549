#include "css/types.hpp"

#include <algorithm>
#include <cmath>

namespace css {

CalibrationSet CalibrationSet::from_examples(std::vector<ScoredExample> examples) {
  if (examples.empty()) {
    throw EmptyInput("calibration set must contain at least one example");
  }
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const double s = examples[i].score;
    if (!(s >= 0.0 && s <= 1.0)) {
      throw ScoreOutOfRange(i, s);
    }
    if (examples[i].label != 0 && examples[i].label != 1) {
      throw BadParams("label must be 0 or 1 at index " + std::to_string(i));
    }
  }
  std::stable_sort(examples.begin(), examples.end(),
                   [](const ScoredExample& a, const ScoredExample& b) { return a.score > b.score; });
  return CalibrationSet(std::move(examples));
}

double CalibrationSet::positive_rate() const {
  std::size_t positives = 0;
  for (const auto& ex : examples_) positives += static_cast<std::size_t>(ex.label);
  return static_cast<double>(positives) / static_cast<double>(examples_.size());
}

bool CalibrationSet::has_groups() const {
  for (const auto& ex : examples_) {
    if (ex.has_group()) return true;
  }
  return false;
}

void Pool::validate() const {
  if (has_labels() && labels.size() != scores.size()) {
    throw DimensionMismatch("pool labels length does not match scores length");
  }
  if (has_groups() && groups.size() != scores.size()) {
    throw DimensionMismatch("pool groups length does not match scores length");
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!(scores[i] >= 0.0 && scores[i] <= 1.0)) {
      throw ScoreOutOfRange(i, scores[i]);
    }
  }
}

void GuaranteeConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidAlpha(alpha);
  if (!(pool_size > 0.0)) throw BadParams("pool_size must be positive");
  if (!(k >= 0.0)) throw BadParams("k must be non-negative");
  // k > pool_size is not rejected here: the requirement k/pool_size exceeds 1,
  // so every threshold search reports infeasible, which is the contract.
}

Shortlist Shortlist::from_decisions(std::vector<std::uint8_t> decisions,
                                    std::optional<StreamKey> rng_used) {
  Shortlist s;
  s.realized_size = 0;
  for (auto d : decisions) s.realized_size += d;
  s.decisions = std::move(decisions);
  s.rng_used = rng_used;
  return s;
}

}  // namespace css
