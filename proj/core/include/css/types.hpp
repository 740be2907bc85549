#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "css/errors.hpp"

namespace css {

// One calibration observation: classifier score, binary outcome, optional
// demographic group key.
struct ScoredExample {
  double score = 0.0;
  int label = 0;
  std::string group;  // empty = ungrouped

  bool has_group() const { return !group.empty(); }
};

// Immutable score-sorted calibration data. Examples are stored by descending
// score; equal scores keep their original input order so every empirical step
// function computed downstream is deterministic.
class CalibrationSet {
 public:
  static CalibrationSet from_examples(std::vector<ScoredExample> examples);

  const std::vector<ScoredExample>& examples() const { return examples_; }
  std::size_t size() const { return examples_.size(); }

  double positive_rate() const;
  bool has_groups() const;

 private:
  explicit CalibrationSet(std::vector<ScoredExample> sorted) : examples_(std::move(sorted)) {}
  std::vector<ScoredExample> examples_;
};

inline CalibrationSet make_calibration_set(std::vector<ScoredExample> examples) {
  return CalibrationSet::from_examples(std::move(examples));
}

// A pool of candidates at decision time. Policies read only scores (and
// groups for diversity); labels exist only in simulation and feed metric
// computation, never decisions.
struct Pool {
  std::vector<double> scores;
  std::vector<int> labels;          // empty when hidden
  std::vector<std::string> groups;  // empty when absent

  std::size_t size() const { return scores.size(); }
  bool has_labels() const { return !labels.empty(); }
  bool has_groups() const { return !groups.empty(); }
  void validate() const;
};

// The (k, pool size or E[M], alpha) contract a policy must satisfy. k is a
// real: the constraint is on an expectation and per-group splits produce
// fractional targets.
struct GuaranteeConfig {
  double k = 5.0;
  double pool_size = 100.0;
  double alpha = 0.1;

  void validate() const;
};

// Identifies the generator stream a randomized operation consumed, enough to
// replay it byte-for-byte.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

struct Shortlist {
  std::vector<std::uint8_t> decisions;
  std::size_t realized_size = 0;
  std::optional<StreamKey> rng_used;  // set when the policy drew randomness

  static Shortlist from_decisions(std::vector<std::uint8_t> decisions,
                                  std::optional<StreamKey> rng_used = std::nullopt);
};

}  // namespace css
