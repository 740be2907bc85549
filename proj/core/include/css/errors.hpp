#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace css {

// Base class for every error this library raises on bad inputs or bad state.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInput : public Error {
 public:
  EmptyInput() : Error("empty input") {}
  explicit EmptyInput(const std::string& what) : Error(what) {}
};

class ScoreOutOfRange : public Error {
 public:
  explicit ScoreOutOfRange(std::size_t index, double score)
      : Error("score out of [0,1] at index " + std::to_string(index) + ": " +
              std::to_string(score)),
        index(index),
        score(score) {}
  std::size_t index;
  double score;
};

class InvalidAlpha : public Error {
 public:
  explicit InvalidAlpha(double alpha)
      : Error("alpha must lie in (0,1), got " + std::to_string(alpha)), alpha(alpha) {}
  double alpha;
};

class InvalidN : public Error {
 public:
  explicit InvalidN(std::size_t n) : Error("n must be >= 1, got " + std::to_string(n)), n(n) {}
  std::size_t n;
};

class BadEdges : public Error {
 public:
  explicit BadEdges(const std::string& what) : Error(what) {}
};

class Infeasible : public Error {
 public:
  explicit Infeasible(double total_mass)
      : Error("target k exceeds available probability mass " + std::to_string(total_mass)),
        total_mass(total_mass) {}
  double total_mass;
};

class BadDistribution : public Error {
 public:
  explicit BadDistribution(const std::string& what) : Error(what) {}
};

class TooManyBins : public Error {
 public:
  TooManyBins(std::size_t bins, std::size_t n)
      : Error("requested " + std::to_string(bins) + " bins with only " + std::to_string(n) +
              " calibration examples"),
        bins(bins),
        n(n) {}
  std::size_t bins;
  std::size_t n;
};

class UnknownGroup : public Error {
 public:
  explicit UnknownGroup(const std::string& group)
      : Error("group \"" + group + "\" not present in the group plan"), group(group) {}
  std::string group;
};

class EmptyGroupCalibration : public Error {
 public:
  explicit EmptyGroupCalibration(const std::string& group)
      : Error("group \"" + group + "\" has no calibration data"), group(group) {}
  std::string group;
};

class ZeroMass : public Error {
 public:
  ZeroMass() : Error("all group qualified masses are zero") {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

class SupportMismatch : public Error {
 public:
  explicit SupportMismatch(const std::string& what) : Error(what) {}
};

class BadParams : public Error {
 public:
  explicit BadParams(const std::string& what) : Error(what) {}
};

class NoSolution : public Error {
 public:
  explicit NoSolution(const std::string& what) : Error(what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column \"" + column + "\": " + what),
        line(line),
        column(column) {}
  std::size_t line;
  std::string column;
};

class MissingHeader : public Error {
 public:
  explicit MissingHeader(const std::string& what) : Error(what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace css
