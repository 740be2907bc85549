#pragma once

#include <string>
#include <vector>

#include "css/logistic.hpp"
#include "css/types.hpp"

namespace css {

// Shortest exact decimal form of a double (round-trips bit-for-bit).
std::string format_double(double value);
// Fixed 17-significant-digit form used by the on-disk schemas.
std::string format_double17(double value);

// Scored data CSV, header `score,label[,group]`.
std::vector<ScoredExample> read_scored_rows(const std::string& path);
CalibrationSet read_scored_csv(const std::string& path);
Pool read_pool_csv(const std::string& path);
void write_scored_csv(const std::string& path, const std::vector<ScoredExample>& rows);

// Feature data CSV, header `label,f1,...,fD[,group]`.
std::vector<FeatureRow> read_feature_csv(const std::string& path);
void write_feature_csv(const std::string& path, const std::vector<FeatureRow>& rows);

// Plain-text logistic model file:
//   line 1: `logistic v1`
//   line 2: intercept
//   next D lines: one weight per feature
//   next D lines: `mean scale` per feature
// All numbers at 17 significant digits.
LogisticModel read_model(const std::string& path);
void write_model(const std::string& path, const LogisticModel& model);

}  // namespace css
