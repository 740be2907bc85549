#pragma once

#include <span>
#include <string>
#include <vector>

#include "css/types.hpp"

namespace css {

struct FeatureRow {
  int label = 0;
  std::vector<double> features;
  std::string group;
};

// L2-regularized logistic regression over standardized features. Weights are
// in standardized space; predict() applies the stored means/scales first.
struct LogisticModel {
  double intercept = 0.0;
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> scales;

  double predict(std::span<const double> features) const;
};

struct LogisticConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 500;
  double l2 = 1e-4;
};

// Full-batch gradient descent on the regularized log-loss. Features are
// standardized to zero mean and unit scale (zero-variance features keep scale
// 1). Deterministic given row order.
LogisticModel train_logistic(const std::vector<FeatureRow>& rows,
                             const LogisticConfig& config = {});

}  // namespace css
