#include "css/logistic.hpp"

#include <cmath>

namespace css {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

double LogisticModel::predict(std::span<const double> features) const {
  if (features.size() != weights.size()) {
    throw DimensionMismatch("feature vector length does not match the model");
  }
  double z = intercept;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    z += weights[j] * (features[j] - means[j]) / scales[j];
  }
  return sigmoid(z);
}

LogisticModel train_logistic(const std::vector<FeatureRow>& rows, const LogisticConfig& config) {
  if (rows.size() < 2) throw EmptyInput("train_logistic needs at least two rows");
  const std::size_t n = rows.size();
  const std::size_t dim = rows.front().features.size();
  for (const auto& row : rows) {
    if (row.features.size() != dim) {
      throw DimensionMismatch("inconsistent feature dimension");
    }
    if (row.label != 0 && row.label != 1) throw BadParams("labels must be 0 or 1");
  }
  if (dim == 0) throw EmptyInput("rows carry no features");

  LogisticModel model;
  model.means.assign(dim, 0.0);
  model.scales.assign(dim, 1.0);
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < dim; ++j) model.means[j] += row.features[j];
  }
  for (std::size_t j = 0; j < dim; ++j) model.means[j] /= static_cast<double>(n);
  std::vector<double> var(dim, 0.0);
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = row.features[j] - model.means[j];
      var[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < dim; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(n));
    model.scales[j] = sd > 0.0 ? sd : 1.0;  // zero-variance features scale by 1
  }

  std::vector<std::vector<double>> z(n, std::vector<double>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      z[i][j] = (rows[i].features[j] - model.means[j]) / model.scales[j];
    }
  }

  model.weights.assign(dim, 0.0);
  model.intercept = 0.0;
  std::vector<double> grad(dim);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double lin = model.intercept;
      for (std::size_t j = 0; j < dim; ++j) lin += model.weights[j] * z[i][j];
      const double err = sigmoid(lin) - static_cast<double>(rows[i].label);
      for (std::size_t j = 0; j < dim; ++j) grad[j] += err * z[i][j];
      grad_b += err;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < dim; ++j) {
      model.weights[j] -= config.learning_rate * (grad[j] * inv_n + config.l2 * model.weights[j]);
    }
    model.intercept -= config.learning_rate * grad_b * inv_n;
  }
  return model;
}

}  // namespace css
