#include "confcurve/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace confcurve {

double beta_skewness(double estimate, double lower, double upper) {
  if (!(upper > lower)) throw std::invalid_argument("beta_skewness: interval has zero width");
  return std::clamp((upper + lower - 2.0 * estimate) / (upper - lower), -1.0, 1.0);
}

double gamma_weighted_skewness(const Eigen::Ref<const Eigen::ArrayXd>& estimates,
                               const Eigen::Ref<const Eigen::ArrayXd>& weights) {
  if (estimates.size() != weights.size()) {
    throw std::invalid_argument("gamma_weighted_skewness: size mismatch");
  }
  if (estimates.size() < 3) {
    throw std::invalid_argument("gamma_weighted_skewness: at least three estimates required");
  }
  if (!(weights > 0.0).all()) {
    throw std::invalid_argument("gamma_weighted_skewness: weights must be positive");
  }
  const double sw = weights.sum();
  const Eigen::ArrayXd dev = estimates - (weights * estimates).sum() / sw;
  const double m2 = (weights * dev.square()).sum();
  if (!(m2 > 0.0)) throw std::invalid_argument("gamma_weighted_skewness: no dispersion");
  const double m3 = (weights * dev.cube()).sum();
  return m3 * std::sqrt(sw) / std::pow(m2, 1.5);
}

int sign_class(double x) {
  if (std::abs(x) < 1e-12) return 0;
  return x > 0 ? 1 : -1;
}

KappaResult cohen_kappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cohen_kappa: length mismatch");
  if (a.empty()) throw std::invalid_argument("cohen_kappa: empty input");
  std::array<std::array<double, 3>, 3> table{};
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < -1 || a[i] > 1 || b[i] < -1 || b[i] > 1) {
      throw std::invalid_argument("cohen_kappa: categories must be -1, 0 or +1");
    }
    table[a[i] + 1][b[i] + 1] += 1.0;
  }
  const double n = static_cast<double>(a.size());
  double observed = 0.0;
  double expected = 0.0;
  for (int i = 0; i < 3; ++i) {
    observed += table[i][i] / n;
    double row = 0.0, col = 0.0;
    for (int j = 0; j < 3; ++j) {
      row += table[i][j];
      col += table[j][i];
    }
    expected += (row / n) * (col / n);
  }
  if (expected >= 1.0 - 1e-15) return {observed >= 1.0 - 1e-15 ? 1.0 : 0.0, true};
  return {(observed - expected) / (1.0 - expected), false};
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson_correlation: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson_correlation: need at least two pairs");
  const Eigen::Map<const Eigen::ArrayXd> xa(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::Map<const Eigen::ArrayXd> ya(y.data(), static_cast<Eigen::Index>(y.size()));
  const Eigen::ArrayXd dx = xa - xa.mean();
  const Eigen::ArrayXd dy = ya - ya.mean();
  const double sxx = dx.square().sum();
  const double syy = dy.square().sum();
  if (!(sxx > 0.0 && syy > 0.0)) {
    throw std::invalid_argument("pearson_correlation: zero variance");
  }
  return std::clamp((dx * dy).sum() / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace confcurve
