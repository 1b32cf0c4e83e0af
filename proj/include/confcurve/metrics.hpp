#pragma once

#include <Eigen/Core>
#include <span>

namespace confcurve {

/// (upper + lower - 2 estimate) / (upper - lower), in [-1, 1].
double beta_skewness(double estimate, double lower, double upper);

/// Fisher's weighted skewness coefficient of the estimates. Requires k >= 3
/// and non-zero weighted dispersion.
double gamma_weighted_skewness(const Eigen::Ref<const Eigen::ArrayXd>& estimates,
                               const Eigen::Ref<const Eigen::ArrayXd>& weights);

/// Values within 1e-12 of zero map to 0.
int sign_class(double x);

struct KappaResult {
  double kappa;
  /// Expected agreement was 1 (a single shared category); kappa is then
  /// 1 for perfect agreement and 0 otherwise.
  bool degenerate;
};

/// Cohen's kappa over the three sign classes {-1, 0, +1}.
KappaResult cohen_kappa(std::span<const int> a, std::span<const int> b);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace confcurve
