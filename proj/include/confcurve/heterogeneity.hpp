#pragma once

#include <span>
#include <string_view>

#include "confcurve/effects.hpp"

namespace confcurve {

enum class Tau2Estimator { none, dl, reml };

std::string_view to_string(Tau2Estimator e);
Tau2Estimator parse_tau2_estimator(std::string_view name);

struct HeterogeneityEstimate {
  double q = 0.0;
  double i2 = 0.0;
  double tau2 = 0.0;
  Tau2Estimator estimator = Tau2Estimator::none;
  double phi = 1.0;
  int iterations = 0;
  bool converged = true;
};

/// Cochran's Q with inverse-variance weights. Requires k >= 2.
double cochran_q(std::span<const Study> studies);

/// Higgins' I^2 = max{Q - (k - 1), 0} / Q, defined as 0 for Q = 0.
double higgins_i2(double q, int k);

/// DerSimonian-Laird moment estimator of tau^2, truncated at zero.
double tau2_dl(std::span<const Study> studies);

/// REML estimate of tau^2 by the Fisher-scoring fixed point
///   tau2 <- max{0, sum w^2 [(theta - mu)^2 - se^2] / sum w^2 + 1 / sum w},
/// started at the DL estimate.
HeterogeneityEstimate tau2_reml(std::span<const Study> studies, double tol = 1e-10,
                                int max_iter = 1000);

/// Multiplicative overdispersion max{Q / (k - 1), 1}.
double phi_multiplicative(double q, int k);

/// Q, I^2, phi and tau^2 by the requested estimator.
HeterogeneityEstimate estimate_heterogeneity(std::span<const Study> studies,
                                             Tau2Estimator estimator);

}  // namespace confcurve
