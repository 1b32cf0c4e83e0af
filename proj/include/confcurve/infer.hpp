#pragma once

#include <span>
#include <vector>

#include "confcurve/combine.hpp"

namespace confcurve {

/// Outcome of solving p(mu) = target. Non-convergence is reported, never
/// replaced by a fallback value.
struct LevelCrossing {
  double mu;
  bool converged;
};

struct ConfidenceInterval {
  double lower;
  double upper;
  bool converged;
};

struct AuccResult {
  double aucc;
  double below;  // area left of the estimate
  double above;  // area right of the estimate
  double ratio;  // (above - below) / aucc
  double support_lo;
  double support_hi;
  bool converged;
};

struct DensityPoint {
  double mu;
  double density;
};

struct MetaResult {
  double estimate;
  double lower;
  double upper;
  double level;
  double p_null;  // two-sided, centrality at mu = 0
  double width;
  double aucc;
  double aucc_ratio;
  double beta_skew;
  bool converged;
};

/// Centrality (confidence curve) 2 min{p(mu), 1 - p(mu)}.
double centrality(const PValueFunction& f, double mu);

/// Root of p(mu) = target in (0, 1). The bracket starts from the function's
/// hint interval and is doubled at most 60 times.
LevelCrossing solve_level(const PValueFunction& f, double target);

/// Median estimate: the root of p(mu) = 0.5.
LevelCrossing median_estimate(const PValueFunction& f);

/// Two-sided interval bounded by the crossings of centrality = 1 - level.
ConfidenceInterval confidence_interval(const PValueFunction& f, double level = 0.95);

/// Closed-form solutions of p_W(mu) = alpha and p_T(mu) = alpha under
/// normal p-values with effective standard errors sqrt(phi se^2 + tau2).
double closed_form_wilkinson(std::span<const Study> studies, double alpha,
                             Orientation orientation, Adjustment adj = {});
double closed_form_tippett(std::span<const Study> studies, double alpha,
                           Orientation orientation, Adjustment adj = {});

/// Number of trapezoid nodes on each side of the estimate.
inline constexpr int kAuccNodes = 4001;
/// The integration support ends where the centrality drops to this value.
inline constexpr double kAuccTail = 5e-7;

/// Area under the confidence curve, split at the estimate.
AuccResult aucc(const PValueFunction& f, double estimate);
AuccResult aucc(const PValueFunction& f);

/// Confidence density by central differences of the p-value function with
/// step (U - L) / 2000 over the AUCC support [L, U]. Negative values from
/// round-off are clamped to zero. Decreasing (orientation less) functions
/// are differentiated with the sign flipped.
std::vector<DensityPoint> confidence_density(const PValueFunction& f);
/// Same, evaluated at caller-supplied points.
std::vector<DensityPoint> confidence_density(const PValueFunction& f,
                                             std::span<const double> grid);

MetaResult analyze(const PValueFunction& f, double level = 0.95);

}  // namespace confcurve
