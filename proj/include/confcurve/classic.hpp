#pragma once

#include <span>
#include <string_view>

#include "confcurve/effects.hpp"
#include "confcurve/heterogeneity.hpp"

namespace confcurve {

enum class ClassicMethod { fixed, dl, hk };

std::string_view to_string(ClassicMethod m);

/// Inverse-variance estimate with a symmetric "estimate +/- factor" interval.
struct ClassicResult {
  double estimate;
  double se;
  double lower;
  double upper;
  double p_null;
  ClassicMethod method;
  double tau2_used;
  /// Set when the interval collapses (e.g. HK with zero residual variance).
  bool degenerate = false;
};

ClassicResult fixed_effect(std::span<const Study> studies, double level = 0.95);

/// Random effects with weights 1 / (se^2 + tau2) and a normal interval.
ClassicResult random_effects(std::span<const Study> studies, double level, double tau2);
ClassicResult dl_random_effects(std::span<const Study> studies, double level = 0.95,
                                Tau2Estimator estimator = Tau2Estimator::reml);

/// Unmodified Hartung-Knapp: weighted residual variance without truncation
/// and t_{k-1} quantiles.
ClassicResult hartung_knapp(std::span<const Study> studies, double level, double tau2);
ClassicResult hartung_knapp(std::span<const Study> studies, double level = 0.95,
                            Tau2Estimator estimator = Tau2Estimator::reml);

/// Two-sided centrality of a classic result at mu (normal, or t_{k-1} for HK).
double classic_centrality(const ClassicResult& r, double mu, int k);

}  // namespace confcurve
