#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace confcurve {

// Standard normal distribution. Tails are evaluated through erfc so that
// both cdf(x) and cdf(-x) keep full relative precision.
double std_normal_pdf(double x);
double std_normal_cdf(double x);
double std_normal_quantile(double p);

// Regularized incomplete gamma P(a, x) and its complement Q(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

double chi2_cdf(double x, double df);
/// Upper tail Pr(X > x), computed directly rather than as 1 - cdf.
double chi2_sf(double x, double df);

double student_t_cdf(double x, double df);
double student_t_quantile(double p, double df);

/// Irwin-Hall CDF: the distribution of a sum of k independent U(0,1).
/// Exact alternating sum for k < 12, normal approximation
/// Phi(sqrt(12k)(s/k - 1/2)) for k >= 12.
double irwin_hall_cdf(double s, int k);
/// Exact alternating-sum evaluation for any k (loses precision for large k).
double irwin_hall_cdf_exact(double s, int k);
/// The central-limit approximation used for k >= 12.
double irwin_hall_cdf_normal(double s, int k);

/// Fisher noncentral hypergeometric pmf: X counts events in the first group
/// given margins n1, n0 and total events t, with odds ratio psi.
double nc_hypergeom_pmf(int x, int n1, int n0, int t, double psi);

/// Support [lo, hi] of the noncentral hypergeometric for the given margins.
struct HypergeomSupport {
  int lo;
  int hi;
};
HypergeomSupport nc_hypergeom_support(int n1, int n0, int t);

/// Skew-normal distribution SN(xi, omega, alpha).
class SkewNormal {
 public:
  SkewNormal(double xi, double omega, double alpha);

  double xi() const { return xi_; }
  double omega() const { return omega_; }
  double alpha() const { return alpha_; }
  double delta() const { return delta_; }

  double pdf(double x) const;
  /// Adaptive quadrature of the density, absolute tolerance 1e-10 or better.
  double cdf(double x) const;
  double quantile(double p) const;
  double mean() const;
  double variance() const;

  /// Draws xi + omega * (delta |Z0| + sqrt(1 - delta^2) Z1).
  template <class Engine>
  double sample(Engine& rng) const {
    std::normal_distribution<double> norm;
    const double z0 = norm(rng);
    const double z1 = norm(rng);
    return xi_ + omega_ * (delta_ * std::abs(z0) + delta_c_ * z1);
  }

 private:
  double xi_;
  double omega_;
  double alpha_;
  double delta_;
  double delta_c_;
};

/// Adaptive Gauss-Kronrod (7-15) integration of f over [a, b].
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-12);

}  // namespace confcurve

#include "confcurve/detail/quadrature.hpp"
