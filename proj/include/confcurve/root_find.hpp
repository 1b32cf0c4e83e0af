#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace confcurve {

struct RootResult {
  double x = std::numeric_limits<double>::quiet_NaN();
  double fx = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  bool converged = false;
};

/// Brent's bracketed root finder (bisection safeguarding secant and inverse
/// quadratic steps). Requires f(lo) and f(hi) of opposite sign or zero.
template <class F>
RootResult find_root(F&& f, double lo, double hi, double f_lo, double f_hi,
                     double x_tol = 1e-11, int max_iter = 300) {
  if ((f_lo > 0 && f_hi > 0) || (f_lo < 0 && f_hi < 0)) {
    throw std::invalid_argument("find_root: interval does not bracket a root");
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double a = lo, b = hi, fa = f_lo, fb = f_hi;
  double c = b, fc = fb, d = b - a, e = d;
  RootResult res;
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it + 1;
    if ((fb > 0 && fc > 0) || (fb < 0 && fc < 0)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * x_tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) {
      res.x = b;
      res.fx = fb;
      res.converged = true;
      return res;
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
    fb = f(b);
  }
  res.x = b;
  res.fx = fb;
  return res;
}

template <class F>
RootResult find_root(F&& f, double lo, double hi, double x_tol = 1e-11) {
  return find_root(f, lo, hi, f(lo), f(hi), x_tol);
}

}  // namespace confcurve
