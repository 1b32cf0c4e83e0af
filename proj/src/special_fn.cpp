#include "confcurve/special_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "confcurve/root_find.hpp"

namespace confcurve {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw std::domain_error(std::string(what) + ": non-finite argument");
  }
}

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Series for P(a, x); valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 10000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x); valid for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double beta_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < 10000; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double x) {
  require_finite(x, "std_normal_cdf");
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// Wichura's AS241 (PPND16) followed by one Halley correction step.
double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("std_normal_quantile: p must lie in (0, 1)");
  }
  const double q = p - 0.5;
  double x;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    x = q *
        (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
              67265.770927008700853) * r + 45921.953931549871457) * r +
            13731.693765509461125) * r + 1971.5909503065514427) * r +
          133.14166789178437745) * r + 3.387132872796366608) /
        (((((((5226.495278852545925 * r + 28729.085735721942674) * r +
              39307.89580009271061) * r + 21213.794301586595867) * r +
            5394.1960214247511077) * r + 687.1870074920579083) * r +
          42.313330701600911252) * r + 1.0);
  } else {
    double r = q < 0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    if (r <= 5.0) {
      r -= 1.6;
      x = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                0.24178072517745061177) * r + 1.27045825245236838258) * r +
              3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) * r + 0.14810397642748007459) * r +
              0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
    } else {
      r -= 5.0;
      x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                0.0012426609473880784386) * r + 0.026532189526576123093) * r +
              0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
              0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
    }
    if (q < 0) x = -x;
  }
  // Halley step on whichever tail keeps relative precision.
  const double err = x < 0 ? std_normal_cdf(x) - p : (1.0 - p) - std_normal_cdf(-x);
  const double u = err / std_normal_pdf(x);
  if (std::isfinite(u)) x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("gamma_p: a must be positive");
  if (x < 0.0) throw std::domain_error("gamma_p: x must be non-negative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_fraction(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("gamma_q: a must be positive");
  if (x < 0.0) throw std::domain_error("gamma_q: x must be non-negative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_fraction(a, x);
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) {
    throw std::domain_error("incomplete_beta: shape parameters must be positive");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("incomplete_beta: x must lie in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double chi2_cdf(double x, double df) {
  if (!(df > 0.0)) throw std::domain_error("chi2_cdf: df must be positive");
  if (std::isnan(x) || x < 0.0) throw std::domain_error("chi2_cdf: x must be non-negative");
  return gamma_p(0.5 * df, 0.5 * x);
}

double chi2_sf(double x, double df) {
  if (!(df > 0.0)) throw std::domain_error("chi2_sf: df must be positive");
  if (std::isnan(x) || x < 0.0) throw std::domain_error("chi2_sf: x must be non-negative");
  return gamma_q(0.5 * df, 0.5 * x);
}

double student_t_cdf(double x, double df) {
  if (!(df > 0.0)) throw std::domain_error("student_t_cdf: df must be positive");
  if (std::isnan(x)) throw std::domain_error("student_t_cdf: NaN argument");
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + x * x));
  return x > 0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double df) {
  if (!(df > 0.0)) throw std::domain_error("student_t_quantile: df must be positive");
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("student_t_quantile: p must lie in (0, 1)");
  }
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -student_t_quantile(1.0 - p, df);
  // Upper half: work with the tail probability to keep precision.
  const double tail = 1.0 - p;
  auto g = [&](double t) { return 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t)) - tail; };
  double hi = std::max(1.0, 2.0 * std_normal_quantile(p));
  while (g(hi) > 0.0) hi *= 2.0;
  return find_root(g, 0.0, hi, 0.5 - tail, g(hi), 1e-13).x;
}

double irwin_hall_cdf_exact(double s, int k) {
  if (k < 1) throw std::domain_error("irwin_hall_cdf: k must be at least 1");
  if (std::isnan(s)) throw std::domain_error("irwin_hall_cdf: NaN argument");
  if (s <= 0.0) return 0.0;
  if (s >= k) return 1.0;
  const int upper = static_cast<int>(std::floor(s));
  double sum = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= upper; ++j) {
    const double term = binom * std::pow(s - j, k);
    sum += (j % 2 == 0) ? term : -term;
    binom = binom * (k - j) / (j + 1);
  }
  return std::clamp(sum / std::tgamma(k + 1.0), 0.0, 1.0);
}

double irwin_hall_cdf_normal(double s, int k) {
  if (k < 1) throw std::domain_error("irwin_hall_cdf: k must be at least 1");
  return std_normal_cdf(std::sqrt(12.0 * k) * (s / k - 0.5));
}

double irwin_hall_cdf(double s, int k) {
  if (k < 1) throw std::domain_error("irwin_hall_cdf: k must be at least 1");
  if (k >= 12) return irwin_hall_cdf_normal(s, k);
  // The alternating sum cancels less on the lower half; mirror the upper half.
  if (s <= 0.5 * k) return irwin_hall_cdf_exact(s, k);
  return 1.0 - irwin_hall_cdf_exact(k - s, k);
}

HypergeomSupport nc_hypergeom_support(int n1, int n0, int t) {
  if (n1 < 0 || n0 < 0 || t < 0 || t > n1 + n0) {
    throw std::domain_error("nc_hypergeom: infeasible margins");
  }
  return {std::max(0, t - n0), std::min(t, n1)};
}

double nc_hypergeom_pmf(int x, int n1, int n0, int t, double psi) {
  if (!(psi > 0.0) || !std::isfinite(psi)) {
    throw std::domain_error("nc_hypergeom_pmf: psi must be positive and finite");
  }
  const auto [lo, hi] = nc_hypergeom_support(n1, n0, t);
  if (x < lo || x > hi) throw std::domain_error("nc_hypergeom_pmf: x outside support");
  const double log_psi = std::log(psi);
  auto log_weight = [&](int y) { return log_choose(n1, y) + log_choose(n0, t - y) + y * log_psi; };
  double max_log = -std::numeric_limits<double>::infinity();
  for (int y = lo; y <= hi; ++y) max_log = std::max(max_log, log_weight(y));
  double norm = 0.0;
  for (int y = lo; y <= hi; ++y) norm += std::exp(log_weight(y) - max_log);
  return std::exp(log_weight(x) - max_log) / norm;
}

SkewNormal::SkewNormal(double xi, double omega, double alpha)
    : xi_(xi), omega_(omega), alpha_(alpha) {
  if (!(omega > 0.0)) throw std::domain_error("SkewNormal: omega must be positive");
  require_finite(xi, "SkewNormal");
  require_finite(alpha, "SkewNormal");
  delta_ = alpha / std::sqrt(1.0 + alpha * alpha);
  delta_c_ = std::sqrt(1.0 - delta_ * delta_);
}

double SkewNormal::pdf(double x) const {
  const double z = (x - xi_) / omega_;
  return 2.0 / omega_ * std_normal_pdf(z) * std_normal_cdf(alpha_ * z);
}

double SkewNormal::cdf(double x) const {
  // The density is bounded by 2 phi(z) / omega, so mass beyond 12 scale
  // units is below 1e-32.
  const double lower = xi_ - 12.0 * omega_;
  const double upper = xi_ + 12.0 * omega_;
  if (x <= lower) return 0.0;
  if (x >= upper) return 1.0;
  auto f = [this](double u) { return pdf(u); };
  // Split at xi where the density kinks for large |alpha|.
  double value;
  if (x <= xi_) {
    value = integrate(f, lower, x, 1e-13);
  } else {
    value = integrate(f, lower, xi_, 1e-13) + integrate(f, xi_, x, 1e-13);
  }
  return std::clamp(value, 0.0, 1.0);
}

double SkewNormal::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("SkewNormal::quantile: p must lie in (0, 1)");
  const double lo = xi_ - 12.0 * omega_;
  const double hi = xi_ + 12.0 * omega_;
  return find_root([&](double x) { return cdf(x) - p; }, lo, hi, -p, 1.0 - p, 1e-12 * omega_).x;
}

double SkewNormal::mean() const {
  return xi_ + omega_ * delta_ * std::sqrt(2.0 / std::numbers::pi);
}

double SkewNormal::variance() const {
  return omega_ * omega_ * (1.0 - 2.0 * delta_ * delta_ / std::numbers::pi);
}

}  // namespace confcurve
