#pragma once

#include <array>
#include <cmath>
#include <utility>

namespace confcurve {
namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (and the centre).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
std::pair<double, double> gauss_kronrod_15(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = f(centre - dx) + f(centre + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

template <class F>
double integrate_adaptive(F& f, double a, double b, double tol, int depth) {
  const auto [value, err] = gauss_kronrod_15(f, a, b);
  if (err <= tol || depth >= 40) return value;
  const double mid = 0.5 * (a + b);
  return integrate_adaptive(f, a, mid, 0.5 * tol, depth + 1) +
         integrate_adaptive(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

template <class F>
double integrate(F&& f, double a, double b, double abs_tol) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, abs_tol);
  return detail::integrate_adaptive(f, a, b, abs_tol, 0);
}

}  // namespace confcurve
