#include "confcurve/infer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "confcurve/metrics.hpp"
#include "confcurve/root_find.hpp"
#include "confcurve/special_fn.hpp"

namespace confcurve {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxDoublings = 60;

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("confidence level must lie in (0, 1)");
  }
}

double trapezoid(const PValueFunction& f, double a, double b, int nodes) {
  if (b <= a) return 0.0;
  const double h = (b - a) / (nodes - 1);
  double sum = 0.5 * (centrality(f, a) + centrality(f, b));
  for (int i = 1; i < nodes - 1; ++i) sum += centrality(f, a + i * h);
  return sum * h;
}

}  // namespace

double centrality(const PValueFunction& f, double mu) {
  const auto [p, q] = f.evaluate_pair(mu);
  return std::clamp(2.0 * std::min(p, q), 0.0, 1.0);
}

LevelCrossing solve_level(const PValueFunction& f, double target) {
  if (!(target > 0.0 && target < 1.0)) {
    throw std::invalid_argument("solve_level: target must lie in (0, 1)");
  }
  // Oriented so that g increases in mu; the near tail is evaluated directly.
  const double sign = f.orientation() == Orientation::greater ? 1.0 : -1.0;
  auto g = [&](double mu) {
    const auto [p, q] = f.evaluate_pair(mu);
    const double diff = target <= 0.5 ? p - target : (1.0 - target) - q;
    return sign * diff;
  };
  auto [lo, hi] = f.hint();
  double g_lo = g(lo);
  double g_hi = g(hi);
  for (int i = 0; i < kMaxDoublings && (g_lo > 0.0 || g_hi < 0.0); ++i) {
    const double width = hi - lo;
    if (g_lo > 0.0) {
      lo -= width;
      g_lo = g(lo);
    }
    if (g_hi < 0.0) {
      hi += width;
      g_hi = g(hi);
    }
  }
  if (g_lo > 0.0 || g_hi < 0.0 || !std::isfinite(g_lo) || !std::isfinite(g_hi)) {
    return {kNaN, false};
  }
  const RootResult r = find_root(g, lo, hi, g_lo, g_hi);
  return {r.x, r.converged};
}

LevelCrossing median_estimate(const PValueFunction& f) { return solve_level(f, 0.5); }

ConfidenceInterval confidence_interval(const PValueFunction& f, double level) {
  check_level(level);
  const double alpha = 1.0 - level;
  LevelCrossing a = solve_level(f, 0.5 * alpha);
  LevelCrossing b = solve_level(f, 1.0 - 0.5 * alpha);
  if (f.orientation() == Orientation::less) std::swap(a, b);
  const bool ok = a.converged && b.converged;
  return {ok ? a.mu : kNaN, ok ? b.mu : kNaN, ok};
}

double closed_form_wilkinson(std::span<const Study> studies, double alpha,
                             Orientation orientation, Adjustment adj) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (studies.empty()) throw std::invalid_argument("closed form needs at least one study");
  const Eigen::ArrayXd theta = estimates(studies);
  const Eigen::ArrayXd se = effective_se(studies, adj);
  const double z = std_normal_quantile(std::pow(alpha, 1.0 / static_cast<double>(theta.size())));
  if (orientation == Orientation::greater) return (theta + se * z).minCoeff();
  return (theta - se * z).maxCoeff();
}

double closed_form_tippett(std::span<const Study> studies, double alpha,
                           Orientation orientation, Adjustment adj) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (studies.empty()) throw std::invalid_argument("closed form needs at least one study");
  const Eigen::ArrayXd theta = estimates(studies);
  const Eigen::ArrayXd se = effective_se(studies, adj);
  const double z =
      std_normal_quantile(std::pow(1.0 - alpha, 1.0 / static_cast<double>(theta.size())));
  if (orientation == Orientation::greater) return (theta - se * z).maxCoeff();
  return (theta + se * z).minCoeff();
}

AuccResult aucc(const PValueFunction& f, double estimate) {
  AuccResult out{kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, false};
  if (!std::isfinite(estimate)) return out;
  LevelCrossing a = solve_level(f, 0.5 * kAuccTail);
  LevelCrossing b = solve_level(f, 1.0 - 0.5 * kAuccTail);
  if (f.orientation() == Orientation::less) std::swap(a, b);
  if (!a.converged || !b.converged) return out;
  const double lo = std::min(a.mu, estimate);
  const double hi = std::max(b.mu, estimate);
  out.support_lo = lo;
  out.support_hi = hi;
  out.below = trapezoid(f, lo, estimate, kAuccNodes);
  out.above = trapezoid(f, estimate, hi, kAuccNodes);
  out.aucc = out.below + out.above;
  out.ratio = out.aucc > 0.0 ? (out.above - out.below) / out.aucc : 0.0;
  out.converged = true;
  return out;
}

AuccResult aucc(const PValueFunction& f) {
  const LevelCrossing m = median_estimate(f);
  if (!m.converged) return {kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, false};
  return aucc(f, m.mu);
}

std::vector<DensityPoint> confidence_density(const PValueFunction& f,
                                             std::span<const double> grid) {
  const AuccResult support = aucc(f);
  if (!support.converged) {
    throw std::runtime_error("confidence density: p-value function did not converge");
  }
  const double h = (support.support_hi - support.support_lo) / 2000.0;
  const double sign = f.orientation() == Orientation::greater ? 1.0 : -1.0;
  std::vector<DensityPoint> out;
  out.reserve(grid.size());
  for (double mu : grid) {
    double d = sign * (f(mu + h) - f(mu - h)) / (2.0 * h);
    out.push_back({mu, std::max(d, 0.0)});
  }
  return out;
}

std::vector<DensityPoint> confidence_density(const PValueFunction& f) {
  const AuccResult support = aucc(f);
  if (!support.converged) {
    throw std::runtime_error("confidence density: p-value function did not converge");
  }
  const double lo = support.support_lo;
  const double h = (support.support_hi - lo) / 2000.0;
  std::vector<double> grid(2001);
  for (int i = 0; i <= 2000; ++i) grid[i] = lo + i * h;
  return confidence_density(f, grid);
}

MetaResult analyze(const PValueFunction& f, double level) {
  check_level(level);
  MetaResult r{kNaN, kNaN, kNaN, level, kNaN, kNaN, kNaN, kNaN, kNaN, false};
  r.p_null = centrality(f, 0.0);
  const LevelCrossing m = median_estimate(f);
  const ConfidenceInterval ci = confidence_interval(f, level);
  if (!m.converged || !ci.converged) return r;
  r.estimate = m.mu;
  r.lower = ci.lower;
  r.upper = ci.upper;
  r.width = ci.upper - ci.lower;
  if (r.width > 0.0) r.beta_skew = beta_skewness(r.estimate, r.lower, r.upper);
  const AuccResult area = aucc(f, m.mu);
  if (!area.converged) return r;
  r.aucc = area.aucc;
  r.aucc_ratio = area.ratio;
  r.converged = true;
  return r;
}

}  // namespace confcurve
