#include "confcurve/classic.hpp"

#include <cmath>
#include <stdexcept>

#include "confcurve/special_fn.hpp"

namespace confcurve {
namespace {

void check(std::span<const Study> studies, double level, std::size_t min_k) {
  if (studies.size() < min_k) {
    throw std::invalid_argument(min_k == 1 ? "at least one study is required"
                                           : "random effects need at least two studies");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("confidence level must lie in (0, 1)");
  }
  for (const auto& s : studies) validate(s);
}

ClassicResult inverse_variance(std::span<const Study> studies, double level, double tau2,
                               ClassicMethod method) {
  const Eigen::ArrayXd theta = estimates(studies);
  const Eigen::ArrayXd w = (standard_errors(studies).square() + tau2).inverse();
  const double sw = w.sum();
  const double est = (w * theta).sum() / sw;
  const double se = 1.0 / std::sqrt(sw);
  const double z = std_normal_quantile(0.5 + 0.5 * level);
  return {est, se, est - z * se, est + z * se, 2.0 * std_normal_cdf(-std::abs(est) / se),
          method, tau2};
}

double tau2_for(std::span<const Study> studies, Tau2Estimator estimator) {
  switch (estimator) {
    case Tau2Estimator::none: return 0.0;
    case Tau2Estimator::dl: return tau2_dl(studies);
    case Tau2Estimator::reml: return tau2_reml(studies).tau2;
  }
  return 0.0;
}

}  // namespace

std::string_view to_string(ClassicMethod m) {
  switch (m) {
    case ClassicMethod::fixed: return "fixed";
    case ClassicMethod::dl: return "dl";
    case ClassicMethod::hk: return "hk";
  }
  return "unknown";
}

ClassicResult fixed_effect(std::span<const Study> studies, double level) {
  check(studies, level, 1);
  return inverse_variance(studies, level, 0.0, ClassicMethod::fixed);
}

ClassicResult random_effects(std::span<const Study> studies, double level, double tau2) {
  check(studies, level, 2);
  if (!(tau2 >= 0.0)) throw std::invalid_argument("tau2 must be non-negative");
  return inverse_variance(studies, level, tau2, ClassicMethod::dl);
}

ClassicResult dl_random_effects(std::span<const Study> studies, double level,
                                Tau2Estimator estimator) {
  check(studies, level, 2);
  return random_effects(studies, level, tau2_for(studies, estimator));
}

ClassicResult hartung_knapp(std::span<const Study> studies, double level, double tau2) {
  check(studies, level, 2);
  if (!(tau2 >= 0.0)) throw std::invalid_argument("tau2 must be non-negative");
  const double k = static_cast<double>(studies.size());
  const Eigen::ArrayXd theta = estimates(studies);
  const Eigen::ArrayXd w = (standard_errors(studies).square() + tau2).inverse();
  const double sw = w.sum();
  // Identical estimates: zero residual variance exactly, not up to rounding.
  const bool flat = theta.maxCoeff() == theta.minCoeff();
  const double est = flat ? theta[0] : (w * theta).sum() / sw;
  const double q_hk = flat ? 0.0 : (w * (theta - est).square()).sum() / (k - 1.0);
  const double se = std::sqrt(q_hk / sw);
  const double t = student_t_quantile(0.5 + 0.5 * level, k - 1.0);
  ClassicResult r{est, se, est - t * se, est + t * se, 0.0, ClassicMethod::hk, tau2};
  if (se > 0.0) {
    r.p_null = 2.0 * student_t_cdf(-std::abs(est) / se, k - 1.0);
  } else {
    r.degenerate = true;
    r.p_null = est == 0.0 ? 1.0 : 0.0;
  }
  return r;
}

ClassicResult hartung_knapp(std::span<const Study> studies, double level,
                            Tau2Estimator estimator) {
  check(studies, level, 2);
  return hartung_knapp(studies, level, tau2_for(studies, estimator));
}

double classic_centrality(const ClassicResult& r, double mu, int k) {
  if (r.se <= 0.0) return mu == r.estimate ? 1.0 : 0.0;
  const double z = std::abs(r.estimate - mu) / r.se;
  if (r.method == ClassicMethod::hk) return 2.0 * student_t_cdf(-z, k - 1.0);
  return 2.0 * std_normal_cdf(-z);
}

}  // namespace confcurve
