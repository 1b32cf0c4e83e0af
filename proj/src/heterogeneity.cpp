#include "confcurve/heterogeneity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace confcurve {
namespace {

void require_two(std::span<const Study> studies, const char* what) {
  if (studies.size() < 2) {
    throw std::invalid_argument(std::string(what) + ": at least two studies are required");
  }
  for (const auto& s : studies) validate(s);
}

}  // namespace

std::string_view to_string(Tau2Estimator e) {
  switch (e) {
    case Tau2Estimator::none: return "none";
    case Tau2Estimator::dl: return "dl";
    case Tau2Estimator::reml: return "reml";
  }
  return "unknown";
}

Tau2Estimator parse_tau2_estimator(std::string_view name) {
  if (name == "dl") return Tau2Estimator::dl;
  if (name == "reml") return Tau2Estimator::reml;
  if (name == "none") return Tau2Estimator::none;
  throw std::invalid_argument("unknown tau2 estimator '" + std::string(name) + "'");
}

double cochran_q(std::span<const Study> studies) {
  require_two(studies, "cochran_q");
  const Eigen::ArrayXd theta = estimates(studies);
  const Eigen::ArrayXd w = standard_errors(studies).square().inverse();
  const double mean = (w * theta).sum() / w.sum();
  return (w * (theta - mean).square()).sum();
}

double higgins_i2(double q, int k) {
  if (!(q >= 0.0)) throw std::invalid_argument("higgins_i2: Q must be non-negative");
  if (k < 2) throw std::invalid_argument("higgins_i2: k must be at least 2");
  if (q == 0.0) return 0.0;
  return std::max(q - (k - 1), 0.0) / q;
}

double tau2_dl(std::span<const Study> studies) {
  require_two(studies, "tau2_dl");
  const auto k = static_cast<double>(studies.size());
  const Eigen::ArrayXd w = standard_errors(studies).square().inverse();
  const double s1 = w.sum();
  const double s2 = w.square().sum();
  return std::max((cochran_q(studies) - (k - 1.0)) / (s1 - s2 / s1), 0.0);
}

HeterogeneityEstimate tau2_reml(std::span<const Study> studies, double tol, int max_iter) {
  require_two(studies, "tau2_reml");
  const Eigen::ArrayXd theta = estimates(studies);
  const Eigen::ArrayXd v = standard_errors(studies).square();
  const int k = static_cast<int>(studies.size());

  HeterogeneityEstimate est;
  est.estimator = Tau2Estimator::reml;
  est.q = cochran_q(studies);
  est.i2 = higgins_i2(est.q, k);
  est.phi = phi_multiplicative(est.q, k);
  est.converged = false;

  double tau2 = tau2_dl(studies);
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::ArrayXd w = (v + tau2).inverse();
    const double mu = (w * theta).sum() / w.sum();
    const double next = std::max(
        0.0, (w.square() * ((theta - mu).square() - v)).sum() / w.square().sum() + 1.0 / w.sum());
    const double step = std::abs(next - tau2);
    tau2 = next;
    est.iterations = it;
    if (step <= tol) {
      est.converged = true;
      break;
    }
  }
  est.tau2 = tau2;
  return est;
}

double phi_multiplicative(double q, int k) {
  if (k < 2) throw std::invalid_argument("phi_multiplicative: k must be at least 2");
  return std::max(q / (k - 1), 1.0);
}

HeterogeneityEstimate estimate_heterogeneity(std::span<const Study> studies,
                                             Tau2Estimator estimator) {
  if (estimator == Tau2Estimator::reml) return tau2_reml(studies);
  HeterogeneityEstimate est;
  const int k = static_cast<int>(studies.size());
  est.q = cochran_q(studies);
  est.i2 = higgins_i2(est.q, k);
  est.phi = phi_multiplicative(est.q, k);
  est.estimator = estimator;
  if (estimator == Tau2Estimator::dl) est.tau2 = tau2_dl(studies);
  return est;
}

}  // namespace confcurve
