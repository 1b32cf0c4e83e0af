#include "confcurve/combine.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "confcurve/special_fn.hpp"

namespace confcurve {
namespace {

constexpr double kLogFloor = 1e-300;

// Edgington's combined p from s = sum p and its mirror k - s = sum q.
double edgington(double s, double s_mirror, int k) {
  if (k >= 12) {
    const double scale = std::sqrt(12.0 * k);
    if (s <= 0.5 * k) return std_normal_cdf(scale * (s / k - 0.5));
    return 1.0 - std_normal_cdf(scale * (s_mirror / k - 0.5));
  }
  if (s <= 0.5 * k) return irwin_hall_cdf_exact(s, k);
  return 1.0 - irwin_hall_cdf_exact(s_mirror, k);
}

void check_inputs(const Eigen::Ref<const Eigen::ArrayXd>& p) {
  if (p.size() == 0) throw std::invalid_argument("combine_p: empty p-value list");
  if (!((p >= 0.0).all() && (p <= 1.0).all())) {
    throw std::invalid_argument("combine_p: p-values must lie in [0, 1]");
  }
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::edgington: return "edgington";
    case Method::fisher: return "fisher";
    case Method::pearson: return "pearson";
    case Method::tippett: return "tippett";
    case Method::wilkinson: return "wilkinson";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown combination method '" + std::string(name) + "'");
}

double combine_p(Method method, const Eigen::Ref<const Eigen::ArrayXd>& p) {
  check_inputs(p);
  const Eigen::ArrayXd q = 1.0 - p;
  return combine_p(method, p, q);
}

double combine_p(Method method, const Eigen::Ref<const Eigen::ArrayXd>& p,
                 const Eigen::Ref<const Eigen::ArrayXd>& q) {
  check_inputs(p);
  const int k = static_cast<int>(p.size());
  switch (method) {
    case Method::edgington:
      return edgington(p.sum(), q.sum(), k);
    case Method::fisher: {
      if ((p == 0.0).any()) return 0.0;
      const double f = -2.0 * p.max(kLogFloor).log().sum();
      return chi2_sf(f, 2.0 * k);
    }
    case Method::pearson: {
      if ((q == 0.0).any()) return 1.0;
      const double g = -2.0 * q.max(kLogFloor).log().sum();
      return chi2_cdf(g, 2.0 * k);
    }
    case Method::tippett:
      return -std::expm1(k * std::log1p(-p.minCoeff()));
    case Method::wilkinson:
      return std::pow(p.maxCoeff(), k);
  }
  throw std::logic_error("combine_p: unhandled method");
}

PValueFunction::PValueFunction(std::shared_ptr<const PValueSource> source, Method method)
    : source_(std::move(source)), method_(method) {
  if (!source_ || source_->size() < 1) {
    throw std::invalid_argument("p-value function needs at least one study");
  }
}

std::pair<double, double> PValueFunction::evaluate_pair(double mu) const {
  thread_local Eigen::ArrayXd p;
  thread_local Eigen::ArrayXd q;
  p.resize(source_->size());
  q.resize(source_->size());
  source_->evaluate(mu, p, q);
  // The complement of the combined p is the mirrored method on swapped inputs.
  Method mirror = method_;
  switch (method_) {
    case Method::fisher: mirror = Method::pearson; break;
    case Method::pearson: mirror = Method::fisher; break;
    case Method::tippett: mirror = Method::wilkinson; break;
    case Method::wilkinson: mirror = Method::tippett; break;
    case Method::edgington: break;
  }
  return {combine_p(method_, p, q), combine_p(mirror, q, p)};
}

double PValueFunction::operator()(double mu) const {
  thread_local Eigen::ArrayXd p;
  thread_local Eigen::ArrayXd q;
  p.resize(source_->size());
  q.resize(source_->size());
  source_->evaluate(mu, p, q);
  return combine_p(method_, p, q);
}

NormalPValues::NormalPValues(std::span<const Study> studies, Orientation orientation,
                             Adjustment adj)
    : orientation_(orientation), adj_(adj) {
  if (studies.empty()) throw std::invalid_argument("p-value function needs at least one study");
  for (const auto& s : studies) validate(s);
  theta_ = confcurve::estimates(studies);
  se_ = confcurve::effective_se(studies, adj);
}

void NormalPValues::evaluate(double mu, Eigen::ArrayXd& p, Eigen::ArrayXd& q) const {
  for (Eigen::Index i = 0; i < theta_.size(); ++i) {
    const double z = (theta_[i] - mu) / se_[i];
    // One tail from erfc; the other half is at least 0.5 and safe to subtract.
    const double tail = std_normal_cdf(-std::abs(z));
    const double upper = z >= 0 ? tail : 1.0 - tail;
    const double lower = z >= 0 ? 1.0 - tail : tail;
    if (orientation_ == Orientation::greater) {
      p[i] = upper;
      q[i] = lower;
    } else {
      p[i] = lower;
      q[i] = upper;
    }
  }
}

BracketHint NormalPValues::hint() const {
  const double spread = 10.0 * se_.maxCoeff();
  return {theta_.minCoeff() - spread, theta_.maxCoeff() + spread};
}

PValueFunction make_pfunction(std::span<const Study> studies, Method method,
                              Orientation orientation, Adjustment adj) {
  return PValueFunction(std::make_shared<NormalPValues>(studies, orientation, adj), method);
}

}  // namespace confcurve
