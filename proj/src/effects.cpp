#include "confcurve/effects.hpp"

#include <cmath>
#include <stdexcept>

#include "confcurve/special_fn.hpp"

namespace confcurve {

Orientation opposite(Orientation o) {
  return o == Orientation::greater ? Orientation::less : Orientation::greater;
}

std::string_view to_string(Orientation o) {
  return o == Orientation::greater ? "greater" : "less";
}

Orientation parse_orientation(std::string_view name) {
  if (name == "greater") return Orientation::greater;
  if (name == "less") return Orientation::less;
  throw std::invalid_argument("unknown alternative '" + std::string(name) +
                              "' (expected greater or less)");
}

void validate(const Counts& c) {
  if (c.n_treat < 1 || c.n_ctrl < 1) {
    throw std::invalid_argument("group sizes must be at least 1");
  }
  if (c.events_treat < 0 || c.events_ctrl < 0 || c.events_treat > c.n_treat ||
      c.events_ctrl > c.n_ctrl) {
    throw std::invalid_argument("event counts must lie between 0 and the group size");
  }
}

void validate(const Study& study) {
  if (!std::isfinite(study.estimate)) {
    throw std::invalid_argument("study '" + study.id + "': estimate must be finite");
  }
  if (!(study.se > 0.0) || !std::isfinite(study.se)) {
    throw std::invalid_argument("study '" + study.id + "': standard error must be positive");
  }
  if (study.counts) validate(*study.counts);
}

void validate(const Adjustment& adj) {
  if (!(adj.tau2 >= 0.0)) throw std::invalid_argument("tau2 must be non-negative");
  if (!(adj.phi >= 1.0)) throw std::invalid_argument("phi must be at least 1");
  if (adj.tau2 > 0.0 && adj.phi > 1.0) {
    throw std::invalid_argument("additive and multiplicative adjustment are exclusive");
  }
}

EffectEstimate log_or_from_counts(const Counts& c) {
  validate(c);
  const double a = c.events_treat;
  const double b = c.n_treat - c.events_treat;
  const double cc = c.events_ctrl;
  const double d = c.n_ctrl - c.events_ctrl;
  if (a == 0 || b == 0 || cc == 0 || d == 0) {
    throw std::invalid_argument(
        "2x2 table has a zero cell; the log odds ratio is undefined. "
        "Use the exact mid-p analysis (--exact) instead");
  }
  return {std::log(a * d / (b * cc)), std::sqrt(1.0 / a + 1.0 / b + 1.0 / cc + 1.0 / d)};
}

Study study_from_counts(std::string id, const Counts& counts) {
  const auto e = log_or_from_counts(counts);
  return Study{std::move(id), e.estimate, e.se, counts};
}

double z_statistic(const Study& study, double mu, const Adjustment& adj) {
  validate(adj);
  return (study.estimate - mu) / std::sqrt(adj.phi * study.se * study.se + adj.tau2);
}

double one_sided_p(double z, Orientation orientation) {
  return orientation == Orientation::greater ? std_normal_cdf(-z) : std_normal_cdf(z);
}

Eigen::ArrayXd estimates(std::span<const Study> studies) {
  Eigen::ArrayXd out(static_cast<Eigen::Index>(studies.size()));
  for (std::size_t i = 0; i < studies.size(); ++i) out[i] = studies[i].estimate;
  return out;
}

Eigen::ArrayXd standard_errors(std::span<const Study> studies) {
  Eigen::ArrayXd out(static_cast<Eigen::Index>(studies.size()));
  for (std::size_t i = 0; i < studies.size(); ++i) out[i] = studies[i].se;
  return out;
}

Eigen::ArrayXd effective_se(std::span<const Study> studies, const Adjustment& adj) {
  validate(adj);
  const Eigen::ArrayXd se = standard_errors(studies);
  return (adj.phi * se.square() + adj.tau2).sqrt();
}

}  // namespace confcurve
