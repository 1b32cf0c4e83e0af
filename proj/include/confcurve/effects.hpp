#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace confcurve {

/// Alternative of the study-specific one-sided tests.
enum class Orientation { greater, less };

Orientation opposite(Orientation o);
std::string_view to_string(Orientation o);
Orientation parse_orientation(std::string_view name);

/// Deaths (events) and group sizes of a two-arm trial.
struct Counts {
  int events_treat = 0;
  int n_treat = 0;
  int events_ctrl = 0;
  int n_ctrl = 0;
};

struct Study {
  std::string id;
  double estimate = 0.0;
  double se = 1.0;
  std::optional<Counts> counts;
};

struct EffectEstimate {
  double estimate;
  double se;
};

/// Heterogeneity adjustment of the z-statistic: additive tau2 or
/// multiplicative phi. tau2 = 0, phi = 1 is unadjusted.
struct Adjustment {
  double tau2 = 0.0;
  double phi = 1.0;
};

void validate(const Study& study);
void validate(const Counts& counts);
void validate(const Adjustment& adj);

/// Log odds ratio with Woolf standard error. Throws std::invalid_argument
/// on a zero cell; use the exact path instead of a continuity correction.
EffectEstimate log_or_from_counts(const Counts& counts);

/// Study with estimate/se derived from its counts.
Study study_from_counts(std::string id, const Counts& counts);

double z_statistic(const Study& study, double mu, const Adjustment& adj = {});

/// greater: 1 - Phi(z); less: Phi(z).
double one_sided_p(double z, Orientation orientation);

Eigen::ArrayXd estimates(std::span<const Study> studies);
Eigen::ArrayXd standard_errors(std::span<const Study> studies);
/// sqrt(phi * se^2 + tau2) per study.
Eigen::ArrayXd effective_se(std::span<const Study> studies, const Adjustment& adj);

}  // namespace confcurve
