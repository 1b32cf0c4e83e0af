#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "confcurve/effects.hpp"

namespace confcurve {

enum class SimAdjust { none, additive_reml };

std::string_view to_string(SimAdjust a);

/// One cell of the factorial simulation design.
struct SimScenario {
  int k = 10;
  int n_large = 0;
  double i2 = 0.0;
  double theta = 0.2;
  double shape_alpha = 0.0;
  int n_sim = 2000;
  std::uint64_t base_seed = 1;
  SimAdjust adjust = SimAdjust::none;
};

void validate(const SimScenario& s);

/// Per-group sample sizes: the first n_large studies have 500, the rest 50.
std::vector<int> sample_sizes(const SimScenario& s);

/// tau^2 = eps^2 I^2 / (1 - I^2) with eps^2 = mean of 2 / n_i.
double tau2_from_i2(std::span<const int> n, double i2);

struct SkewNormalParams {
  double xi;
  double omega;
};

/// Location and scale giving a skew normal with mean theta and sd tau.
SkewNormalParams skew_normal_params(double theta, double tau, double alpha);

/// Seed of the random stream for one repetition. Depends only on the base
/// seed, the data-generating factors and the repetition index.
std::uint64_t repetition_seed(const SimScenario& s, std::uint64_t rep);

std::vector<Study> generate_dataset(const SimScenario& s, std::uint64_t rep);

struct Estimands {
  double mean;
  double median;
};

Estimands estimands(const SimScenario& s);

enum class SimMethod { fixed, dl, hk, edgington, fisher, pearson, tippett, wilkinson };

inline constexpr SimMethod kAllSimMethods[] = {
    SimMethod::fixed,   SimMethod::dl,      SimMethod::hk,      SimMethod::edgington,
    SimMethod::fisher,  SimMethod::pearson, SimMethod::tippett, SimMethod::wilkinson};

std::string_view to_string(SimMethod m);
SimMethod parse_sim_method(std::string_view name);
bool is_combination(SimMethod m);

struct MeanWithSe {
  double mean;
  double mcse;
};

struct Distribution {
  double mean;
  double median;
  double min;
  double max;
};

/// Performance of one method in one scenario, over convergent repetitions.
struct MethodSummary {
  SimMethod method;
  int n_converged;
  double convergence_rate;
  MeanWithSe coverage;         // mean estimand
  MeanWithSe coverage_median;  // median estimand
  MeanWithSe bias;
  MeanWithSe bias_median;
  MeanWithSe width;
  double mean_aucc;        // NaN for the classic methods
  double mean_aucc_ratio;  // NaN for the classic methods
  Distribution beta;
  double kappa_beta_gamma;   // NaN when omitted (always-symmetric intervals)
  double kappa_ratio_gamma;  // NaN when omitted
  double cor_beta_gamma;     // NaN when a variance is zero
};

struct SimSummary {
  SimScenario scenario;
  double tau2;
  Estimands estimands;
  std::vector<MethodSummary> methods;
};

struct SimOptions {
  Orientation orientation = Orientation::greater;
  int threads = 1;
};

/// Coverage MCSE sqrt(c (1 - c) / n).
double coverage_mcse(double coverage, int n);

/// Runs every repetition of a scenario and aggregates per method. The
/// result does not depend on the thread count.
SimSummary run_scenario(const SimScenario& s, std::span<const SimMethod> methods,
                        const SimOptions& options = {});

}  // namespace confcurve
