#include "confcurve/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "confcurve/classic.hpp"
#include "confcurve/combine.hpp"
#include "confcurve/heterogeneity.hpp"
#include "confcurve/infer.hpp"
#include "confcurve/metrics.hpp"
#include "confcurve/special_fn.hpp"

namespace confcurve {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kSmallN = 50;
constexpr int kLargeN = 500;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ splitmix64(v)); }

struct RepOutcome {
  double estimate = kNaN;
  double lower = kNaN;
  double upper = kNaN;
  double aucc = kNaN;
  double aucc_ratio = kNaN;
  double beta = kNaN;
  bool converged = false;
};

struct RepResult {
  double gamma = kNaN;
  std::vector<RepOutcome> outcomes;
};

Method combination_of(SimMethod m) {
  switch (m) {
    case SimMethod::edgington: return Method::edgington;
    case SimMethod::fisher: return Method::fisher;
    case SimMethod::pearson: return Method::pearson;
    case SimMethod::tippett: return Method::tippett;
    case SimMethod::wilkinson: return Method::wilkinson;
    default: break;
  }
  throw std::logic_error("not a combination method");
}

RepOutcome from_classic(const ClassicResult& r) {
  RepOutcome o;
  o.estimate = r.estimate;
  o.lower = r.lower;
  o.upper = r.upper;
  o.beta = r.upper > r.lower ? beta_skewness(r.estimate, r.lower, r.upper) : 0.0;
  o.converged = std::isfinite(r.estimate) && std::isfinite(r.lower) && std::isfinite(r.upper);
  return o;
}

RepResult run_repetition(const SimScenario& s, std::uint64_t rep,
                         std::span<const SimMethod> methods, Orientation orientation) {
  const std::vector<Study> studies = generate_dataset(s, rep);
  const HeterogeneityEstimate het = s.k >= 2 ? tau2_reml(studies) : HeterogeneityEstimate{};
  const bool adjusted = s.adjust == SimAdjust::additive_reml;
  const Adjustment adj{adjusted ? het.tau2 : 0.0, 1.0};

  RepResult out;
  if (s.k >= 3) {
    const Eigen::ArrayXd w = (standard_errors(studies).square() + adj.tau2).inverse();
    try {
      out.gamma = gamma_weighted_skewness(estimates(studies), w);
    } catch (const std::invalid_argument&) {
      out.gamma = kNaN;
    }
  }
  out.outcomes.reserve(methods.size());
  for (SimMethod m : methods) {
    switch (m) {
      case SimMethod::fixed:
        out.outcomes.push_back(from_classic(fixed_effect(studies)));
        break;
      case SimMethod::dl:
        out.outcomes.push_back(from_classic(random_effects(studies, 0.95, het.tau2)));
        break;
      case SimMethod::hk:
        out.outcomes.push_back(from_classic(hartung_knapp(studies, 0.95, het.tau2)));
        break;
      default: {
        const PValueFunction f = make_pfunction(studies, combination_of(m), orientation, adj);
        const MetaResult r = analyze(f, 0.95);
        out.outcomes.push_back({r.estimate, r.lower, r.upper, r.aucc, r.aucc_ratio, r.beta_skew,
                                r.converged});
        break;
      }
    }
  }
  return out;
}

MeanWithSe mean_and_se(const std::vector<double>& v) {
  const auto n = static_cast<double>(v.size());
  if (v.empty()) return {kNaN, kNaN};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  if (v.size() < 2) return {mean, kNaN};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

MethodSummary summarize(SimMethod method, std::size_t index, const std::vector<RepResult>& reps,
                        const Estimands& target) {
  MethodSummary sum{};
  sum.method = method;
  std::vector<double> cover, cover_med, err, err_med, width, area, ratio, beta, gamma_b;
  std::vector<int> sign_beta, sign_ratio, sign_gamma;
  for (const RepResult& rep : reps) {
    const RepOutcome& o = rep.outcomes[index];
    if (!o.converged) continue;
    cover.push_back(o.lower <= target.mean && target.mean <= o.upper ? 1.0 : 0.0);
    cover_med.push_back(o.lower <= target.median && target.median <= o.upper ? 1.0 : 0.0);
    err.push_back(o.estimate - target.mean);
    err_med.push_back(o.estimate - target.median);
    width.push_back(o.upper - o.lower);
    if (std::isfinite(o.aucc)) area.push_back(o.aucc);
    if (std::isfinite(o.aucc_ratio)) ratio.push_back(o.aucc_ratio);
    beta.push_back(o.beta);
    if (std::isfinite(rep.gamma)) {
      gamma_b.push_back(rep.gamma);
      sign_gamma.push_back(sign_class(rep.gamma));
      sign_beta.push_back(sign_class(o.beta));
      sign_ratio.push_back(std::isfinite(o.aucc_ratio) ? sign_class(o.aucc_ratio) : 0);
    }
  }
  const int n = static_cast<int>(cover.size());
  sum.n_converged = n;
  sum.convergence_rate = reps.empty() ? kNaN : static_cast<double>(n) / reps.size();
  auto proportion = [n](const std::vector<double>& hits) -> MeanWithSe {
    if (n == 0) return {kNaN, kNaN};
    double c = 0.0;
    for (double h : hits) c += h;
    c /= n;
    return {c, coverage_mcse(c, n)};
  };
  sum.coverage = proportion(cover);
  sum.coverage_median = proportion(cover_med);
  sum.bias = mean_and_se(err);
  sum.bias_median = mean_and_se(err_med);
  sum.width = mean_and_se(width);
  sum.mean_aucc = is_combination(method) ? mean_and_se(area).mean : kNaN;
  sum.mean_aucc_ratio = is_combination(method) ? mean_and_se(ratio).mean : kNaN;
  if (beta.empty()) {
    sum.beta = {kNaN, kNaN, kNaN, kNaN};
  } else {
    const auto [mn, mx] = std::minmax_element(beta.begin(), beta.end());
    sum.beta = {mean_and_se(beta).mean, median_of(beta), *mn, *mx};
  }
  sum.kappa_beta_gamma = kNaN;
  sum.kappa_ratio_gamma = kNaN;
  sum.cor_beta_gamma = kNaN;
  if (is_combination(method) && !sign_gamma.empty()) {
    sum.kappa_beta_gamma = cohen_kappa(sign_beta, sign_gamma).kappa;
    sum.kappa_ratio_gamma = cohen_kappa(sign_ratio, sign_gamma).kappa;
    std::vector<double> beta_g;
    for (const RepResult& rep : reps) {
      const RepOutcome& o = rep.outcomes[index];
      if (o.converged && std::isfinite(rep.gamma)) beta_g.push_back(o.beta);
    }
    try {
      sum.cor_beta_gamma = pearson_correlation(beta_g, gamma_b);
    } catch (const std::invalid_argument&) {
      sum.cor_beta_gamma = kNaN;
    }
  }
  return sum;
}

}  // namespace

std::string_view to_string(SimAdjust a) {
  return a == SimAdjust::none ? "none" : "additive_reml";
}

void validate(const SimScenario& s) {
  if (s.k < 1) throw std::invalid_argument("scenario: k must be at least 1");
  if (s.n_large < 0 || s.n_large > s.k) {
    throw std::invalid_argument("scenario: number of large studies must lie in [0, k]");
  }
  if (!(s.i2 >= 0.0 && s.i2 < 1.0)) throw std::invalid_argument("scenario: I2 must lie in [0, 1)");
  if (!std::isfinite(s.theta) || !std::isfinite(s.shape_alpha)) {
    throw std::invalid_argument("scenario: theta and shape must be finite");
  }
  if (s.n_sim < 1) throw std::invalid_argument("scenario: n_sim must be positive");
}

std::vector<int> sample_sizes(const SimScenario& s) {
  std::vector<int> n(static_cast<std::size_t>(s.k), kSmallN);
  std::fill_n(n.begin(), std::min(s.n_large, s.k), kLargeN);
  return n;
}

double tau2_from_i2(std::span<const int> n, double i2) {
  if (!(i2 >= 0.0 && i2 < 1.0)) throw std::invalid_argument("tau2_from_i2: I2 must lie in [0, 1)");
  if (n.empty()) throw std::invalid_argument("tau2_from_i2: no studies");
  double eps2 = 0.0;
  for (int ni : n) {
    if (ni < 1) throw std::invalid_argument("tau2_from_i2: sample sizes must be positive");
    eps2 += 2.0 / ni;
  }
  eps2 /= static_cast<double>(n.size());
  return eps2 * i2 / (1.0 - i2);
}

SkewNormalParams skew_normal_params(double theta, double tau, double alpha) {
  if (!(tau > 0.0)) throw std::invalid_argument("skew_normal_params: tau must be positive");
  const double delta = alpha / std::sqrt(1.0 + alpha * alpha);
  const double omega = tau / std::sqrt(1.0 - 2.0 * delta * delta / std::numbers::pi);
  return {theta - omega * delta * std::sqrt(2.0 / std::numbers::pi), omega};
}

std::uint64_t repetition_seed(const SimScenario& s, std::uint64_t rep) {
  std::uint64_t h = splitmix64(s.base_seed);
  h = mix(h, static_cast<std::uint64_t>(s.k));
  h = mix(h, static_cast<std::uint64_t>(s.n_large));
  h = mix(h, std::bit_cast<std::uint64_t>(s.i2));
  h = mix(h, std::bit_cast<std::uint64_t>(s.theta));
  h = mix(h, std::bit_cast<std::uint64_t>(s.shape_alpha));
  return mix(h, rep);
}

std::vector<Study> generate_dataset(const SimScenario& s, std::uint64_t rep) {
  validate(s);
  std::mt19937_64 rng(repetition_seed(s, rep));
  const std::vector<int> n = sample_sizes(s);
  const double tau2 = tau2_from_i2(n, s.i2);
  const double tau = std::sqrt(tau2);
  std::optional<SkewNormal> skew;
  if (s.shape_alpha != 0.0 && tau > 0.0) {
    const auto p = skew_normal_params(s.theta, tau, s.shape_alpha);
    skew.emplace(p.xi, p.omega, s.shape_alpha);
  }
  std::normal_distribution<double> normal;
  std::vector<Study> studies;
  studies.reserve(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    const int ni = n[i];
    const double true_effect = skew ? skew->sample(rng) : s.theta + tau * normal(rng);
    const double estimate = true_effect + std::sqrt(2.0 / ni) * normal(rng);
    std::chi_squared_distribution<double> chi2(2.0 * (ni - 1));
    const double var = chi2(rng) / ((ni - 1.0) * ni);
    studies.push_back({"study" + std::to_string(i + 1), estimate, std::sqrt(var), std::nullopt});
  }
  return studies;
}

Estimands estimands(const SimScenario& s) {
  validate(s);
  const double tau = std::sqrt(tau2_from_i2(sample_sizes(s), s.i2));
  if (s.shape_alpha == 0.0 || tau == 0.0) return {s.theta, s.theta};
  const auto p = skew_normal_params(s.theta, tau, s.shape_alpha);
  return {s.theta, SkewNormal(p.xi, p.omega, s.shape_alpha).quantile(0.5)};
}

std::string_view to_string(SimMethod m) {
  switch (m) {
    case SimMethod::fixed: return "fixed";
    case SimMethod::dl: return "dl";
    case SimMethod::hk: return "hk";
    case SimMethod::edgington: return "edgington";
    case SimMethod::fisher: return "fisher";
    case SimMethod::pearson: return "pearson";
    case SimMethod::tippett: return "tippett";
    case SimMethod::wilkinson: return "wilkinson";
  }
  return "unknown";
}

SimMethod parse_sim_method(std::string_view name) {
  for (SimMethod m : kAllSimMethods) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

bool is_combination(SimMethod m) {
  return m != SimMethod::fixed && m != SimMethod::dl && m != SimMethod::hk;
}

double coverage_mcse(double coverage, int n) {
  if (n < 1) throw std::invalid_argument("coverage_mcse: n must be positive");
  return std::sqrt(coverage * (1.0 - coverage) / n);
}

SimSummary run_scenario(const SimScenario& s, std::span<const SimMethod> methods,
                        const SimOptions& options) {
  validate(s);
  for (SimMethod m : methods) {
    if (!is_combination(m) && s.k < 2 && m != SimMethod::fixed) {
      throw std::invalid_argument("random effects comparators need k >= 2");
    }
  }
  std::vector<RepResult> reps(static_cast<std::size_t>(s.n_sim));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < reps.size(); i = next++) {
        reps[i] = run_repetition(s, i, methods, options.orientation);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = reps.size();
    }
  };
  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SimSummary out;
  out.scenario = s;
  out.tau2 = tau2_from_i2(sample_sizes(s), s.i2);
  out.estimands = estimands(s);
  for (std::size_t j = 0; j < methods.size(); ++j) {
    out.methods.push_back(summarize(methods[j], j, reps, out.estimands));
  }
  return out;
}

}  // namespace confcurve
