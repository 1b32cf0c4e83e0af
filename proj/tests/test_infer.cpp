#include <doctest.h>

#include <cmath>
#include <random>

#include "confcurve/infer.hpp"
#include "confcurve/metrics.hpp"
#include "confcurve/special_fn.hpp"
#include "covid.hpp"

using namespace confcurve;
using doctest::Approx;

namespace {

constexpr Orientation kGreater = Orientation::greater;
constexpr Orientation kLess = Orientation::less;

std::vector<Study> random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kd(1, 12);
  std::normal_distribution<double> th(0.0, 0.6);
  std::uniform_real_distribution<double> sd(0.05, 0.8);
  std::vector<Study> out(static_cast<std::size_t>(kd(rng)));
  for (auto& s : out) {
    s.estimate = th(rng);
    s.se = sd(rng);
  }
  return out;
}

}  // namespace

TEST_CASE("corticosteroid example") {
  const auto studies = testdata::covid_studies();
  struct Row {
    Method m;
    double est, lo, hi;
  };
  const Row rows[] = {{Method::edgington, -0.27, -0.53, 0.18},
                      {Method::fisher, -0.31, -0.54, -0.10},
                      {Method::pearson, -0.20, -0.58, 0.49},
                      {Method::tippett, -0.34, -0.69, -0.15},
                      {Method::wilkinson, 0.17, -0.90, 1.17}};
  for (const auto& r : rows) {
    CAPTURE(to_string(r.m));
    const auto res = analyze(make_pfunction(studies, r.m, kLess));
    CHECK(res.converged);
    CHECK(std::abs(res.estimate - r.est) <= 0.01);
    CHECK(std::abs(res.lower - r.lo) <= 0.01);
    CHECK(std::abs(res.upper - r.hi) <= 0.01);
  }
  const auto e = analyze(make_pfunction(studies, Method::edgington, kLess));
  CHECK(std::abs(e.p_null - 0.18) <= 0.005);
  CHECK(std::abs(e.aucc - 0.28) <= 0.01);
  CHECK(std::abs(e.aucc_ratio - 0.17) <= 0.01);
  CHECK(std::abs(e.beta_skew - 0.26) <= 0.01);
  const auto w = analyze(make_pfunction(studies, Method::wilkinson, kLess));
  CHECK(std::abs(w.aucc - 0.89) <= 0.01);
}

TEST_CASE("AUCC ratio has the sign of the interval skewness on the example") {
  const auto studies = testdata::covid_studies();
  for (Method m : kAllMethods) {
    const auto r = analyze(make_pfunction(studies, m, kLess));
    CAPTURE(to_string(m));
    CHECK(std::signbit(r.aucc_ratio) == std::signbit(r.beta_skew));
  }
}

TEST_CASE("centrality") {
  const auto f = make_pfunction(testdata::covid_studies(), Method::edgington, kGreater);
  const auto est = median_estimate(f);
  REQUIRE(est.converged);
  CHECK(centrality(f, est.mu) == Approx(1.0).epsilon(1e-9));
  const auto lo = solve_level(f, 0.025);
  CHECK(centrality(f, lo.mu) == Approx(0.05).epsilon(1e-8));
  // the estimate maximizes the curve
  for (double d : {-0.3, -0.01, -1e-4, 1e-4, 0.01, 0.3}) CHECK(centrality(f, est.mu + d) < 1.0);
}

TEST_CASE("single study reduces to the normal interval") {
  const std::vector<Study> one{{"a", 0.37, 0.21, {}}};
  const double z = std_normal_quantile(0.975);
  for (Method m : kAllMethods) {
    for (Orientation o : {kGreater, kLess}) {
      const auto r = analyze(make_pfunction(one, m, o));
      CHECK(r.estimate == Approx(0.37).epsilon(1e-10));
      CHECK(r.lower == Approx(0.37 - z * 0.21).epsilon(1e-9));
      CHECK(r.upper == Approx(0.37 + z * 0.21).epsilon(1e-9));
      CHECK(std::abs(r.beta_skew) <= 1e-8);
    }
  }
}

TEST_CASE("closed forms agree with root finding") {
  auto check_instance = [](const std::vector<Study>& studies, Adjustment adj) {
    for (Orientation o : {kGreater, kLess}) {
      for (double alpha : {0.025, 0.5, 0.975}) {
        const auto w = solve_level(make_pfunction(studies, Method::wilkinson, o, adj), alpha);
        const auto t = solve_level(make_pfunction(studies, Method::tippett, o, adj), alpha);
        REQUIRE(w.converged);
        REQUIRE(t.converged);
        CHECK(std::abs(w.mu - closed_form_wilkinson(studies, alpha, o, adj)) <= 1e-7);
        CHECK(std::abs(t.mu - closed_form_tippett(studies, alpha, o, adj)) <= 1e-7);
      }
    }
  };
  check_instance(testdata::covid_studies(), {});
  check_instance(testdata::covid_studies(), {0.04, 1.0});
  std::mt19937_64 rng(77);
  for (int i = 0; i < 100; ++i) check_instance(random_instance(rng), {});

  const std::vector<Study> one{{"a", 0.4, 0.3, {}}};
  CHECK(closed_form_wilkinson(one, 0.5, kGreater) == Approx(0.4).epsilon(1e-15));
}

TEST_CASE("orientation invariance of the full analysis") {
  std::mt19937_64 rng(3);
  std::vector<std::vector<Study>> cases{testdata::covid_studies()};
  for (int i = 0; i < 10; ++i) cases.push_back(random_instance(rng));
  struct Pair {
    Method gm, lm;
  };
  const Pair pairs[] = {{Method::edgington, Method::edgington},
                        {Method::fisher, Method::pearson},
                        {Method::tippett, Method::wilkinson}};
  for (const auto& studies : cases) {
    for (const auto& pr : pairs) {
      const auto a = analyze(make_pfunction(studies, pr.gm, kGreater));
      const auto b = analyze(make_pfunction(studies, pr.lm, kLess));
      CHECK(std::abs(a.estimate - b.estimate) <= 1e-8);
      CHECK(std::abs(a.lower - b.lower) <= 1e-8);
      CHECK(std::abs(a.upper - b.upper) <= 1e-8);
    }
  }
}

TEST_CASE("interval nesting") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 30; ++i) {
    const auto studies = random_instance(rng);
    for (Method m : kAllMethods) {
      const auto f = make_pfunction(studies, m, kGreater);
      const auto c90 = confidence_interval(f, 0.90);
      const auto c95 = confidence_interval(f, 0.95);
      const auto c99 = confidence_interval(f, 0.99);
      CHECK(c95.lower <= c90.lower);
      CHECK(c90.upper <= c95.upper);
      CHECK(c99.lower <= c95.lower);
      CHECK(c95.upper <= c99.upper);
    }
  }
}

TEST_CASE("AUCC of a symmetric curve") {
  for (double s : {0.01, 0.2, 1.0, 7.5}) {
    const std::vector<Study> one{{"a", -0.3, s, {}}};
    const auto r = aucc(make_pfunction(one, Method::edgington, kGreater));
    REQUIRE(r.converged);
    // integral of 2 (1 - Phi(|x|/s)) over the line
    const double exact = 4.0 / std::sqrt(2.0 * M_PI) * s;
    CHECK(r.aucc == Approx(exact).epsilon(1e-4));
    CHECK(std::abs(r.ratio) <= 1e-6);
  }
}

TEST_CASE("confidence density") {
  const std::vector<Study> one{{"a", 0.1, 0.3, {}}};
  for (Orientation o : {kGreater, kLess}) {
    const auto f = make_pfunction(one, Method::fisher, o);
    const auto d = confidence_density(f);
    REQUIRE(d.size() == 2001);
    double worst = 0;
    for (const auto& pt : d) {
      const double expect = std_normal_pdf((pt.mu - 0.1) / 0.3) / 0.3;
      worst = std::max(worst, std::abs(pt.density - expect));
    }
    CHECK(worst < 1e-4);
  }

  const auto tables = testdata::covid_tables();
  const auto fe = make_exact_pfunction(tables, Method::edgington, kLess);
  const auto d = confidence_density(fe);
  double mass = 0, m1 = 0;
  for (std::size_t i = 1; i < d.size(); ++i) {
    const double h = d[i].mu - d[i - 1].mu;
    CHECK(d[i].density >= 0.0);
    mass += 0.5 * h * (d[i].density + d[i - 1].density);
    m1 += 0.5 * h * (d[i].mu * d[i].density + d[i - 1].mu * d[i - 1].density);
  }
  CHECK(std::abs(mass - 1.0) <= 1e-3);
  const double mean = m1 / mass;
  double m3 = 0;
  for (std::size_t i = 1; i < d.size(); ++i) {
    const double h = d[i].mu - d[i - 1].mu;
    auto g = [&](const DensityPoint& p) { return std::pow(p.mu - mean, 3) * p.density; };
    m3 += 0.5 * h * (g(d[i]) + g(d[i - 1]));
  }
  CHECK(m3 > 0.0);
}

TEST_CASE("bracket expansion reaches far-off roots") {
  const std::vector<Study> one{{"a", 0.0, 1e-3, {}}};
  const auto f = make_pfunction(one, Method::edgington, kGreater);
  const auto lvl = solve_level(f, 1e-12);
  CHECK(lvl.converged);
  CHECK(f(lvl.mu) == Approx(1e-12).epsilon(1e-6));
  CHECK_THROWS(solve_level(f, 0.0));
}
