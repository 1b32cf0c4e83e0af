#include <doctest.h>

#include <cmath>
#include <numbers>

#include "confcurve/simulate.hpp"
#include "confcurve/special_fn.hpp"

using namespace confcurve;
using doctest::Approx;

TEST_CASE("tau2 from I2") {
  const std::vector<int> n(8, 50);
  CHECK(tau2_from_i2(n, 0.0) == 0.0);
  CHECK(tau2_from_i2(n, 0.5) == Approx(0.04));
  CHECK(tau2_from_i2(n, 0.9) == Approx(0.36));
  const std::vector<int> mixed{500, 50};
  CHECK(tau2_from_i2(mixed, 0.5) == Approx(0.5 * (2.0 / 500 + 2.0 / 50)));
  CHECK_THROWS(tau2_from_i2(n, 1.0));
}

TEST_CASE("sample sizes") {
  SimScenario s;
  s.k = 5;
  s.n_large = 2;
  CHECK(sample_sizes(s) == std::vector<int>{500, 500, 50, 50, 50});
  s.n_large = 6;
  CHECK_THROWS(validate(s));
}

TEST_CASE("skew-normal parameters") {
  const auto p0 = skew_normal_params(0.2, 0.1, 0.0);
  CHECK(p0.xi == 0.2);
  CHECK(p0.omega == Approx(0.1));

  const auto p = skew_normal_params(0.2, 0.1, 8.0);
  const SkewNormal sn(p.xi, p.omega, 8.0);
  // moments by quadrature of the density
  const double lo = p.xi - 12 * p.omega, hi = p.xi + 12 * p.omega;
  const double m0 = integrate([&](double x) { return sn.pdf(x); }, lo, hi, 1e-14);
  const double m1 = integrate([&](double x) { return x * sn.pdf(x); }, lo, hi, 1e-14);
  const double m2 = integrate([&](double x) { return (x - 0.2) * (x - 0.2) * sn.pdf(x); }, lo, hi, 1e-14);
  CHECK(m0 == Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(m1 - 0.2) <= 1e-6);
  CHECK(std::abs(std::sqrt(m2) - 0.1) <= 1e-6);

  const auto pm = skew_normal_params(0.2, 0.1, -8.0);
  CHECK(pm.xi == Approx(2 * 0.2 - p.xi).epsilon(1e-14));
}

TEST_CASE("estimands") {
  SimScenario s;
  const auto e0 = estimands(s);
  CHECK(e0.mean == 0.2);
  CHECK(e0.median == 0.2);
  s.i2 = 0.5;
  s.shape_alpha = 8.0;
  const auto e = estimands(s);
  CHECK(e.mean == 0.2);
  CHECK(e.median < e.mean);
}

TEST_CASE("data generation") {
  SimScenario s;
  s.k = 4;
  s.n_large = 4;
  const auto a = generate_dataset(s, 17);
  const auto b = generate_dataset(s, 17);
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::bit_cast<std::uint64_t>(a[i].estimate) == std::bit_cast<std::uint64_t>(b[i].estimate));
    CHECK(std::bit_cast<std::uint64_t>(a[i].se) == std::bit_cast<std::uint64_t>(b[i].se));
  }
  CHECK(generate_dataset(s, 18)[0].estimate != a[0].estimate);

  // Law of large numbers for the estimates (all n = 500, tau2 = 0).
  const int reps = 25000;
  double sum = 0;
  for (int r = 0; r < reps; ++r) {
    for (const auto& st : generate_dataset(s, r)) sum += st.estimate;
  }
  CHECK(std::abs(sum / (4.0 * reps) - 0.2) <= 0.002);

  // Mean of sigma^2 at n = 50 is 2 / 50.
  s.n_large = 0;
  double v = 0;
  for (int r = 0; r < reps; ++r) {
    for (const auto& st : generate_dataset(s, r)) v += st.se * st.se;
  }
  CHECK(std::abs(v / (4.0 * reps) - 0.04) <= 1e-3);
}

TEST_CASE("coverage MCSE") {
  CHECK(100 * coverage_mcse(0.5, 20000) == Approx(0.3536).epsilon(1e-4));
  CHECK(coverage_mcse(1.0, 100) == 0.0);
}

TEST_CASE("run_scenario is independent of the thread count") {
  SimScenario s;
  s.k = 5;
  s.i2 = 0.6;
  s.shape_alpha = 4.0;
  s.n_sim = 60;
  s.adjust = SimAdjust::additive_reml;
  const auto a = run_scenario(s, kAllSimMethods, {Orientation::greater, 1});
  const auto b = run_scenario(s, kAllSimMethods, {Orientation::greater, 8});
  REQUIRE(a.methods.size() == b.methods.size());
  for (std::size_t i = 0; i < a.methods.size(); ++i) {
    const auto& x = a.methods[i];
    const auto& y = b.methods[i];
    CHECK(x.n_converged == y.n_converged);
    CHECK(x.coverage.mean == y.coverage.mean);
    CHECK(x.bias.mean == y.bias.mean);
    CHECK(x.width.mean == y.width.mean);
    CHECK(x.beta.mean == y.beta.mean);
    CHECK((std::isnan(x.mean_aucc) ? std::isnan(y.mean_aucc) : x.mean_aucc == y.mean_aucc));
  }
}

TEST_CASE("fisher greater mirrors pearson less") {
  SimScenario s;
  s.k = 5;
  s.n_sim = 40;
  const SimMethod fp[] = {SimMethod::fisher, SimMethod::pearson, SimMethod::tippett,
                          SimMethod::wilkinson};
  const auto g = run_scenario(s, fp, {Orientation::greater, 1});
  const auto l = run_scenario(s, fp, {Orientation::less, 1});
  const int mirror[] = {1, 0, 3, 2};
  for (int i = 0; i < 4; ++i) {
    const auto& a = g.methods[i];
    const auto& b = l.methods[mirror[i]];
    CHECK(a.coverage.mean == b.coverage.mean);
    CHECK(std::abs(a.bias.mean - b.bias.mean) <= 1e-8);
    CHECK(std::abs(a.width.mean - b.width.mean) <= 1e-8);
  }
}

TEST_CASE("classic methods have symmetric intervals") {
  SimScenario s;
  s.k = 3;
  s.n_sim = 20;
  const auto r = run_scenario(s, kAllSimMethods);
  for (const auto& m : r.methods) {
    if (is_combination(m.method)) {
      CHECK(!std::isnan(m.mean_aucc));
    } else {
      CHECK(std::abs(m.beta.max) <= 1e-12);
      CHECK(std::isnan(m.kappa_beta_gamma));
      CHECK(std::isnan(m.mean_aucc));
    }
  }
}

TEST_CASE("method names") {
  for (SimMethod m : kAllSimMethods) CHECK(parse_sim_method(to_string(m)) == m);
}
