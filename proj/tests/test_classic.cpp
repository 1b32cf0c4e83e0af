#include <doctest.h>

#include <cmath>
#include <random>

#include "confcurve/classic.hpp"
#include "confcurve/heterogeneity.hpp"
#include "confcurve/special_fn.hpp"
#include "covid.hpp"

using namespace confcurve;
using doctest::Approx;

TEST_CASE("corticosteroid example") {
  const auto s = testdata::covid_studies();
  const auto fe = fixed_effect(s);
  CHECK(std::abs(fe.estimate + 0.42) <= 0.01);
  CHECK(std::abs(fe.lower + 0.63) <= 0.01);
  CHECK(std::abs(fe.upper + 0.20) <= 0.01);
  CHECK(std::abs(fe.p_null - 0.0001) <= 0.00005);

  const auto dl = dl_random_effects(s);
  CHECK(std::abs(dl.estimate - fe.estimate) <= 1e-6);
  CHECK(std::abs(dl.lower - fe.lower) <= 1e-6);

  const auto hk = hartung_knapp(s);
  CHECK(std::abs(hk.estimate + 0.42) <= 0.01);
  CHECK(std::abs(hk.lower + 0.71) <= 0.01);
  CHECK(std::abs(hk.upper + 0.13) <= 0.01);
  CHECK(std::abs(hk.p_null - 0.013) <= 0.0005);
}

TEST_CASE("symmetric intervals and location equivariance") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> th(0, 0.5);
  std::uniform_real_distribution<double> sd(0.05, 0.5);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<Study> s(2 + rep % 8);
    for (auto& x : s) {
      x.estimate = th(rng);
      x.se = sd(rng);
    }
    auto shifted = s;
    for (auto& x : shifted) x.estimate += 1.5;
    const ClassicResult a[] = {fixed_effect(s), dl_random_effects(s), hartung_knapp(s)};
    const ClassicResult b[] = {fixed_effect(shifted), dl_random_effects(shifted),
                               hartung_knapp(shifted)};
    for (int m = 0; m < 3; ++m) {
      CHECK(std::abs(a[m].upper + a[m].lower - 2 * a[m].estimate) <= 1e-12);
      CHECK(a[m].lower < a[m].upper);
      CHECK(b[m].estimate == Approx(a[m].estimate + 1.5).epsilon(1e-10));
      CHECK(b[m].lower == Approx(a[m].lower + 1.5).epsilon(1e-8));
      CHECK(b[m].upper == Approx(a[m].upper + 1.5).epsilon(1e-8));
    }
  }
}

TEST_CASE("reductions") {
  const std::vector<Study> one{{"a", 0.3, 0.2, {}}};
  const auto fe1 = fixed_effect(one);
  CHECK(fe1.estimate == 0.3);
  CHECK(fe1.se == Approx(0.2));

  const std::vector<Study> twins{{"a", 0.3, 0.2, {}}, {"b", 0.3, 0.2, {}}};
  const auto fe2 = fixed_effect(twins);
  CHECK(fe2.estimate == Approx(0.3));
  CHECK(fe2.se == Approx(0.2 / std::sqrt(2.0)));

  const auto s = testdata::covid_studies();
  const auto fe = fixed_effect(s);
  const auto re = random_effects(s, 0.95, 0.0);
  CHECK(re.estimate == fe.estimate);
  CHECK(re.lower == fe.lower);
  CHECK(re.upper == fe.upper);
  CHECK(re.p_null == fe.p_null);
}

TEST_CASE("heterogeneity widens the random-effects interval") {
  const std::vector<Study> s{{"a", -0.5, 0.1, {}}, {"b", 0.4, 0.15, {}}, {"c", 0.1, 0.2, {}},
                             {"d", 0.9, 0.1, {}},  {"e", -0.2, 0.3, {}}};
  REQUIRE(tau2_dl(s) > 0);
  const auto fe = fixed_effect(s);
  const auto re = dl_random_effects(s, 0.95, Tau2Estimator::dl);
  CHECK(re.upper - re.lower > fe.upper - fe.lower);
  CHECK(re.tau2_used == Approx(tau2_dl(s)));
}

TEST_CASE("Hartung-Knapp") {
  const std::vector<Study> eq{{"a", 0.2, 0.1, {}}, {"b", 0.2, 0.3, {}}, {"c", 0.2, 0.2, {}}};
  const auto d = hartung_knapp(eq);
  CHECK(d.degenerate);
  CHECK(d.lower == d.upper);

  // k = 2: the half-width is t_{1, 0.975} times the HK standard error.
  const std::vector<Study> two{{"a", -0.3, 0.2, {}}, {"b", 0.3, 0.2, {}}};
  const auto hk = hartung_knapp(two, 0.95, 0.0);
  // weighted residual variance: sum w (y - m)^2 / ((k - 1) sum w)
  const double w = 25.0;
  const double var = (w * 0.09 * 2) / (1 * 2 * w);
  CHECK(hk.se == Approx(std::sqrt(var)).epsilon(1e-12));
  CHECK(0.5 * (hk.upper - hk.lower) == Approx(12.706204736432095 * hk.se).epsilon(1e-9));
  CHECK(classic_centrality(hk, hk.lower, 2) == Approx(0.05).epsilon(1e-8));
}
