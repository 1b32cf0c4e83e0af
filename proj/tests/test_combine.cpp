#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>

#include "confcurve/combine.hpp"
#include "covid.hpp"

using namespace confcurve;
using doctest::Approx;

namespace {

Eigen::ArrayXd arr(std::initializer_list<double> v) {
  Eigen::ArrayXd a(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) a[i++] = x;
  return a;
}

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

}  // namespace

TEST_CASE("combination rules") {
  CHECK(combine_p(Method::edgington, arr({0.1, 0.2})) == Approx(0.045).epsilon(1e-14));
  CHECK(combine_p(Method::tippett, arr({0.05, 0.5, 0.9})) == Approx(0.142625).epsilon(1e-14));
  CHECK(combine_p(Method::pearson, arr({0.3})) == Approx(0.3).epsilon(1e-14));
  CHECK(combine_p(Method::wilkinson, arr({0.2, 0.9, 0.5})) == Approx(0.729).epsilon(1e-14));

  // chi2_4 survival of -2 log(0.02), closed form exp(-f/2)(1 + f/2)
  const double f = -2.0 * std::log(0.1 * 0.2);
  CHECK(combine_p(Method::fisher, arr({0.1, 0.2})) ==
        Approx(std::exp(-f / 2) * (1 + f / 2)).epsilon(1e-14));
  CHECK(combine_p(Method::fisher, arr({0.1, 0.2})) == Approx(0.09824046010856294).epsilon(1e-13));

  // Independent reference for larger k.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::ArrayXd p(9);
    for (auto& x : p) x = u(rng);
    const boost::math::chi_squared chi(18);
    CHECK(combine_p(Method::fisher, p) ==
          Approx(boost::math::cdf(boost::math::complement(chi, -2 * p.log().sum()))).epsilon(1e-11));
    CHECK(combine_p(Method::pearson, p) ==
          Approx(boost::math::cdf(chi, -2 * (1 - p).log().sum())).epsilon(1e-11));
  }
}

TEST_CASE("boundary limits") {
  CHECK(combine_p(Method::fisher, arr({0.0, 0.5})) == 0.0);
  CHECK(combine_p(Method::pearson, arr({1.0, 0.5})) == 1.0);
  CHECK(combine_p(Method::tippett, arr({0.0, 0.5})) == 0.0);
  CHECK(combine_p(Method::wilkinson, arr({1.0, 0.5})) == 1.0);
  CHECK_THROWS_AS(combine_p(Method::edgington, Eigen::ArrayXd()), std::invalid_argument);
  CHECK_THROWS_AS(combine_p(Method::edgington, arr({0.2, 1.2})), std::invalid_argument);
}

TEST_CASE("k = 1 returns the input p-value") {
  for (Method m : kAllMethods) {
    for (double p : {1e-9, 0.01, 0.3, 0.5, 0.77, 0.999}) {
      CAPTURE(to_string(m));
      CHECK(combine_p(m, arr({p})) == Approx(p).epsilon(1e-12));
    }
  }
}

TEST_CASE("orientation identities") {
  const auto studies = testdata::covid_studies();
  auto pf = [&](Method m, Orientation o) { return make_pfunction(studies, m, o); };
  const auto g = Orientation::greater;
  const auto l = Orientation::less;
  struct Pair {
    Method gm, lm;
  };
  const Pair pairs[] = {{Method::edgington, Method::edgington},
                        {Method::fisher, Method::pearson},
                        {Method::pearson, Method::fisher},
                        {Method::tippett, Method::wilkinson},
                        {Method::wilkinson, Method::tippett}};
  for (const auto& pr : pairs) {
    const auto fg = pf(pr.gm, g);
    const auto fl = pf(pr.lm, l);
    double worst = 0;
    for (double mu : grid(-3, 3, 1000)) worst = std::max(worst, std::abs(fg(mu) - (1.0 - fl(mu))));
    CAPTURE(to_string(pr.gm));
    CHECK(worst <= 1e-12);
  }
  // single point from the examples
  const double s = pf(Method::edgington, g)(-0.3) + pf(Method::edgington, l)(-0.3);
  CHECK(s == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("p-value functions are monotone and have the right limits") {
  const auto studies = testdata::covid_studies();
  for (Method m : kAllMethods) {
    for (Orientation o : {Orientation::greater, Orientation::less}) {
      for (Adjustment adj : {Adjustment{}, Adjustment{0.05, 1.0}, Adjustment{0.0, 2.0}}) {
        const auto f = make_pfunction(studies, m, o, adj);
        double prev = o == Orientation::greater ? -1.0 : 2.0;
        for (double mu : grid(-4, 4, 1000)) {
          const double p = f(mu);
          CHECK(p >= 0.0);
          CHECK(p <= 1.0);
          if (o == Orientation::greater) {
            CHECK(p >= prev);
          } else {
            CHECK(p <= prev);
          }
          prev = p;
        }
        const double lo = f(-60), hi = f(60);
        CHECK((o == Orientation::greater ? lo : hi) < 1e-12);
        CHECK((o == Orientation::greater ? hi : lo) > 1 - 1e-12);
      }
    }
  }
}

TEST_CASE("single study") {
  const std::vector<Study> one{{"a", 0.4, 0.25, {}}};
  for (Method m : kAllMethods) {
    CHECK(make_pfunction(one, m, Orientation::greater)(0.4) == Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("edgington median property") {
  // Where the mean of the study p-values is 0.5 the combined value is 0.5.
  const auto studies = testdata::covid_studies();
  const auto f = make_pfunction(studies, Method::edgington, Orientation::greater);
  const auto& src = static_cast<const NormalPValues&>(f.source());
  auto mean_p = [&](double mu) {
    Eigen::ArrayXd p(src.size()), q(src.size());
    src.evaluate(mu, p, q);
    return p.mean() - 0.5;
  };
  double lo = -3, hi = 3;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mean_p(mid) < 0 ? lo : hi) = mid;
  }
  CHECK(f(0.5 * (lo + hi)) == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("evaluate_pair complements") {
  const auto studies = testdata::covid_studies();
  for (Method m : kAllMethods) {
    const auto f = make_pfunction(studies, m, Orientation::less);
    for (double mu : grid(-2, 2, 41)) {
      const auto [p, q] = f.evaluate_pair(mu);
      CHECK(p + q == Approx(1.0).epsilon(1e-12));
      CHECK(p == f(mu));
    }
  }
}

TEST_CASE("method names") {
  for (Method m : kAllMethods) CHECK(parse_method(to_string(m)) == m);
  CHECK_THROWS(parse_method("stouffer"));
}
