#include <doctest.h>

#include <cmath>

#include <boost/math/distributions/hypergeometric.hpp>

#include "confcurve/exact_binary.hpp"
#include "confcurve/infer.hpp"
#include "covid.hpp"

using namespace confcurve;
using doctest::Approx;

TEST_CASE("mid-p values sum to one") {
  for (const auto& t : testdata::covid_tables()) {
    for (double mu = -2.0; mu <= 2.0; mu += 0.01) {
      const double g = exact_midp(t, mu, Orientation::greater);
      const double l = exact_midp(t, mu, Orientation::less);
      CHECK(std::abs(g + l - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("single-atom support gives one half") {
  const Table2x2 t{0, 5, 0, 7};
  CHECK(exact_midp(t, 0.3, Orientation::greater) == 0.5);
  CHECK(exact_midp(t, -1.0, Orientation::less) == 0.5);

  const std::vector<Table2x2> one{t};
  const auto f = make_exact_pfunction(one, Method::edgington, Orientation::greater);
  for (double mu : {-3.0, 0.0, 2.0}) CHECK(f(mu) == 0.5);
}

TEST_CASE("central hypergeometric at mu = 0") {
  // DEXA-COVID 19: a = 2, b = 5, c = 2, d = 10
  const Table2x2 t{2, 5, 2, 10};
  const boost::math::hypergeometric ref(4, 7, 19);
  const double expect = boost::math::cdf(ref, 1) + 0.5 * boost::math::pdf(ref, 2);
  CHECK(exact_midp(t, 0.0, Orientation::less) == Approx(expect).epsilon(1e-13));
  CHECK(exact_midp(t, 0.0, Orientation::less) == Approx(0.7038183694530449).epsilon(1e-13));

  for (const auto& tab : testdata::covid_tables()) {
    const boost::math::hypergeometric h(tab.events(), tab.n_treat(), tab.n_treat() + tab.n_ctrl());
    const double g = boost::math::cdf(boost::math::complement(h, tab.a)) +
                     0.5 * boost::math::pdf(h, tab.a);
    CHECK(exact_midp(tab, 0.0, Orientation::greater) == Approx(g).epsilon(1e-10));
  }
}

TEST_CASE("exact mid-p increases with mu for the greater alternative") {
  for (const auto& t : testdata::covid_tables()) {
    double prev = -1;
    for (double mu = -4; mu <= 4; mu += 0.02) {
      const double g = exact_midp(t, mu, Orientation::greater);
      CHECK(g >= prev);
      prev = g;
    }
  }
}

TEST_CASE("orientation behaviour under exact inputs") {
  const auto tables = testdata::covid_tables();
  auto f = [&](Method m, Orientation o) { return make_exact_pfunction(tables, m, o); };
  struct Pair {
    Method gm, lm;
  };
  const Pair pairs[] = {{Method::edgington, Method::edgington},
                        {Method::fisher, Method::pearson},
                        {Method::pearson, Method::fisher},
                        {Method::tippett, Method::wilkinson},
                        {Method::wilkinson, Method::tippett}};
  for (const auto& pr : pairs) {
    const auto fg = f(pr.gm, Orientation::greater);
    const auto fl = f(pr.lm, Orientation::less);
    for (double mu = -2; mu <= 2; mu += 0.004) CHECK(std::abs(fg(mu) - (1 - fl(mu))) <= 1e-12);
  }
}

TEST_CASE("exact and normal edgington curves nearly coincide") {
  const auto tables = testdata::covid_tables();
  const auto studies = testdata::covid_studies();
  const auto fe = make_exact_pfunction(tables, Method::edgington, Orientation::less);
  const auto fn = make_pfunction(studies, Method::edgington, Orientation::less);
  double worst = 0;
  for (double mu = -1.5; mu <= 1.5; mu += 0.001) {
    worst = std::max(worst, std::abs(centrality(fe, mu) - centrality(fn, mu)));
  }
  CHECK(worst < 0.05);
}

TEST_CASE("invalid tables") {
  CHECK_THROWS(validate(Table2x2{-1, 2, 3, 4}));
  CHECK_THROWS(validate(Table2x2{0, 0, 3, 4}));
}
