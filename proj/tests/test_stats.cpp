#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "svtail/stats.hpp"

#include <cmath>
#include <vector>

using namespace svtail;

TEST_SUITE("stats") {

TEST_CASE("regularized incomplete beta against reference values") {
  // Reference values from an independent implementation (SciPy 1.x).
  const struct {
    double a, b, x, expected;
  } cases[] = {
      {0.5, 0.5, 0.3, 0.369010119565545},   {2, 3, 0.4, 0.5248},
      {10, 2, 0.9, 0.6973568802},           {5, 5, 0.5, 0.5},
      {0.5, 8, 0.02, 0.424350894029676},    {100, 200, 0.3, 0.108843065644912},
      {3, 7, 0.05, 0.008361039546875},
  };
  for (const auto& c : cases)
    CHECK(regularized_beta(c.a, c.b, c.x) == doctest::Approx(c.expected).epsilon(1e-12));

  CHECK(regularized_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(regularized_beta(2.0, 3.0, 1.0) == 1.0);
  CHECK(regularized_beta_inv(2.0, 3.0, regularized_beta(2.0, 3.0, 0.37)) ==
        doctest::Approx(0.37).epsilon(1e-10));
}

TEST_CASE("regularized upper gamma against reference values") {
  const struct {
    double a, x, expected;
  } cases[] = {
      {0.5, 0.25, 0.479500122186953}, {1, 1, 0.367879441171442},
      {2.5, 3, 0.306218918413279},    {10, 8, 0.716624258727011},
      {50, 60, 0.0844066810936918},   {4, 0.5, 0.998248377443709},
  };
  for (const auto& c : cases)
    CHECK(regularized_gamma_q(c.a, c.x) == doctest::Approx(c.expected).epsilon(1e-12));
}

TEST_CASE("chi-squared p-values at textbook critical points") {
  CHECK(chi_squared_pvalue(11.07, 5) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(chi_squared_pvalue(29.588, 10) == doctest::Approx(0.001).epsilon(1e-3));
}

TEST_CASE("clopper-pearson against reference values") {
  const struct {
    std::uint64_t k, n;
    double lo, hi;
  } cases[] = {
      {0, 100, 0.0, 0.0362166926452},
      {5, 100, 0.0164318791821, 0.112834911105},
      {50, 100, 0.398321129503, 0.601678870497},
      {100, 100, 0.963783307355, 1.0},
      {3, 10000, 6.18714857484e-05, 0.000876474522514},
      {9876, 10000, 0.985233234183, 0.989676038822},
      {1, 7, 0.0036102968619, 0.578723197043},
  };
  for (const auto& c : cases) {
    const Interval ci = clopper_pearson(c.k, c.n);
    CHECK(ci.lo == doctest::Approx(c.lo).epsilon(1e-8));
    CHECK(ci.hi == doctest::Approx(c.hi).epsilon(1e-8));
    const double p_hat = static_cast<double>(c.k) / static_cast<double>(c.n);
    CHECK(ci.lo <= p_hat);
    CHECK(ci.hi >= p_hat);
  }
  CHECK_THROWS_AS(clopper_pearson(5, 0), std::invalid_argument);
  CHECK_THROWS_AS(clopper_pearson(5, 4), std::invalid_argument);
}

TEST_CASE("weighted line fit reproduces an exact line") {
  std::vector<double> x = {1, 2, 3, 4, 5}, y, w(5, 1.0);
  for (double xi : x) y.push_back(3.0 - 2.0 * xi);
  const LineFit fit = weighted_line_fit(x, y, w);
  CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0));
}

TEST_CASE("a pure eps^2 curve fits to exponent 2.000 within 1e-6") {
  std::vector<double> eps;
  std::vector<std::uint64_t> succ;
  const std::uint64_t trials = 1000000000ull;
  for (int i = 0; i < 25; ++i) {
    const double e = 1e-3 * std::pow(100.0, i / 24.0);
    eps.push_back(e);
    succ.push_back(static_cast<std::uint64_t>(std::llround(e * e * static_cast<double>(trials))));
  }
  const PowerLawFit fit = fit_tail_power_law(eps, succ, trials);
  REQUIRE(fit.valid);
  CHECK(std::abs(fit.exponent - 2.0) < 1e-6);
  CHECK(fit.floor == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(fit.scale == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fit.r2 == doctest::Approx(1.0));
}

TEST_CASE("the fitter recovers the exponent under an additive floor") {
  std::vector<double> eps;
  std::vector<std::uint64_t> succ;
  const std::uint64_t trials = 100000000ull;
  const double floor = 5e-3, scale = 40.0, beta = 1.0;
  for (int i = 0; i < 25; ++i) {
    const double e = 1e-3 * std::pow(100.0, i / 24.0);
    eps.push_back(e);
    const double p = floor + scale * std::pow(e, beta);
    succ.push_back(static_cast<std::uint64_t>(std::llround(p * static_cast<double>(trials))));
  }
  const PowerLawFit fit = fit_tail_power_law(eps, succ, trials);
  REQUIRE(fit.valid);
  CHECK(fit.exponent == doctest::Approx(beta).epsilon(1e-4));
  CHECK(fit.floor == doctest::Approx(floor).epsilon(1e-3));
  // The saturated upper points (p > 0.25) must have been excluded.
  for (const std::size_t idx : fit.used)
    CHECK(static_cast<double>(succ[idx]) / static_cast<double>(trials) <= 0.25);
}

TEST_CASE("points below the success floor are excluded from the fit") {
  std::vector<double> eps = {1e-4, 1e-3, 1e-2, 3e-2, 1e-1};
  std::vector<std::uint64_t> succ = {2, 40, 400, 3600, 40000};
  const PowerLawFit fit = fit_tail_power_law(eps, succ, 1000000);
  REQUIRE(fit.valid);
  for (const std::size_t idx : fit.used) CHECK(succ[idx] >= 10);
}

}  // TEST_SUITE
