#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hdsched/errors.hpp"
#include "hdsched/quadrature.hpp"

using hdsched::integrate;
using hdsched::QuadratureOptions;

TEST_CASE("polynomials integrate to machine accuracy") {
  CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(integrate([](double x) { return 3.0 * x * x - 2.0 * x + 5.0; }, -1.0, 2.0) ==
        doctest::Approx(9.0 - 3.0 + 15.0).epsilon(1e-13));
}

TEST_CASE("smooth transcendental integrands") {
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 50.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kinked integrand is subdivided until the tolerance holds") {
  const double c = 1.0 / 3.0;
  const double got = integrate([c](double x) { return std::abs(x - c); }, 0.0, 1.0);
  const double want = (c * c + (1.0 - c) * (1.0 - c)) / 2.0;
  CHECK(std::abs(got - want) < 1e-10);
}

TEST_CASE("narrow spike is found by adaptive refinement") {
  // Gaussian of width 1e-3 centered off the rule's first nodes.
  const double s = 1e-3;
  const double got = integrate(
      [s](double x) { return std::exp(-0.5 * (x - 0.7) * (x - 0.7) / (s * s)); }, 0.0, 1.0);
  CHECK(got == doctest::Approx(s * std::sqrt(2.0 * M_PI)).epsilon(1e-9));
}

TEST_CASE("empty interval integrates to zero") {
  CHECK(integrate([](double x) { return x; }, 2.0, 2.0) == 0.0);
}

TEST_CASE("reversed or non-finite interval is rejected") {
  CHECK_THROWS_AS(integrate([](double x) { return x; }, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate([](double x) { return x; }, 0.0,
                            std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
}

TEST_CASE("budget exhaustion names the integrand") {
  QuadratureOptions opt;
  opt.max_subdivisions = 3;
  try {
    integrate([](double x) { return std::sin(1.0 / (x + 1e-8)); }, 0.0, 1.0, opt, "wiggly");
    FAIL("expected quadrature_error");
  } catch (const hdsched::quadrature_error& e) {
    CHECK(std::string(e.what()).find("wiggly") != std::string::npos);
  }
}
