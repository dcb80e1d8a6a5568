#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "godel/errors.hpp"
#include "godel/ode_table.hpp"

using namespace godel;

TEST_CASE("Chebyshev interpolation of analytic functions") {
  const auto s = ChebyshevSeries::fit([](double x) { return std::exp(std::sin(2.0 * x)); }, -0.5, 2.5, 64);
  const auto d = s.derivative();
  for (double x = -0.5; x <= 2.5; x += 0.0137) {
    CHECK(std::abs(s(x) - std::exp(std::sin(2.0 * x))) < 1e-13);
    CHECK(std::abs(d(x) - 2.0 * std::cos(2.0 * x) * std::exp(std::sin(2.0 * x))) < 5e-11);
  }
  CHECK(s.tail() < 1e-14);
  // low-degree polynomials are reproduced exactly
  const auto p = ChebyshevSeries::fit([](double x) { return 3.0 * x * x - x + 2.0; }, 0.0, 1.0, 4);
  CHECK(p.derivative()(0.3) == doctest::Approx(0.8));
}

TEST_CASE("RK4 table reproduces closed-form solutions") {
  SUBCASE("harmonic oscillator, both directions from an interior start") {
    const auto t = OdeTable::integrate(
        [](double, std::span<const double> y, std::span<double> dy) {
          dy[0] = y[1];
          dy[1] = -y[0];
        },
        0.7, {std::sin(0.7), std::cos(0.7)}, -1.0, 3.0);
    for (double x = -1.0; x <= 3.0; x += 0.01) {
      CHECK(std::abs(t(0, x) - std::sin(x)) < 1e-12);
      CHECK(std::abs(t(1, x) - std::cos(x)) < 1e-12);
    }
    CHECK_THROWS_AS(t(0, 3.5), DomainError);
  }
  SUBCASE("quadrature") {
    const auto q = OdeTable::quadrature([](double x) { return 1.0 / (x * x); }, 1.0, 0.5, 2.0);
    for (double x : {0.5, 0.8, 1.0, 1.9}) CHECK(std::abs(q(0, x) - (1.0 - 1.0 / x)) < 1e-12);
  }
  SUBCASE("blow-up is reported") {
    CHECK_THROWS_AS(OdeTable::integrate([](double, std::span<const double> y,
                                           std::span<double> dy) { dy[0] = y[0] * y[0]; },
                                        0.0, {1.0}, 0.0, 2.0),
                    ParameterError);
  }
}

TEST_CASE("second differences of a table stay smooth") {
  // A piecewise-cubic interpolant would show O(1) jumps in the third difference;
  // the Chebyshev representation keeps them at the truncation level.
  const auto t = OdeTable::quadrature([](double x) { return std::cosh(x); }, 0.0, 0.0, 2.0);
  const double h = 6e-3;
  for (double x = 0.3; x < 1.7; x += 0.071) {
    const double d3 = (t(0, x + 2 * h) - 2 * t(0, x + h) + 2 * t(0, x - h) - t(0, x - 2 * h)) / (2 * h * h * h);
    CHECK(std::abs(d3 - std::cosh(x)) < 1e-4);
  }
}
