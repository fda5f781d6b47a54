#include <cmath>

#include "doctest.h"

#include "chaoslab/errors.hpp"
#include "chaoslab/polynomial.hpp"
#include "chaoslab/quadrature.hpp"

using namespace chaoslab;

namespace {

Polynomial g(int n, int i) { return Polynomial::variable(n, i); }

}  // namespace

TEST_SUITE("polynomial") {

TEST_CASE("algebra and evaluation") {
  const auto f = g(2, 0) * g(2, 0) * 3.0 + g(2, 1) - Polynomial::constant(2, 2.0);
  const std::vector<double> x{2.0, 5.0};
  CHECK(f.evaluate(x) == doctest::Approx(15.0));
  CHECK(f.degree() == 2);
  CHECK(f.derivative(0).evaluate(x) == doctest::Approx(12.0));
  CHECK((f - f).is_zero());
  CHECK(polynomial_from_json(to_json(f)).terms() == f.terms());
  Polynomial p(2);
  CHECK_THROWS_AS(p.add_term({-1, 0}, 1.0), invalid_parameter);
  CHECK_THROWS_AS(p.add_term({1}, 1.0), shape_error);
}

TEST_CASE("gaussian moments") {
  CHECK(gaussian_moment(0) == 1);
  CHECK(gaussian_moment(3) == 0);
  CHECK(gaussian_moment(6) == 15);
  CHECK(gaussian_expectation(g(2, 0) * g(2, 0) * g(2, 1) * g(2, 1)) == doctest::Approx(1.0));
}

TEST_CASE("hermite variance examples") {
  const auto v1 = hermite_variance(g(1, 0));
  CHECK(v1.variance == doctest::Approx(1.0));
  CHECK(v1.by_order[1] == doctest::Approx(1.0));
  const auto v2 = hermite_variance(g(1, 0) * g(1, 0));
  CHECK(v2.variance == doctest::Approx(2.0));
  CHECK(v2.by_order[1] == doctest::Approx(0.0));
  CHECK(v2.by_order[2] == doctest::Approx(2.0));
  CHECK(hermite_variance(g(2, 0) * g(2, 1)).variance == doctest::Approx(1.0));
  CHECK(gaussian_variance_oracle(g(1, 0)) == doctest::Approx(1.0));
  CHECK(gaussian_variance_oracle(g(1, 0) * g(1, 0)) == doctest::Approx(2.0));
  CHECK(gaussian_variance_oracle(g(2, 0) * g(2, 1)) == doctest::Approx(1.0));
}

TEST_CASE("lower bound examples") {
  const auto sq = variance_lower_bound_general(g(1, 0) * g(1, 0));
  CHECK(sq.coordinatewise == doctest::Approx(2.0));
  CHECK(sq.aggregate == doctest::Approx(2.0));
  CHECK(variance_lower_bound_general(g(1, 0)).coordinatewise == doctest::Approx(0.0));
  CHECK(variance_lower_bound_general(g(2, 0) * g(2, 1)).coordinatewise == doctest::Approx(0.0));
}

TEST_CASE("property: Plancherel identity and lower bounds on random polynomials") {
  Rng rng(SeedRecord::from_master(2024));
  for (int c = 0; c < 200; ++c) {
    const int n = 1 + static_cast<int>(rng.below(4));
    const int deg = static_cast<int>(rng.below(7));
    const auto f = random_polynomial(n, deg, 1 + static_cast<int>(rng.below(8)), rng);
    const double oracle = gaussian_variance_oracle(f);
    const double hv = hermite_variance(f).variance;
    CHECK(std::abs(hv - oracle) <= 1e-10 * std::max(1.0, oracle));
    const auto lb = variance_lower_bound_general(f);
    CHECK(lb.coordinatewise <= oracle + 1e-10);
    CHECK(lb.aggregate <= oracle + 1e-10);
  }
}

TEST_CASE("moment expectation agrees with quadrature") {
  Rng rng(SeedRecord::from_master(9));
  for (int c = 0; c < 20; ++c) {
    const auto f = random_polynomial(2, 6, 5, rng);
    const double quad = gaussian_expect([&](std::span<const double> x) { return f.evaluate(x); }, 2, 16);
    CHECK(gaussian_expectation(f) == doctest::Approx(quad).epsilon(1e-10));
  }
}

}
