#include <cmath>

#include "doctest.h"

#include "chaoslab/errors.hpp"
#include "chaoslab/quadrature.hpp"
#include "chaoslab/rng.hpp"
#include "chaoslab/stats.hpp"

using namespace chaoslab;

TEST_SUITE("stats") {

TEST_CASE("mean and variance estimates") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const auto m = mean_estimate(x);
  CHECK(m.mean == 3.0);
  CHECK(m.std_error == doctest::Approx(std::sqrt(2.5 / 5)));
  const auto v = variance_with_jackknife(x);
  CHECK(v.variance == doctest::Approx(2.5));
  CHECK(v.ci_low <= v.variance);
  CHECK(v.variance <= v.ci_high);
  const std::vector<double> flat(10, 3.0);
  CHECK(variance_with_jackknife(flat).variance == 0.0);
  CHECK(variance_with_jackknife(flat).std_error == 0.0);
  CHECK_THROWS_AS(mean_estimate(std::vector<double>{}), invalid_parameter);
}

TEST_CASE("jackknife stderr of the variance is close to its sampling spread") {
  // For Gaussian data Var(s^2) = 2 sigma^4 / (n - 1).
  Rng rng(SeedRecord::from_master(1));
  std::vector<double> x(4000);
  for (auto& v : x) v = 2.0 * rng.gaussian();
  const auto est = variance_with_jackknife(x);
  CHECK(est.std_error == doctest::Approx(4.0 * std::sqrt(2.0 / 3999)).epsilon(0.15));
}

TEST_CASE("autocorrelation time of an AR(1) series") {
  // tau = (1 + a) / (1 - a).
  Rng rng(SeedRecord::from_master(2));
  const double a = 0.8;
  std::vector<double> x(200000);
  double v = 0;
  for (auto& s : x) s = v = a * v + rng.gaussian();
  CHECK(integrated_autocorrelation_time(x) == doctest::Approx(9.0).epsilon(0.1));
  std::vector<double> iid(20000);
  for (auto& s : iid) s = rng.gaussian();
  CHECK(integrated_autocorrelation_time(iid) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("mean covariance") {
  const std::vector<std::vector<double>> rows{{1, 2}, {2, 4}, {3, 6}};
  const auto c = mean_covariance(rows);
  CHECK(c[0][0] == doctest::Approx(1.0 / 3));
  CHECK(c[0][1] == doctest::Approx(2.0 / 3));
  CHECK(c[1][1] == doctest::Approx(4.0 / 3));
}

}

TEST_SUITE("quadrature") {

TEST_CASE("Gauss-Hermite moments") {
  const auto rule = standard_normal_rule(64);
  double w = 0;
  for (double x : rule.weights) w += x;
  CHECK(w == doctest::Approx(1.0).epsilon(1e-13));
  for (int m = 0; m <= 20; m += 2) {
    double expect = 1;
    for (int j = m - 1; j > 1; j -= 2) expect *= j;
    CHECK(gaussian_expect([m](double x) { return std::pow(x, m); }) == doctest::Approx(expect).epsilon(1e-11));
  }
  CHECK(gaussian_expect([](double x) { return std::cos(x); }) == doctest::Approx(std::exp(-0.5)).epsilon(1e-13));
  CHECK(gaussian_expect([](std::span<const double> x) { return x[0] * x[0] * x[1] * x[1] + x[2]; }, 3, 16) ==
        doctest::Approx(1.0));
  const auto raw = gauss_hermite(5);
  double sw = 0;
  for (double x : raw.weights) sw += x;
  CHECK(sw == doctest::Approx(std::sqrt(M_PI)));
}

}
