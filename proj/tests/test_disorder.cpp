#include <cmath>
#include <sstream>

#include "doctest.h"

#include "chaoslab/disorder.hpp"
#include "chaoslab/errors.hpp"

using namespace chaoslab;

TEST_SUITE("disorder") {

TEST_CASE("fresh_disorder is reproducible and rejects n = 0") {
  const auto seed = SeedRecord::from_master(7);
  CHECK(fresh_disorder(4, seed).values == fresh_disorder(4, seed).values);
  CHECK(fresh_disorder(4, seed).values != fresh_disorder(4, seed.child({1})).values);
  CHECK_THROWS_AS(fresh_disorder(0, seed), invalid_parameter);
}

TEST_CASE("fresh_disorder moments over 10^6 entries") {
  const auto g = fresh_disorder(1000000, SeedRecord::from_master(11));
  double s1 = 0, s2 = 0;
  for (double x : g.values) {
    s1 += x;
    s2 += x * x;
  }
  const double mean = s1 / 1e6;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(s2 / 1e6 - mean * mean - 1.0) < 0.01);
}

TEST_CASE("ou_mix endpoints") {
  const auto c = couple(16, SeedRecord::from_master(3), 0.0);
  CHECK(ou_mix(c.base, c.fresh_plus, 0.0).values == c.base.values);
  CHECK(ou_mix(c.base, c.fresh_plus, 50.0).values == c.fresh_plus.values);
  CHECK(ou_mix(c.base, c.fresh_plus, 80.0).values == c.fresh_plus.values);
  CHECK_THROWS_AS(ou_mix(c.base, c.fresh_plus, -0.1), invalid_parameter);
  CHECK_THROWS_AS(ou_mix(c.base, fresh_disorder(3, {}), 1.0), shape_error);
}

TEST_CASE("ou_perturb picks the matching fresh copy") {
  const auto c = couple(8, SeedRecord::from_master(5), 0.7);
  const auto plus = ou_perturb(c, Side::plus);
  const auto minus = ou_perturb(c, Side::minus);
  const double a = std::exp(-0.7), b = std::sqrt(1 - std::exp(-1.4));
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(plus[i] == doctest::Approx(a * c.base[i] + b * c.fresh_plus[i]).epsilon(1e-14));
    CHECK(minus[i] == doctest::Approx(a * c.base[i] + b * c.fresh_minus[i]).epsilon(1e-14));
  }
}

TEST_CASE("coupled streams: correlation, normality, two-sided covariance") {
  // One coupled draw of length 10^5 gives 10^5 independent coordinate triples.
  const std::size_t n = 100000;
  const double t = 1.0;
  const auto c = couple(n, SeedRecord::from_master(19), t);
  const auto p = ou_perturb(c, Side::plus);
  const auto m = ou_perturb(c, Side::minus);
  double sgp = 0, spm = 0, s1 = 0, s2 = 0, s4 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sgp += c.base[i] * p[i];
    spm += p[i] * m[i];
    s1 += p[i];
    s2 += p[i] * p[i];
    s4 += std::pow(p[i], 4);
  }
  const double dn = static_cast<double>(n);
  CHECK(std::abs(sgp / dn - std::exp(-1.0)) < 0.01);
  // Cov(g^t, g^{-t}) = e^{-2t}; stderr of a product mean is about sqrt(1 + e^{-4t}) / sqrt(n).
  CHECK(std::abs(spm / dn - std::exp(-2.0 * t)) < 5.0 * std::sqrt(1.0 + std::exp(-4.0 * t)) / std::sqrt(dn));
  CHECK(std::abs(s1 / dn) < 5.0 / std::sqrt(dn));
  CHECK(std::abs(s2 / dn - 1.0) < 5.0 * std::sqrt(2.0 / dn));
  CHECK(std::abs(s4 / dn - 3.0) < 5.0 * std::sqrt(96.0 / dn));
}

TEST_CASE("resample_subset") {
  const auto g = make_disorder({1, 2, 3, 4});
  const auto f = make_disorder({-1, -2, -3, -4});
  CHECK(resample_subset(g, f, ResampleMask{{}, 4}).values == g.values);
  CHECK(resample_subset(g, f, ResampleMask{{0, 1, 2, 3}, 4}).values == f.values);
  const ResampleMask mask{{1, 3}, 4};
  const auto once = resample_subset(g, f, mask);
  CHECK(once.values == std::vector<double>{1, -2, 3, -4});
  CHECK(resample_subset(once, f, mask).values == once.values);
  CHECK_THROWS_AS(resample_subset(g, make_disorder({1.0}), mask), shape_error);
}

TEST_CASE("random_mask edge cases and uniform inclusion") {
  CHECK(random_mask(5, 0, {}).k() == 0);
  CHECK(random_mask(5, 5, {}).indices == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK_THROWS_AS(random_mask(5, 6, {}), invalid_parameter);
  std::vector<int> counts(5, 0);
  const auto seed = SeedRecord::from_master(23);
  const int draws = 100000;
  for (int d = 0; d < draws; ++d) {
    const auto m = random_mask(5, 2, seed.child({static_cast<std::uint64_t>(d)}));
    REQUIRE(m.k() == 2);
    CHECK(m.indices[0] < m.indices[1]);
    for (auto i : m.indices) ++counts[i];
  }
  for (int c : counts) CHECK(std::abs(c / double(draws) - 0.4) < 0.01);
}

TEST_CASE("json and binary round trips keep values and seed") {
  const auto g = fresh_disorder(6, SeedRecord::from_master(99).child({4}));
  const auto j = disorder_from_json(to_json(g));
  CHECK(j.values == g.values);
  CHECK(j.seed == g.seed);
  std::stringstream buf;
  write_binary(buf, g);
  const auto b = read_binary(buf);
  CHECK(b.values == g.values);
  CHECK(b.seed == g.seed);
  std::stringstream bad("XXXX");
  CHECK_THROWS(read_binary(bad));
}

}
