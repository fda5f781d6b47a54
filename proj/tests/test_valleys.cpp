#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "chaoslab/errors.hpp"
#include "chaoslab/exact.hpp"
#include "chaoslab/valleys.hpp"

using namespace chaoslab;

namespace {

DisorderVector draw(const ModelSpec& m, std::uint64_t master) {
  return fresh_disorder(m.coupling_count(), SeedRecord::from_master(master));
}

}  // namespace

TEST_SUITE("valleys") {

TEST_CASE("parameter validation and schedule") {
  ValleyParams p;
  CHECK_NOTHROW(validate(p));
  p.r = 1;
  CHECK_THROWS_AS(validate(p), invalid_parameter);
  p = {};
  p.epsilon = 1.0;
  CHECK_THROWS_AS(validate(p), invalid_parameter);
  p = {};
  p.beta = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(validate(p), invalid_parameter);
  const auto s = paper_schedule(18);
  const double l = std::log(18.0);
  CHECK(s.beta == doctest::Approx(std::exp(std::sqrt(l))));
  CHECK(s.t == doctest::Approx(std::pow(l, -1.0 / 3)));
  CHECK(s.delta == doctest::Approx(std::pow(l, -1.0 / 8)));
  CHECK(s.epsilon == doctest::Approx(std::exp(-std::pow(l, 1.0 / 8))));
  CHECK(s.r >= 2);
  const auto back = valley_params_from_json(to_json(s), ValleyParams{});
  CHECK(back.beta == s.beta);
  CHECK(back.r == s.r);
}

TEST_CASE("certify: duplicates fail, singleton argmax passes") {
  const auto model = ModelSpec::sk(8);
  const auto g = draw(model, 1);
  const auto best = ground_states(model, g).front();
  const auto single = certify(model, g, {best}, 0.2, 0.3);
  CHECK(single.energetic);
  CHECK(single.orthogonal);
  CHECK(single.pass);
  CHECK(single.field_ratio[0] == doctest::Approx(1.0));
  const auto dup = certify(model, g, {best, best}, 0.2, 0.3);
  CHECK_FALSE(dup.orthogonal);
  CHECK_FALSE(dup.pass);
  CHECK(dup.overlap_ratio[0][1] == doctest::Approx(1.0));
  CHECK_THROWS_AS(certify(model, g, {}, 0.2, 0.3), invalid_parameter);
}

TEST_CASE("certify agrees with brute-force pair feasibility at N = 10") {
  const int n = 10;
  const auto model = ModelSpec::sk(n);
  const auto g = draw(model, 2);
  const auto field = enumerate_field(model, g);
  const double m = *std::max_element(field.begin(), field.end());
  for (double eps : {0.05, 0.2}) {
    for (double delta : {0.1, 0.3}) {
      // Oracle: some pair of states, both with X >= (1 - delta) M and R^2 <= eps.
      std::vector<std::uint64_t> good;
      for (std::uint64_t s = 0; s < field.size(); ++s)
        if (field[s] >= (1 - delta) * m) good.push_back(s);
      bool feasible = false;
      std::pair<std::uint64_t, std::uint64_t> witness{0, 0};
      for (std::size_t a = 0; a < good.size() && !feasible; ++a)
        for (std::size_t b = a + 1; b < good.size() && !feasible; ++b) {
          const int agree = n - std::popcount(good[a] ^ good[b]);
          const double r = (2.0 * agree - n) / n;
          if (r * r <= eps) {
            feasible = true;
            witness = {good[a], good[b]};
          }
        }
      if (feasible) {
        const auto rep = certify(model, g,
                                 {SpinConfiguration::from_index(witness.first, n),
                                  SpinConfiguration::from_index(witness.second, n)},
                                 eps, delta);
        CHECK(rep.pass);
      }
      // Every pair certify accepts must be oracle-feasible.
      int accepted = 0;
      for (std::size_t a = 0; a < good.size() && a < 40; ++a)
        for (std::size_t b = a + 1; b < good.size() && b < 40; ++b) {
          const auto rep = certify(model, g,
                                   {SpinConfiguration::from_index(good[a], n),
                                    SpinConfiguration::from_index(good[b], n)},
                                   eps, delta);
          if (rep.pass) {
            ++accepted;
            CHECK(feasible);
          }
        }
      if (!feasible) CHECK(accepted == 0);
    }
  }
}

TEST_CASE("property: certify is permutation invariant and monotone in epsilon and delta") {
  const auto model = ModelSpec::sk(9);
  Rng rng(SeedRecord::from_master(3));
  for (int c = 0; c < 50; ++c) {
    const auto g = draw(model, 100 + c);
    std::vector<SpinConfiguration> cfg;
    for (int i = 0; i < 3; ++i) cfg.push_back(SpinConfiguration::from_index(rng.below(512), 9));
    const double eps = rng.uniform() * 0.9 + 0.05, delta = rng.uniform() * 0.9 + 0.05;
    const auto base = certify(model, g, cfg, eps, delta);
    auto perm = cfg;
    std::reverse(perm.begin(), perm.end());
    CHECK(certify(model, g, perm, eps, delta).pass == base.pass);
    if (base.pass) {
      CHECK(certify(model, g, cfg, std::min(0.99, eps + 0.05), delta).pass);
      CHECK(certify(model, g, cfg, eps, std::min(0.99, delta + 0.05)).pass);
    }
  }
}

TEST_CASE("find_valleys: t = 0 at large beta collapses onto the argmax") {
  const auto model = ModelSpec::sk(10);
  const auto g = draw(model, 4);
  ValleyParams p;
  p.r = 2;
  p.t = 0.0;
  p.beta = 1000.0;
  const auto rep = find_valleys(model, g, p, SeedRecord::from_master(5));
  CHECK(rep.configs[0] == rep.configs[1]);
  CHECK_FALSE(rep.orthogonal);
  CHECK(rep.energetic);
}

TEST_CASE("find_valleys: beta = 0 draws are uniform and fail a tight energy check") {
  const auto model = ModelSpec::sk(10);
  const auto g = draw(model, 6);
  ValleyParams p;
  p.r = 3;
  p.t = 50.0;
  p.beta = 0.0;
  p.delta = 0.05;
  const auto field = enumerate_field(model, g);
  const double m = *std::max_element(field.begin(), field.end());
  const double frac =
      std::count_if(field.begin(), field.end(), [&](double x) { return x >= 0.95 * m; }) / double(field.size());
  int energetic = 0;
  for (int s = 0; s < 20; ++s) energetic += find_valleys(model, g, p, SeedRecord::from_master(50 + s)).energetic;
  // P(all three uniform draws in the top set) = frac^3.
  CHECK(energetic <= 20 * std::pow(frac, 3) + 3);
}

TEST_CASE("find_valleys is reproducible and thread independent") {
  const auto model = ModelSpec::sk(10);
  const auto g = draw(model, 7);
  ValleyParams p;
  p.beta = 3.0;
  const auto a = find_valleys(model, g, p, SeedRecord::from_master(8));
  const auto b = find_valleys(model, g, p, SeedRecord::from_master(8), 3);
  CHECK(a.configs == b.configs);
  CHECK(a.pass == b.pass);
  CHECK(to_json(a).dump() == to_json(b).dump());
}

TEST_CASE("level valleys") {
  const auto model = ModelSpec::sk(10);
  const auto g = draw(model, 9);
  ValleyParams p;
  p.beta = 2.0;
  const auto plain = find_valleys(model, g, p, SeedRecord::from_master(10));
  const auto level = find_level_valleys(model, g, 1.0, p, SeedRecord::from_master(10));
  CHECK(plain.configs == level.configs);
  CHECK(level.energy_width == 5.0);
  CHECK(level.alpha == 1.0);
  CHECK_THROWS_AS(find_level_valleys(model, g, 0.0, p, SeedRecord::from_master(10)), invalid_parameter);
  p.delta = 0.999;
  const auto loose = find_level_valleys(model, g, 0.5, p, SeedRecord::from_master(11));
  CHECK(loose.energetic);
}

TEST_CASE("report json") {
  const auto model = ModelSpec::sk(6);
  const auto g = draw(model, 12);
  const auto rep = certify(model, g, {SpinConfiguration::from_index(5, 6)}, 0.2, 0.3);
  const auto j = to_json(rep);
  CHECK(j["configs"][0].get<std::string>().size() == 6);
  CHECK(j.contains("site_overlap"));
}

}
