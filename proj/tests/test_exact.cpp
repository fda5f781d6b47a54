#include <cmath>
#include <numeric>

#include "doctest.h"

#include "chaoslab/errors.hpp"
#include "chaoslab/exact.hpp"

using namespace chaoslab;

namespace {

const ModelSpec kEdge = ModelSpec::edwards_anderson(Graph(2, {{0, 1}}));

}  // namespace

TEST_SUITE("exact") {

TEST_CASE("single-edge closed forms") {
  const auto zero = build_gibbs_table(kEdge, make_disorder({0.0}), Beta::finite(1.0));
  CHECK(std::exp(zero.log_z) == doctest::Approx(4.0));
  CHECK(free_energy(zero) == doctest::Approx(std::log(4.0)));
  for (double b : {0.3, 1.0, 2.5}) {
    for (double g : {-1.2, 0.4, 2.0}) {
      const auto t = build_gibbs_table(kEdge, make_disorder({g}), Beta::finite(b));
      CHECK(free_energy(t) == doctest::Approx(std::log(4 * std::cosh(b * g)) / b).epsilon(1e-12));
      const double corr = gibbs_expect(t, [](std::uint64_t s) { return double(spin_of(s, 0) * spin_of(s, 1)); });
      CHECK(corr == doctest::Approx(std::tanh(b * g)).epsilon(1e-12));
    }
  }
  const auto inf = build_gibbs_table(kEdge, make_disorder({2.0}), Beta::infinity());
  CHECK(free_energy(inf) == doctest::Approx(2.0));
  CHECK(gibbs_expect(inf, [](std::uint64_t s) { return double(spin_of(s, 0) * spin_of(s, 1)); }) == doctest::Approx(1.0));
}

TEST_CASE("SK N = 1 and beta = 0") {
  const auto t = build_gibbs_table(ModelSpec::sk(1), make_disorder({0.8}), Beta::finite(2.0));
  CHECK(free_energy(t) == doctest::Approx(0.8 / std::sqrt(2.0) + std::log(2.0) / 2.0));
  const auto zero = build_gibbs_table(ModelSpec::sk(4), fresh_disorder(16, SeedRecord::from_master(2)), Beta::finite(0.0));
  CHECK(gibbs_expect(zero, [](std::uint64_t s) { return double(spin_of(s, 0) * spin_of(s, 1)); }) ==
        doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(free_energy(zero), numeric_error);
}

TEST_CASE("weights are normalized and stable at huge beta") {
  const auto g = fresh_disorder(100, SeedRecord::from_master(4));
  for (double b : {0.1, 1.0, 1000.0}) {
    const auto t = build_gibbs_table(ModelSpec::sk(10), g, Beta::finite(b));
    const double sum = std::accumulate(t.weights.begin(), t.weights.end(), 0.0);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::isfinite(t.log_z));
  }
}

TEST_CASE("gray-code energies match direct evaluation") {
  const auto seed = SeedRecord::from_master(5);
  const std::vector<ModelSpec> models{ModelSpec::sk(14), ModelSpec::edwards_anderson(Graph::torus(3, 5)),
                                      ModelSpec::mixed_p_spin(8, {{2, 0.5}, {3, 0.3}}), ModelSpec::rem(10)};
  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto& model = models[m];
    const auto g = fresh_disorder(model.coupling_count(), seed.child({m}));
    const auto e = enumerate_energies(model, g);
    const auto e4 = enumerate_energies(model, g, {4});
    CHECK(e == e4);
    Rng rng(seed.child({m, 1}));
    for (int k = 0; k < 100; ++k) {
      const auto s = rng.below(e.size());
      const double h = hamiltonian(model, g, SpinConfiguration::from_index(s, model.n_sites()));
      CHECK(std::abs(e[s] - h) <= 1e-10 * std::max(1.0, std::abs(h)));
    }
  }
}

TEST_CASE("size caps and non-finite disorder") {
  CHECK_THROWS_AS(build_gibbs_table(ModelSpec::sk(25), fresh_disorder(625, {}), Beta::finite(1)), resource_error);
  CHECK_THROWS_AS(build_gibbs_table(kEdge, make_disorder({std::nan("")}), Beta::finite(1)), numeric_error);
}

TEST_CASE("free energy brackets") {
  const auto model = ModelSpec::sk(10);
  const auto g = fresh_disorder(100, SeedRecord::from_master(6));
  const double n = 10;
  for (double b : {0.5, 1.0, 3.0}) {
    const auto t = build_gibbs_table(model, g, Beta::finite(b));
    const double m = -t.min_energy;  // max of -H
    const double f = free_energy(t);
    CHECK(b * m <= b * f + 1e-12);
    CHECK(b * f <= b * m + n * std::log(2.0) + 1e-12);
    // beta F(beta) is convex with slope <-H>: secants bracket the Gibbs mean.
    const double h = 1e-3;
    const double mean = gibbs_expect(t, [&](std::uint64_t s) { return -t.energies[s]; });
    const double up = (build_gibbs_table(model, g, Beta::finite(b + h)).log_z - t.log_z) / h;
    const double down = (t.log_z - build_gibbs_table(model, g, Beta::finite(b - h)).log_z) / h;
    CHECK(down <= mean + 1e-9);
    CHECK(mean <= up + 1e-9);
  }
}

TEST_CASE("two-replica averages") {
  const auto seed = SeedRecord::from_master(8);
  for (const auto& model : {ModelSpec::sk(6), ModelSpec::edwards_anderson(Graph::cycle(6)), ModelSpec::rem(6)}) {
    const auto a = build_gibbs_table(model, fresh_disorder(model.coupling_count(), seed), Beta::finite(0.0));
    CHECK(overlap_moment(a, a, 1) == doctest::Approx(1.0 / 6).epsilon(1e-13));
  }
  // Brute-force 16 x 16 sum for E[R^4] of uniform spins, N = 4.
  const auto u = build_gibbs_table(ModelSpec::sk(4), fresh_disorder(16, seed), Beta::finite(0.0));
  double brute = 0;
  for (int x = 0; x < 16; ++x) {
    for (int y = 0; y < 16; ++y) {
      const double r = site_overlap(SpinConfiguration::from_index(x, 4), SpinConfiguration::from_index(y, 4)).value;
      brute += std::pow(r, 4) / 256.0;
    }
  }
  CHECK(overlap_moment(u, u, 2) == doctest::Approx(brute).epsilon(1e-13));
  CHECK(brute == doctest::Approx(5.0 / 32));

  const auto model = ModelSpec::sk(7);
  const auto a = build_gibbs_table(model, fresh_disorder(49, seed.child({1})), Beta::finite(1.3));
  const auto b = build_gibbs_table(model, fresh_disorder(49, seed.child({2})), Beta::finite(0.7));
  double sq = 0;
  for (double w : a.weights) sq += w * w;
  const auto law = disagreement_law(a, a);
  CHECK(law[0] == doctest::Approx(sq).epsilon(1e-12));
  for (int k = 0; k <= 4; ++k) {
    const double generic = two_replica_expect(a, b, [&](std::uint64_t x, std::uint64_t y) {
      return std::pow(site_overlap(SpinConfiguration::from_index(x, 7), SpinConfiguration::from_index(y, 7)).value, 2 * k);
    });
    CHECK(overlap_moment(a, b, k) == doctest::Approx(generic).epsilon(1e-12));
  }
  const double same = two_replica_expect(a, a, [](std::uint64_t x, std::uint64_t y) { return x == y ? 1.0 : 0.0; });
  CHECK(same == doctest::Approx(sq).epsilon(1e-12));
  CHECK_THROWS_AS(two_replica_expect(build_gibbs_table(ModelSpec::sk(13), fresh_disorder(169, seed), Beta::finite(1)),
                                     build_gibbs_table(ModelSpec::sk(13), fresh_disorder(169, seed), Beta::finite(1)),
                                     [](std::uint64_t, std::uint64_t) { return 0.0; }),
                  resource_error);
}

TEST_CASE("field summary and ground states") {
  const auto s1 = field_summary(ModelSpec::sk(1), make_disorder({-0.7}));
  CHECK(s1.max_field == doctest::Approx(-0.7));
  CHECK(s1.argmax.size() == 2);
  const auto e = field_summary(kEdge, make_disorder({-1.3}));
  CHECK(e.max_field == doctest::Approx(1.3));
  CHECK(field_summary(ModelSpec::sk(6), fresh_disorder(36, {})).sigma2 == doctest::Approx(36.0));
  CHECK(field_summary(ModelSpec::sk(6), fresh_disorder(36, {})).sigma2_gibbs == doctest::Approx(3.0));

  const auto model = ModelSpec::sk(12);
  const auto g = fresh_disorder(144, SeedRecord::from_master(10));
  double naive = -1e300;
  for (std::uint64_t s = 0; s < 4096; ++s) naive = std::max(naive, field_value(model, g, SpinConfiguration::from_index(s, 12)));
  CHECK(field_summary(model, g).max_field == doctest::Approx(naive).epsilon(1e-12));

  auto strings = [](const std::vector<SpinConfiguration>& v) {
    std::vector<std::string> out;
    for (const auto& c : v) out.push_back(c.to_string());
    std::sort(out.begin(), out.end());
    return out;
  };
  CHECK(strings(ground_states(kEdge, make_disorder({1.0}))) == std::vector<std::string>{"++", "--"});
  CHECK(strings(ground_states(kEdge, make_disorder({-1.0}))) == std::vector<std::string>{"+-", "-+"});
  CHECK(ground_states(kEdge, make_disorder({0.0})).size() == 4);
}

TEST_CASE("inverse-cdf sampling and summary json") {
  const auto t = build_gibbs_table(kEdge, make_disorder({0.5}), Beta::finite(1.0));
  std::vector<int> hits(4, 0);
  Rng rng(SeedRecord::from_master(12));
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++hits[sample_state(t, rng.uniform())];
  for (int s = 0; s < 4; ++s) {
    const double p = t.weights[s];
    CHECK(std::abs(hits[s] / double(n) - p) < 5 * std::sqrt(p * (1 - p) / n));
  }
  const auto j = summary_json(build_gibbs_table(kEdge, make_disorder({1.0}), Beta::infinity()));
  CHECK(j.at("beta") == "inf");
  CHECK(j.at("ground_states").size() == 2);
  CHECK(beta_from_json(j.at("beta")).is_infinite());
}

}
