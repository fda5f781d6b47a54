#include <cmath>

#include "doctest.h"

#include "chaoslab/errors.hpp"
#include "chaoslab/exact.hpp"
#include "chaoslab/sampler.hpp"
#include "chaoslab/stats.hpp"

using namespace chaoslab;

namespace {

const ModelSpec kEdge = ModelSpec::edwards_anderson(Graph(2, {{0, 1}}));

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("config validation and beta = inf") {
  ChainConfig cfg;
  cfg.sweeps = 10;
  cfg.burn_in = 10;
  CHECK_THROWS_AS(validate(cfg), invalid_parameter);
  cfg.burn_in = 1;
  cfg.thinning = 0;
  CHECK_THROWS_AS(validate(cfg), invalid_parameter);
  CHECK(default_chain_config(12, 10, {}).burn_in == 1200);
  CHECK_THROWS_AS(GibbsChain(kEdge, make_disorder({1.0}), Beta::infinity(), UpdateKernel::glauber, {}), unsupported_error);
}

TEST_CASE("flip probabilities") {
  CHECK(flip_probability(UpdateKernel::glauber, 1.0, 0.0) == doctest::Approx(0.5));
  CHECK(flip_probability(UpdateKernel::glauber, 2.0, 1.0) == doctest::Approx(1.0 / (1.0 + std::exp(2.0))));
  CHECK(flip_probability(UpdateKernel::glauber, 1e3, 1e3) == doctest::Approx(0.0));
  CHECK(flip_probability(UpdateKernel::metropolis, 1.0, -2.0) == 1.0);
  CHECK(flip_probability(UpdateKernel::metropolis, 1.0, 2.0) == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("single-site transition frequencies match Glauber probabilities") {
  // Restrict to site 0 of a single edge: states (+,+) and (-,+).
  const double beta = 0.8, g = 0.6;
  GibbsChain chain(kEdge, make_disorder({g}), Beta::finite(beta), UpdateKernel::glauber, SeedRecord::from_master(1));
  const auto up = SpinConfiguration::from_string("++");
  const double dh = 2.0 * g;  // H(-,+) - H(+,+)
  const double p = flip_probability(UpdateKernel::glauber, beta, dh);
  const int n = 100000;
  int flips = 0;
  for (int i = 0; i < n; ++i) {
    chain.set_state(up);
    REQUIRE(chain.delta_energy(0) == doctest::Approx(dh));
    flips += chain.update_site(0);
  }
  CHECK(std::abs(flips / double(n) - p) < 5 * std::sqrt(p * (1 - p) / n));
  // Detailed balance: pi(+,+) P(flip) = pi(-,+) P(flip back).
  const double back = flip_probability(UpdateKernel::glauber, beta, -dh);
  CHECK(std::exp(-beta * -g) * p == doctest::Approx(std::exp(-beta * g) * back));
}

TEST_CASE("beta = 0 marginals are uniform") {
  const auto model = ModelSpec::sk(6);
  const auto g = fresh_disorder(36, SeedRecord::from_master(2));
  ChainConfig cfg;
  cfg.sweeps = 100000;
  cfg.burn_in = 10;
  cfg.seed = SeedRecord::from_master(3);
  std::vector<double> sum(6, 0.0);
  std::size_t count = 0;
  run_chain(model, g, Beta::finite(0.0), cfg, [&](const SpinConfiguration& s) {
    for (int i = 0; i < 6; ++i) sum[i] += s.spin(i);
    ++count;
  });
  for (double s : sum) CHECK(std::abs(s / count) < 0.02);
}

TEST_CASE("single edge correlation converges to tanh(beta g)") {
  ChainConfig cfg;
  cfg.sweeps = 200000;
  cfg.burn_in = 100;
  cfg.seed = SeedRecord::from_master(4);
  std::vector<double> series;
  run_chain(kEdge, make_disorder({1.0}), Beta::finite(1.0), cfg,
            [&](const SpinConfiguration& s) { series.push_back(s.spin(0) * s.spin(1)); });
  const auto est = chain_mean(series);
  const auto exact = gibbs_expect(build_gibbs_table(kEdge, make_disorder({1.0}), Beta::finite(1.0)),
                                  [](std::uint64_t s) { return double(spin_of(s, 0) * spin_of(s, 1)); });
  CHECK(exact == doctest::Approx(std::tanh(1.0)));
  CHECK(std::abs(est.mean - exact) < 3 * est.std_error);
}

TEST_CASE("SK N = 10 chain averages match enumeration") {
  const auto model = ModelSpec::sk(10);
  const auto g = fresh_disorder(100, SeedRecord::from_master(5));
  const auto table = build_gibbs_table(model, g, Beta::finite(0.5));
  for (auto kernel : {UpdateKernel::glauber, UpdateKernel::metropolis}) {
    auto cfg = default_chain_config(10, 60000, SeedRecord::from_master(6));
    cfg.kernel = kernel;
    std::vector<double> energy, corr, mag;
    run_chain(model, g, Beta::finite(0.5), cfg, [&](const SpinConfiguration& s) {
      energy.push_back(hamiltonian(model, g, s));
      corr.push_back(s.spin(0) * s.spin(3));
      double m = 0;
      for (int i = 0; i < 10; ++i) m += s.spin(i);
      mag.push_back(m * m / 100.0);
    });
    const double e = gibbs_expect(table, [&](std::uint64_t s) { return table.energies[s]; });
    const double c = gibbs_expect(table, [](std::uint64_t s) { return double(spin_of(s, 0) * spin_of(s, 3)); });
    const double m2 = gibbs_expect(table, [](std::uint64_t s) {
      double m = 0;
      for (int i = 0; i < 10; ++i) m += spin_of(s, i);
      return m * m / 100.0;
    });
    for (auto [series, exact] : {std::pair{&energy, e}, std::pair{&corr, c}, std::pair{&mag, m2}}) {
      const auto est = chain_mean(*series);
      CHECK(std::abs(est.mean - exact) < 3 * est.std_error);
    }
  }
}

TEST_CASE("replica pairs: E<R^2> against the exact product measure") {
  const auto model = ModelSpec::sk(10);
  const auto ga = fresh_disorder(100, SeedRecord::from_master(7));
  const auto gb = ou_mix(ga, fresh_disorder(100, SeedRecord::from_master(8)), 0.3);
  const Beta beta = Beta::finite(0.5);
  auto cfg = default_chain_config(10, 50000, SeedRecord::from_master(9));
  const auto pairs = sample_replica_pair(model, ga, gb, beta, cfg, "test");
  REQUIRE(pairs.size() == cfg.sweeps - cfg.burn_in);
  CHECK(pairs.front().provenance == "test");
  std::vector<double> r2;
  for (const auto& p : pairs) r2.push_back(std::pow(site_overlap(p.first, p.second).value, 2));
  const auto est = chain_mean(r2);
  const double exact = overlap_moment(build_gibbs_table(model, ga, beta), build_gibbs_table(model, gb, beta), 1);
  CHECK(std::abs(est.mean - exact) < 3 * est.std_error);

  // beta = 0: independent uniform replicas.
  const auto zero = sample_replica_pair(model, ga, ga, Beta::finite(0.0), cfg);
  std::vector<double> z;
  for (const auto& p : zero) z.push_back(std::pow(site_overlap(p.first, p.second).value, 2));
  const auto ez = chain_mean(z);
  CHECK(std::abs(ez.mean - 0.1) < 3 * ez.std_error);
}

TEST_CASE("chains are deterministic under the seed") {
  ChainConfig cfg;
  cfg.sweeps = 300;
  cfg.burn_in = 10;
  cfg.seed = SeedRecord::from_master(10);
  const auto model = ModelSpec::rem(8);
  const auto g = fresh_disorder(256, SeedRecord::from_master(11));
  CHECK(run_chain(model, g, Beta::finite(1.0), cfg) == run_chain(model, g, Beta::finite(1.0), cfg));
}

}
