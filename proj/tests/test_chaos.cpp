#include <cmath>

#include "doctest.h"

#include "chaoslab/chaos.hpp"
#include "chaoslab/errors.hpp"
#include "chaoslab/quadrature.hpp"

using namespace chaoslab;

namespace {

ChaosCurve synthetic(const std::vector<double>& t, double (*phi)(double)) {
  ChaosCurve c;
  c.t_grid = t;
  for (double x : t) c.phi_hat.push_back(phi(x));
  c.std_error.assign(t.size(), 0.0);
  c.max_value = 1.0;
  return c;
}

ChaosOptions exact_options(std::size_t draws, std::uint64_t master) {
  ChaosOptions o;
  o.n_disorder = draws;
  o.seed = SeedRecord::from_master(master);
  return o;
}

}  // namespace

TEST_SUITE("chaos") {

TEST_CASE("grid validation") {
  ChaosOptions o = exact_options(4, 1);
  CHECK_THROWS_AS(chaos_curve(ModelSpec::sk(4), Beta::finite(1), {}, o), invalid_parameter);
  CHECK_THROWS_AS(chaos_curve(ModelSpec::sk(4), Beta::finite(1), {0.0, 0.0}, o), invalid_parameter);
  CHECK_THROWS_AS(chaos_curve(ModelSpec::sk(4), Beta::finite(1), {-1.0}, o), invalid_parameter);
  const auto grid = default_time_grid();
  CHECK(grid.size() == 40);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == doctest::Approx(10.0));
  CHECK_NOTHROW(validate_time_grid(grid));
}

TEST_CASE("beta = 0 gives 1/N exactly and t = 50 gives 1/N") {
  const auto zero = chaos_curve(ModelSpec::sk(8), Beta::finite(0.0), {0.0, 0.5, 50.0}, exact_options(5, 2));
  for (double v : zero.phi_hat) CHECK(v == doctest::Approx(1.0 / 8).epsilon(1e-12));
  const auto hot = chaos_curve(ModelSpec::sk(8), Beta::finite(1.5), {0.0, 50.0}, exact_options(400, 3));
  CHECK(std::abs(hot.phi_hat[1] - 1.0 / 8) < 3 * hot.std_error[1]);
}

TEST_CASE("SK N = 10 beta = 1: phi(0.5) <= phi(0) and interpolation holds") {
  const auto c = chaos_curve(ModelSpec::sk(10), Beta::finite(1.0), {0.0, 0.2, 0.5, 1.0, 3.0}, exact_options(300, 4));
  const double diff_sd = std::sqrt(c.covariance[0][0] + c.covariance[2][2] - 2 * c.covariance[0][2]);
  CHECK(c.phi_hat[2] <= c.phi_hat[0] + 3 * diff_sd);
  const auto report = check_complete_monotonicity(c);
  CHECK(report.ok());
  CHECK(report.pairs_checked == 10);
  CHECK(report.triples_checked == 6);
  for (double v : c.phi_hat) {
    CHECK(v >= 0.0);
    CHECK(v <= c.max_value);
  }
}

TEST_CASE("complete monotonicity on synthetic curves") {
  const std::vector<double> t{0.0, 0.1, 0.25, 0.5, 1.0, 2.0};
  CHECK(check_complete_monotonicity(synthetic(t, [](double x) { return std::exp(-2 * x); })).ok());
  CHECK(check_complete_monotonicity(synthetic(t, [](double x) { return 1.0 / ((1 + x) * (1 + x)); })).ok());
  const auto lin = check_complete_monotonicity(synthetic({0.0, 0.125, 0.25, 0.5}, [](double x) { return 1.0 - x; }));
  CHECK_FALSE(lin.ok());
  for (const auto& v : lin.violations) CHECK(v.kind == "interpolation");
  const auto up = check_complete_monotonicity(synthetic({0.0, 1.0}, [](double x) { return x; }));
  CHECK_FALSE(up.ok());
}

TEST_CASE("observables agree between the pattern path and direct pair sums") {
  const auto seed = SeedRecord::from_master(5);
  const std::vector<ModelSpec> models{ModelSpec::sk(6), ModelSpec::edwards_anderson(Graph::cycle(6)), ModelSpec::rem(6),
                                      ModelSpec::mixed_p_spin(6, {{2, 0.4}, {4, 0.6}})};
  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto& model = models[m];
    const auto a = build_gibbs_table(model, fresh_disorder(model.coupling_count(), seed.child({m, 0})), Beta::finite(0.9));
    const auto b = build_gibbs_table(model, fresh_disorder(model.coupling_count(), seed.child({m, 1})), Beta::finite(0.9));
    std::vector<ChaosObservable> obs{ChaosObservable::overlap_power, ChaosObservable::kernel, ChaosObservable::identity};
    if (model.is_ea()) obs.push_back(ChaosObservable::bond_overlap);
    for (auto o : obs) {
      const double brute = two_replica_expect(a, b, [&](std::uint64_t x, std::uint64_t y) {
        return pair_observable(model, o, 2, SpinConfiguration::from_index(x, 6), SpinConfiguration::from_index(y, 6));
      });
      CHECK_MESSAGE(product_expect(model, o, 2, a, b) == doctest::Approx(brute).epsilon(1e-12),
                    model.name() << " " << to_string(o));
    }
  }
  CHECK_THROWS_AS(product_expect(ModelSpec::sk(3), ChaosObservable::bond_overlap, 1,
                                 build_gibbs_table(ModelSpec::sk(3), fresh_disorder(9, seed), Beta::finite(1)),
                                 build_gibbs_table(ModelSpec::sk(3), fresh_disorder(9, seed), Beta::finite(1))),
                  invalid_parameter);
}

TEST_CASE("integral of a known curve") {
  // phi = e^{-2t}: int_0^inf e^{-3t} dt = 1/3.
  auto c = synthetic(default_time_grid(10.0, 200), [](double x) { return std::exp(-2 * x); });
  c.observable = ChaosObservable::kernel;
  const auto est = variance_from_chaos_integral(c);
  CHECK(est.estimate == doctest::Approx(1.0 / 3).epsilon(1e-4));
  CHECK(est.tail_bound == doctest::Approx(std::exp(-30.0)));
  auto flat = synthetic({0.0, 1.0, 5.0}, [](double) { return 0.0; });
  flat.observable = ChaosObservable::kernel;
  CHECK(variance_from_chaos_integral(flat).estimate == 0.0);
  auto shifted = synthetic({0.5, 1.0}, [](double) { return 1.0; });
  shifted.observable = ChaosObservable::kernel;
  CHECK_THROWS_AS(variance_from_chaos_integral(shifted), invalid_parameter);
  CHECK_THROWS_AS(variance_from_chaos_integral(synthetic({0.0, 1.0}, [](double) { return 1.0; })), invalid_parameter);
}

TEST_CASE("interpolation upper bound") {
  const int n = 8;
  const double beta = 1.2, s = 0.7;
  CHECK(interpolation_upper_bound(ModelSpec::rem(n), Beta::finite(beta), s, 1) ==
        doctest::Approx(std::pow(2.0, -n) * std::exp(2 * beta * beta * std::exp(-s) * n)).epsilon(1e-12));
  CHECK(interpolation_upper_bound(ModelSpec::sk(10), Beta::finite(1.0), 50.0, 1) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(interpolation_upper_bound(ModelSpec::edwards_anderson(Graph::cycle(4)), Beta::finite(1), 1, 1),
                  unsupported_error);
  // Against the exact curve at t = s.
  const auto c = chaos_curve(ModelSpec::sk(10), Beta::finite(1.0), {0.0, 1.0, 3.0}, exact_options(300, 6));
  const double rhs = interpolation_upper_bound(ModelSpec::sk(10), Beta::finite(1.0), 3.0, 1);
  CHECK(rhs >= c.phi_hat[2] - 3 * c.std_error[2]);
  const auto at_s = chaos_from_interpolation(ModelSpec::sk(10), Beta::finite(1.0), 3.0, {3.0}, 1, c.phi_hat[0]);
  CHECK(at_s.bound == doctest::Approx(rhs));
  CHECK(chaos_from_interpolation(ModelSpec::sk(10), Beta::finite(1.0), 0.0, {3.0}, 1, c.phi_hat[0]).bound ==
        c.phi_hat[0]);
  const auto mid = chaos_from_interpolation(ModelSpec::sk(10), Beta::finite(1.0), 1.0, {3.0}, 1, c.phi_hat[0]);
  CHECK(mid.bound >= c.phi_hat[1] - 3 * c.std_error[1]);
  CHECK_THROWS_AS(chaos_from_interpolation(ModelSpec::sk(10), Beta::finite(1.0), 1.0, {0.5}, 1, 0.3), invalid_parameter);
}

TEST_CASE("REM overlap curve") {
  const auto zero = rem_overlap_curve(8, Beta::finite(0.0), {0.0, 0.3, 50.0}, 4, SeedRecord::from_master(7));
  for (double v : zero.phi_hat) CHECK(v == doctest::Approx(1.0 / 256).epsilon(1e-12));
  const auto c = rem_overlap_curve(8, Beta::finite(2.5), {0.0, 0.2, 1.0, 50.0}, 2000, SeedRecord::from_master(8));
  CHECK(check_complete_monotonicity(c).ok());
  CHECK(std::abs(c.phi_hat[3] - 1.0 / 256) < 3 * c.std_error[3]);
}

TEST_CASE("quadrature engine for a single edge") {
  ChaosOptions o;
  o.engine = Engine::quadrature;
  o.observable = ChaosObservable::kernel;
  const auto edge = ModelSpec::edwards_anderson(Graph(2, {{0, 1}}));
  const auto c = chaos_curve(edge, Beta::finite(1.0), {0.0, 50.0}, o);
  // t = 0: E tanh^2(g); t = inf: (E tanh g)^2 = 0.
  double ref = 0;
  const auto rule = standard_normal_rule(64);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) ref += rule.weights[i] * std::pow(std::tanh(rule.nodes[i]), 2);
  CHECK(c.phi_hat[0] == doctest::Approx(ref).epsilon(1e-12));
  CHECK(std::abs(c.phi_hat[1]) < 1e-12);
  CHECK_THROWS_AS(chaos_curve(ModelSpec::sk(2), Beta::finite(1.0), {0.0}, o), unsupported_error);
}

TEST_CASE("exact curves are reproducible and thread-count independent") {
  auto o = exact_options(20, 9);
  const auto a = chaos_curve(ModelSpec::sk(6), Beta::finite(1.0), {0.0, 1.0}, o);
  o.threads = 3;
  const auto b = chaos_curve(ModelSpec::sk(6), Beta::finite(1.0), {0.0, 1.0}, o);
  CHECK(a.phi_hat == b.phi_hat);
  CHECK(a.std_error == b.std_error);
}

}
