#include "chaoslab/variance.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "chaoslab/errors.hpp"
#include "chaoslab/parallel.hpp"
#include "chaoslab/quadrature.hpp"
#include "chaoslab/sampler.hpp"

namespace chaoslab {

std::vector<double> free_energy_samples(const ModelSpec& model, Beta beta, const VarianceOptions& options) {
  if (options.n_disorder < 2) throw invalid_parameter("n_disorder must be >= 2");
  std::vector<double> out(options.n_disorder);
  parallel_for(options.n_disorder, options.threads, [&](std::size_t i) {
    const auto g = options.disorder_source ? options.disorder_source(i)
                                           : fresh_disorder(model.coupling_count(), options.seed.child({i}));
    out[i] = free_energy(build_gibbs_table(model, g, beta));
  });
  return out;
}

VarianceEstimate variance_direct(const ModelSpec& model, Beta beta, const VarianceOptions& options) {
  if (!beta.is_infinite() && beta.value() == 0.0) throw invalid_parameter("variance of F needs beta > 0");
  if (options.engine == Engine::exact) {
    const auto samples = free_energy_samples(model, beta, options);
    return variance_with_jackknife(samples);
  }
  if (options.engine != Engine::quadrature) throw invalid_parameter("variance_direct: engine must be exact or quadrature");
  const int dims = static_cast<int>(model.coupling_count());
  if (dims > 3) throw unsupported_error("quadrature variance is limited to 3 couplings");
  auto f = [&](std::span<const double> x) {
    return free_energy(build_gibbs_table(model, make_disorder({x.begin(), x.end()}), beta));
  };
  const double m1 = gaussian_expect(f, dims, options.quadrature_nodes);
  const double m2 = gaussian_expect([&](std::span<const double> x) { const double v = f(x); return v * v; }, dims,
                                    options.quadrature_nodes);
  VarianceEstimate out;
  out.mean = m1;
  out.variance = std::max(0.0, m2 - m1 * m1);
  out.ci_low = out.ci_high = out.variance;
  return out;
}

double superconcentration_bound(double n, double beta, double c) {
  if (!(n > 1.0)) throw invalid_parameter("superconcentration_bound: N must be > 1");
  if (!(beta >= 0.0) || !(c > 0.0)) throw invalid_parameter("superconcentration_bound: need beta >= 0 and C > 0");
  return c * n * std::log(2.0 + c * beta) / std::log(n);
}

double ea_variance_lower_bound(const Graph& graph, Beta beta) {
  const double d = graph.max_degree();
  if (d == 0) return 0.0;
  const double cap = 1.0 / (4.0 * d * d);
  const double m = beta.is_infinite() ? cap : std::min(beta.value() * beta.value(), cap);
  return 9.0 * static_cast<double>(graph.n_edges()) / 32.0 * m;
}

double laplace_tail_bound(double v, double t) {
  if (!(v > 0.0 && v <= 1.0)) throw invalid_parameter("laplace_tail_bound: v must lie in (0, 1]");
  if (!(t >= 0.0)) throw invalid_parameter("laplace_tail_bound: t must be >= 0");
  return 0.5 * v * std::exp(-t * (2.0 - v) / v);
}

double no_chaos_floor(double var_f, double v, double t) {
  if (!(var_f >= 0.0)) throw invalid_parameter("no_chaos_floor: var_f must be >= 0");
  if (!(v > 0.0 && v <= 1.0 + 1e-12)) throw invalid_parameter("no_chaos_floor: v must lie in (0, 1]");
  if (!(t >= 0.0)) throw invalid_parameter("no_chaos_floor: t must be >= 0");
  return 0.5 * var_f * std::exp(-t * (2.0 - v) / v);
}

VarianceReport variance_report(const ModelSpec& model, Beta beta, const VarianceOptions& var_options,
                               const ChaosOptions& chaos_options, const std::vector<double>& t_grid) {
  VarianceReport r;
  r.direct = variance_direct(model, beta, var_options);
  ChaosOptions copt = chaos_options;
  copt.observable = ChaosObservable::kernel;
  r.curve = chaos_curve(model, beta, t_grid, copt);
  r.integral = variance_from_chaos_integral(r.curve);
  if (model.is_ea()) r.lower_bound = ea_variance_lower_bound(model.graph(), beta);
  if (model.is_sk() && !beta.is_infinite()) r.upper_bound = superconcentration_bound(model.n_sites(), beta.value());
  return r;
}

namespace {

// margin(t_j) = mean(r_j) - (1/2) var(F) e^{-t(2-v)/v}, v = var(F) / mean(r_0),
// from running sums over the retained draws.
std::vector<double> no_chaos_margins(double n, double sf, double sff, double s0, const std::vector<double>& sr,
                                     const std::vector<double>& t_grid, double* var_out, double* v_out) {
  const double mean_f = sf / n;
  const double var = std::max(0.0, (sff - n * mean_f * mean_f) / (n - 1.0));
  const double rho00 = s0 / n;
  const double v = rho00 > 0.0 ? std::min(1.0, var / rho00) : 1.0;
  if (var_out) *var_out = var;
  if (v_out) *v_out = v;
  std::vector<double> out(t_grid.size());
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    const double floor = v > 0.0 ? no_chaos_floor(var, v, t_grid[j]) : 0.0;
    out[j] = sr[j] / n - floor;
  }
  return out;
}

}  // namespace

NoChaosReport no_chaos_experiment(const ModelSpec& model, Beta beta, const std::vector<double>& t_grid,
                                  std::size_t n_disorder, const SeedRecord& seed, int threads) {
  validate_time_grid(t_grid);
  if (n_disorder < 3) throw invalid_parameter("no_chaos_experiment: n_disorder must be >= 3");
  std::vector<double> f(n_disorder), r0(n_disorder);
  std::vector<std::vector<double>> r(n_disorder);
  parallel_for(n_disorder, threads, [&](std::size_t i) {
    const auto coupled = couple(model.coupling_count(), seed.child({i}), 0.0);
    const auto base = build_gibbs_table(model, coupled.base, beta);
    f[i] = free_energy(base);
    r0[i] = product_expect(model, ChaosObservable::kernel, 1, base, base);
    r[i].resize(t_grid.size());
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
      const auto other = build_gibbs_table(model, ou_mix(coupled.base, coupled.fresh_plus, t_grid[j]), beta);
      r[i][j] = product_expect(model, ChaosObservable::kernel, 1, base, other);
    }
  });
  const double n = static_cast<double>(n_disorder);
  double sf = 0.0, sff = 0.0, s0 = 0.0;
  std::vector<double> sr(t_grid.size(), 0.0);
  for (std::size_t i = 0; i < n_disorder; ++i) {
    sf += f[i];
    sff += f[i] * f[i];
    s0 += r0[i];
    for (std::size_t j = 0; j < t_grid.size(); ++j) sr[j] += r[i][j];
  }
  NoChaosReport report;
  report.var_f = variance_with_jackknife(f);
  report.rho00 = s0 / n;
  const auto full = no_chaos_margins(n, sf, sff, s0, sr, t_grid, nullptr, &report.v);
  // Delete-one jackknife of every margin.
  std::vector<std::vector<double>> loo(n_disorder);
  std::vector<double> sr_i(t_grid.size());
  for (std::size_t i = 0; i < n_disorder; ++i) {
    for (std::size_t j = 0; j < t_grid.size(); ++j) sr_i[j] = sr[j] - r[i][j];
    loo[i] = no_chaos_margins(n - 1.0, sf - f[i], sff - f[i] * f[i], s0 - r0[i], sr_i, t_grid, nullptr, nullptr);
  }
  report.pass = true;
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    double mean = 0.0;
    for (const auto& row : loo) mean += row[j];
    mean /= n;
    double ss = 0.0;
    for (const auto& row : loo) ss += (row[j] - mean) * (row[j] - mean);
    std::vector<double> column(n_disorder);
    for (std::size_t i = 0; i < n_disorder; ++i) column[i] = r[i][j];
    const auto est = mean_estimate(column);
    NoChaosPoint p;
    p.t = t_grid[j];
    p.rho = est.mean;
    p.rho_std_error = est.std_error;
    p.margin = full[j];
    p.floor = est.mean - full[j];
    p.margin_std_error = std::sqrt((n - 1.0) / n * ss);
    p.pass = p.margin >= -3.0 * p.margin_std_error;
    report.pass = report.pass && p.pass;
    report.points.push_back(p);
  }
  return report;
}

namespace {

double bond_overlap_of_pattern(const Graph& graph, std::uint64_t d) {
  double acc = 0.0;
  for (const auto& [a, b] : graph.edges()) acc += (((d >> a) ^ (d >> b)) & 1) ? -1.0 : 1.0;
  return acc / static_cast<double>(graph.n_edges());
}

}  // namespace

QuenchedReport quenched_chaos_statistic(const Graph& graph, Beta beta, double t, const QuenchedOptions& options) {
  if (!(t > 0.0)) throw invalid_parameter("quenched chaos statistic needs t > 0 (the bound diverges at t = 0)");
  if (options.n_disorder < 2) throw invalid_parameter("n_disorder must be >= 2");
  if (graph.n_edges() == 0) throw invalid_parameter("quenched chaos statistic needs at least one edge");
  const auto model = ModelSpec::edwards_anderson(graph);
  std::vector<double> stat(options.n_disorder), mean_q(options.n_disorder);
  parallel_for(options.n_disorder, options.threads, [&](std::size_t i) {
    const SeedRecord seed = options.seed.child({i});
    const auto coupled = couple(graph.n_edges(), seed, t);
    const auto plus = ou_perturb(coupled, Side::plus);
    const auto minus = ou_perturb(coupled, Side::minus);
    double q1 = 0.0, q2 = 0.0;
    if (options.engine == Engine::mc) {
      const auto cfg = default_chain_config(model.n_sites(), options.mc_sweeps, seed.child({3}));
      const auto pairs = sample_replica_pair(model, plus, minus, beta, cfg);
      for (const auto& p : pairs) {
        const double q = bond_overlap(graph, p.first, p.second).value;
        q1 += q;
        q2 += q * q;
      }
      const double m = static_cast<double>(pairs.size());
      q1 /= m;
      stat[i] = std::max(0.0, (q2 - m * q1 * q1) / (m - 1.0));
    } else {
      const auto law = disagreement_law(build_gibbs_table(model, plus, beta), build_gibbs_table(model, minus, beta));
      for (std::uint64_t d = 0; d < law.size(); ++d) {
        if (law[d] == 0.0) continue;
        const double q = bond_overlap_of_pattern(graph, d);
        q1 += law[d] * q;
        q2 += law[d] * q * q;
      }
      stat[i] = std::max(0.0, q2 - q1 * q1);
    }
    mean_q[i] = q1;
  });
  QuenchedReport report;
  report.statistic = mean_estimate(stat);
  report.mean_q = mean_estimate(mean_q);
  if (beta.is_infinite()) {
    report.bound = 0.0;
  } else if (beta.value() == 0.0) {
    report.bound = std::numeric_limits<double>::infinity();
  } else {
    report.bound = 2.0 / (beta.value() * std::exp(-t / 2.0) * std::sqrt(t * static_cast<double>(graph.n_edges())));
  }
  report.within = report.statistic.mean - 3.0 * report.statistic.std_error <= report.bound;
  return report;
}

nlohmann::json to_json(const VarianceEstimate& v) {
  return {{"mean", v.mean},     {"variance", v.variance}, {"stderr", v.std_error},
          {"ci_low", v.ci_low}, {"ci_high", v.ci_high},   {"n", v.n}};
}

nlohmann::json to_json(const VarianceReport& r) {
  nlohmann::json j{{"var_direct", to_json(r.direct)}, {"var_integral", to_json(r.integral)}, {"curve", to_json(r.curve)}};
  j["lower_bound"] = r.lower_bound ? nlohmann::json(*r.lower_bound) : nlohmann::json(nullptr);
  j["upper_bound"] = r.upper_bound ? nlohmann::json(*r.upper_bound) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const NoChaosReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points) {
    pts.push_back({{"t", p.t},
                   {"rho", p.rho},
                   {"rho_stderr", p.rho_std_error},
                   {"floor", p.floor},
                   {"margin", p.margin},
                   {"margin_stderr", p.margin_std_error},
                   {"pass", p.pass}});
  }
  return {{"var_f", to_json(r.var_f)}, {"rho00", r.rho00}, {"v", r.v}, {"points", pts}, {"pass", r.pass}};
}

nlohmann::json to_json(const QuenchedReport& r) {
  return {{"statistic", r.statistic.mean},
          {"statistic_stderr", r.statistic.std_error},
          {"mean_q", r.mean_q.mean},
          {"mean_q_stderr", r.mean_q.std_error},
          {"n_disorder", r.statistic.n},
          {"bound", std::isfinite(r.bound) ? nlohmann::json(r.bound) : nlohmann::json("inf")},
          {"within", r.within}};
}

}  // namespace chaoslab
