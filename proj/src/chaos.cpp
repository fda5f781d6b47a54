#include "chaoslab/chaos.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <ostream>

#include "chaoslab/errors.hpp"
#include "chaoslab/parallel.hpp"
#include "chaoslab/quadrature.hpp"
#include "chaoslab/sampler.hpp"
#include "chaoslab/stats.hpp"

namespace chaoslab {

std::string to_string(ChaosObservable o) {
  switch (o) {
    case ChaosObservable::overlap_power: return "overlap_power";
    case ChaosObservable::kernel: return "rho";
    case ChaosObservable::bond_overlap: return "bond_overlap";
    case ChaosObservable::identity: return "identity";
  }
  return "?";
}

std::string to_string(Engine e) {
  switch (e) {
    case Engine::exact: return "exact";
    case Engine::mc: return "mc";
    case Engine::quadrature: return "quadrature";
  }
  return "?";
}

ChaosObservable parse_observable(const std::string& s) {
  if (s == "overlap_power" || s == "R2k") return ChaosObservable::overlap_power;
  if (s == "rho" || s == "kernel") return ChaosObservable::kernel;
  if (s == "bond_overlap" || s == "Q") return ChaosObservable::bond_overlap;
  if (s == "identity") return ChaosObservable::identity;
  throw invalid_parameter("unknown observable '" + s + "'");
}

Engine parse_engine(const std::string& s) {
  if (s == "exact") return Engine::exact;
  if (s == "mc") return Engine::mc;
  if (s == "quadrature") return Engine::quadrature;
  throw invalid_parameter("unknown engine '" + s + "'");
}

namespace {

void check_observable(const ModelSpec& model, ChaosObservable obs, int k) {
  if (k < 0) throw invalid_parameter("moment order k must be >= 0");
  if (obs == ChaosObservable::bond_overlap && !model.is_ea()) {
    throw invalid_parameter("bond overlap is defined for Edwards-Anderson models only");
  }
}

// Value of the observable as a function of the disagreement pattern d.
double pattern_observable(const ModelSpec& model, ChaosObservable obs, int k, std::uint64_t d) {
  const int n = model.n_sites();
  switch (obs) {
    case ChaosObservable::overlap_power: {
      const double r = static_cast<double>(n - 2 * std::popcount(d)) / n;
      return std::pow(r * r, k);
    }
    case ChaosObservable::identity:
      return d == 0 ? 1.0 : 0.0;
    case ChaosObservable::bond_overlap:
    case ChaosObservable::kernel: {
      if (model.is_ea()) {
        const auto& edges = model.graph().edges();
        double acc = 0.0;
        for (const auto& [a, b] : edges) acc += (((d >> a) ^ (d >> b)) & 1) ? -1.0 : 1.0;
        return obs == ChaosObservable::kernel ? acc : acc / static_cast<double>(edges.size());
      }
      if (model.is_rem()) return d == 0 ? static_cast<double>(n) : 0.0;
      const double r = static_cast<double>(n - 2 * std::popcount(d)) / n;
      return n * model.xi(r);
    }
  }
  return 0.0;
}

}  // namespace

double observable_max(const ModelSpec& model, ChaosObservable obs, int k) {
  (void)k;
  if (obs == ChaosObservable::kernel) return pattern_observable(model, obs, 1, 0);
  return 1.0;
}

double pair_observable(const ModelSpec& model, ChaosObservable obs, int k, const SpinConfiguration& a,
                       const SpinConfiguration& b) {
  check_observable(model, obs, k);
  if (a.n_sites() != model.n_sites() || b.n_sites() != model.n_sites()) {
    throw shape_error("pair_observable: configuration size mismatch");
  }
  switch (obs) {
    case ChaosObservable::overlap_power:
      return std::pow(site_overlap(a, b).value, 2 * k);
    case ChaosObservable::identity:
      return hamming_distance(a, b) == 0 ? 1.0 : 0.0;
    case ChaosObservable::bond_overlap:
      return bond_overlap(model.graph(), a, b).value;
    case ChaosObservable::kernel:
      return covariance_kernel(model, a, b);
  }
  return 0.0;
}

double product_expect(const ModelSpec& model, ChaosObservable obs, int k, const GibbsTable& a, const GibbsTable& b) {
  check_observable(model, obs, k);
  if (obs == ChaosObservable::identity) {
    double acc = 0.0;
    for (std::size_t s = 0; s < a.size(); ++s) acc += a.weights[s] * b.weights[s];
    return acc;
  }
  if (obs == ChaosObservable::overlap_power) return overlap_moment(a, b, k);
  const auto law = disagreement_law(a, b);
  double acc = 0.0;
  for (std::uint64_t d = 0; d < law.size(); ++d) {
    if (law[d] != 0.0) acc += law[d] * pattern_observable(model, obs, k, d);
  }
  return acc;
}

void validate_time_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw invalid_parameter("t_grid must be nonempty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!std::isfinite(t_grid[i]) || t_grid[i] < 0.0) throw invalid_parameter("t_grid entries must be finite and >= 0");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw invalid_parameter("t_grid must be strictly increasing");
  }
}

std::vector<double> default_time_grid(double t_max, std::size_t points) {
  if (points < 2 || !(t_max > 1e-3)) throw invalid_parameter("default_time_grid: need >= 2 points and t_max > 1e-3");
  std::vector<double> grid{0.0};
  const double lo = std::log(1e-3);
  const double hi = std::log(t_max);
  for (std::size_t i = 0; i + 1 < points; ++i) {
    const double f = points == 2 ? 1.0 : static_cast<double>(i) / static_cast<double>(points - 2);
    grid.push_back(std::exp(lo + f * (hi - lo)));
  }
  grid.back() = t_max;
  return grid;
}

namespace {

std::vector<double> exact_row(const ModelSpec& model, Beta beta, const std::vector<double>& t_grid,
                              const ChaosOptions& opt, std::size_t draw) {
  const auto coupled = couple(model.coupling_count(), opt.seed.child({draw}), 0.0);
  const auto base = build_gibbs_table(model, coupled.base, beta);
  std::vector<double> row(t_grid.size());
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    const auto other = build_gibbs_table(model, ou_mix(coupled.base, coupled.fresh_plus, t_grid[j]), beta);
    row[j] = product_expect(model, opt.observable, opt.k, base, other);
  }
  return row;
}

std::vector<double> mc_row(const ModelSpec& model, Beta beta, const std::vector<double>& t_grid,
                           const ChaosOptions& opt, std::size_t draw) {
  const SeedRecord seed = opt.seed.child({draw});
  const auto coupled = couple(model.coupling_count(), seed, 0.0);
  std::vector<double> row(t_grid.size());
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    const auto other = ou_mix(coupled.base, coupled.fresh_plus, t_grid[j]);
    const auto cfg = default_chain_config(model.n_sites(), opt.mc_sweeps, seed.child({3, j}));
    double acc = 0.0;
    std::size_t count = 0;
    for (const auto& pair : sample_replica_pair(model, coupled.base, other, beta, cfg)) {
      acc += pair_observable(model, opt.observable, opt.k, pair.first, pair.second);
      ++count;
    }
    row[j] = acc / static_cast<double>(count);
  }
  return row;
}

ChaosCurve quadrature_curve(const ModelSpec& model, Beta beta, const std::vector<double>& t_grid,
                            const ChaosOptions& opt) {
  if (model.coupling_count() != 1) {
    throw unsupported_error("quadrature engine needs a single-coupling model (2-D rule)");
  }
  const auto rule = standard_normal_rule(opt.quadrature_nodes);
  const std::size_t m = rule.nodes.size();
  std::vector<GibbsTable> base;
  base.reserve(m);
  for (double x : rule.nodes) base.push_back(build_gibbs_table(model, make_disorder({x}), beta));
  ChaosCurve curve;
  curve.phi_hat.assign(t_grid.size(), 0.0);
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    const double a = std::exp(-t_grid[j]);
    const double b = t_grid[j] >= kInfiniteTime ? 1.0 : std::sqrt(-std::expm1(-2.0 * t_grid[j]));
    double acc = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = 0; q < m; ++q) {
        const double y = t_grid[j] >= kInfiniteTime ? rule.nodes[q] : a * rule.nodes[p] + b * rule.nodes[q];
        const auto other = build_gibbs_table(model, make_disorder({y}), beta);
        acc += rule.weights[p] * rule.weights[q] * product_expect(model, opt.observable, opt.k, base[p], other);
      }
    }
    curve.phi_hat[j] = acc;
  }
  curve.std_error.assign(t_grid.size(), 0.0);
  curve.covariance.assign(t_grid.size(), std::vector<double>(t_grid.size(), 0.0));
  return curve;
}

}  // namespace

ChaosCurve chaos_curve(const ModelSpec& model, Beta beta, const std::vector<double>& t_grid,
                       const ChaosOptions& options) {
  validate_time_grid(t_grid);
  check_observable(model, options.observable, options.k);
  ChaosCurve curve;
  if (options.engine == Engine::quadrature) {
    curve = quadrature_curve(model, beta, t_grid, options);
  } else {
    if (options.n_disorder < 2) throw invalid_parameter("n_disorder must be >= 2");
    if (options.engine == Engine::exact && model.n_sites() > kMaxExactSites) {
      throw resource_error("exact engine is capped at N = " + std::to_string(kMaxExactSites));
    }
    std::vector<std::vector<double>> rows(options.n_disorder);
    parallel_for(options.n_disorder, options.threads, [&](std::size_t i) {
      rows[i] = options.engine == Engine::exact ? exact_row(model, beta, t_grid, options, i)
                                                : mc_row(model, beta, t_grid, options, i);
    });
    curve.covariance = mean_covariance(rows);
    curve.phi_hat.assign(t_grid.size(), 0.0);
    curve.std_error.assign(t_grid.size(), 0.0);
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
      std::vector<double> column(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) column[i] = rows[i][j];
      const auto est = mean_estimate(column);
      curve.phi_hat[j] = est.mean;
      curve.std_error[j] = est.std_error;
    }
    curve.n_disorder = options.n_disorder;
  }
  curve.observable = options.observable;
  curve.k = options.k;
  curve.engine = options.engine;
  curve.beta = beta;
  curve.model = model.name();
  curve.t_grid = t_grid;
  curve.seed = options.seed;
  curve.max_value = observable_max(model, options.observable, options.k);
  return curve;
}

MonotonicityReport check_complete_monotonicity(const ChaosCurve& curve, double sigmas) {
  const auto& t = curve.t_grid;
  const auto& phi = curve.phi_hat;
  const std::size_t n = t.size();
  if (phi.size() != n) throw shape_error("check_complete_monotonicity: curve size mismatch");
  auto cov = [&](std::size_t i, std::size_t j) {
    if (!curve.covariance.empty()) return curve.covariance[i][j];
    if (i == j && !curve.std_error.empty()) return curve.std_error[i] * curve.std_error[i];
    return 0.0;
  };
  // Absolute slack for floating-point noise in exact curves.
  const double slack = 1e-12 * std::max(1.0, curve.max_value);
  MonotonicityReport report;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      ++report.pairs_checked;
      const double diff = phi[j] - phi[i];
      const double sigma = std::sqrt(std::max(0.0, cov(i, i) + cov(j, j) - 2.0 * cov(i, j)));
      if (diff > sigmas * sigma + slack) report.violations.push_back({"monotone", t[i], t[j], phi[j], phi[i], sigma});
    }
  }
  if (n == 0 || t[0] != 0.0) return report;
  const double p0 = phi[0];
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      ++report.triples_checked;
      const double a = t[i] / t[j];
      const double ps = phi[j];
      double bound = 0.0;
      std::array<double, 3> grad{0.0, 1.0, 0.0};  // d/d(phi0, phi_t, phi_s) of phi_t - bound
      if (p0 > 0.0 && ps > 0.0) {
        bound = std::pow(p0, 1.0 - a) * std::pow(ps, a);
        grad[0] = -(1.0 - a) * bound / p0;
        grad[2] = -a * bound / ps;
      }
      const std::array<std::size_t, 3> idx{0, i, j};
      double var = 0.0;
      for (int x = 0; x < 3; ++x) {
        for (int y = 0; y < 3; ++y) var += grad[x] * grad[y] * cov(idx[x], idx[y]);
      }
      const double sigma = std::sqrt(std::max(0.0, var));
      if (phi[i] - bound > sigmas * sigma + slack) {
        report.violations.push_back({"interpolation", t[i], t[j], phi[i], bound, sigma});
      }
    }
  }
  return report;
}

IntegralEstimate variance_from_chaos_integral(const ChaosCurve& curve, TailPolicy policy) {
  const auto& t = curve.t_grid;
  validate_time_grid(t);
  if (t.front() != 0.0) throw invalid_parameter("chaos integral needs a grid starting at t = 0");
  if (curve.observable != ChaosObservable::kernel) {
    throw invalid_parameter("chaos integral needs a curve of E<rho>, not " + to_string(curve.observable));
  }
  const std::size_t n = t.size();
  // Trapezoid weights in u = e^{-t}.
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = std::exp(-t[i]) - std::exp(-t[i + 1]);
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  IntegralEstimate out;
  out.policy = policy;
  out.t_max = t.back();
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.estimate += w[i] * curve.phi_hat[i];
    if (!curve.covariance.empty()) {
      for (std::size_t j = 0; j < n; ++j) var += w[i] * w[j] * curve.covariance[i][j];
    }
  }
  out.std_error = std::sqrt(std::max(0.0, var));
  out.tail_bound = std::exp(-t.back()) * std::max(0.0, curve.phi_hat.back());
  if (policy == TailPolicy::add_half) {
    out.estimate += 0.5 * out.tail_bound;
    out.uncertainty = out.std_error + 0.5 * out.tail_bound;
  } else {
    out.uncertainty = out.std_error + out.tail_bound;
  }
  return out;
}

namespace {

double log_binomial(int n, int h) { return std::lgamma(n + 1.0) - std::lgamma(h + 1.0) - std::lgamma(n - h + 1.0); }

// rho as a function of the Hamming distance, for models where that is enough.
double rho_at_distance(const ModelSpec& model, int h) {
  const int n = model.n_sites();
  if (model.is_rem()) return h == 0 ? static_cast<double>(n) : 0.0;
  if (model.is_ea()) throw unsupported_error("interpolation bound: E-A kernel is not a function of Hamming distance");
  const double r = static_cast<double>(n - 2 * h) / n;
  return n * model.xi(r);
}

}  // namespace

double interpolation_upper_bound(const ModelSpec& model, Beta beta, double s, int k) {
  if (!(s >= 0.0)) throw invalid_parameter("interpolation bound: s must be >= 0");
  if (k < 0) throw invalid_parameter("interpolation bound: k must be >= 0");
  if (beta.is_infinite()) throw unsupported_error("interpolation bound needs finite beta");
  const int n = model.n_sites();
  const double diag = rho_at_distance(model, 0);
  const double b = beta.value();
  const double rate = 2.0 * b * b * (s >= kInfiniteTime ? 0.0 : std::exp(-s));
  std::vector<double> logs;
  for (int h = 0; h <= n; ++h) {
    const double rho = rho_at_distance(model, h);
    if (rho < -1e-12 * diag) throw invalid_parameter("interpolation bound requires rho >= 0");
    const double phi = std::pow(std::max(rho, 0.0) / diag, k);
    if (phi == 0.0) continue;
    logs.push_back(log_binomial(n, h) - n * std::log(2.0) + std::log(phi) + rate * rho);
  }
  if (logs.empty()) return 0.0;
  const double mx = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - mx);
  const double out = std::exp(mx + std::log(sum));
  if (!std::isfinite(out)) throw numeric_error("interpolation bound overflowed");
  return out;
}

InterpolationBound chaos_from_interpolation(const ModelSpec& model, Beta beta, double t, const std::vector<double>& s_values,
                                            int k, double phi0) {
  if (!(t >= 0.0)) throw invalid_parameter("chaos_from_interpolation: t must be >= 0");
  if (s_values.empty()) throw invalid_parameter("chaos_from_interpolation: need at least one s");
  InterpolationBound best{std::numeric_limits<double>::infinity(), 0.0};
  for (double s : s_values) {
    if (s < t) throw invalid_parameter("chaos_from_interpolation: every s must be >= t");
    double bound;
    if (t == 0.0) {
      bound = phi0;
    } else {
      const double a = t / s;
      bound = std::pow(phi0, 1.0 - a) * std::pow(interpolation_upper_bound(model, beta, s, k), a);
    }
    if (bound < best.bound) best = {bound, s};
  }
  return best;
}

ChaosCurve rem_overlap_curve(int n, Beta beta, const std::vector<double>& t_grid, std::size_t n_disorder,
                             const SeedRecord& seed, int threads) {
  ChaosOptions opt;
  opt.observable = ChaosObservable::identity;
  opt.n_disorder = n_disorder;
  opt.seed = seed;
  opt.threads = threads;
  return chaos_curve(ModelSpec::rem(n), beta, t_grid, opt);
}

nlohmann::json to_json(const ChaosCurve& curve) {
  return {{"observable", to_string(curve.observable)},
          {"k", curve.k},
          {"engine", to_string(curve.engine)},
          {"beta", to_json(curve.beta)},
          {"model", curve.model},
          {"t_grid", curve.t_grid},
          {"phi_hat", curve.phi_hat},
          {"stderr", curve.std_error},
          {"n_disorder", curve.n_disorder},
          {"seed", {{"master", curve.seed.master}, {"stream", curve.seed.stream}}},
          {"max_value", curve.max_value}};
}

nlohmann::json to_json(const MonotonicityReport& report) {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& x : report.violations) {
    v.push_back({{"kind", x.kind}, {"t", x.t}, {"s", x.s}, {"value", x.value}, {"bound", x.bound}, {"sigma", x.sigma}});
  }
  return {{"pairs_checked", report.pairs_checked},
          {"triples_checked", report.triples_checked},
          {"violations", v},
          {"ok", report.ok()}};
}

nlohmann::json to_json(const IntegralEstimate& est) {
  return {{"estimate", est.estimate},
          {"stderr", est.std_error},
          {"tail_bound", est.tail_bound},
          {"uncertainty", est.uncertainty},
          {"t_max", est.t_max},
          {"tail_policy", est.policy == TailPolicy::add_half ? "add_half" : "exclude"}};
}

void write_curve_csv(std::ostream& out, const ChaosCurve& curve,
                     const std::vector<std::pair<std::string, std::vector<double>>>& extra) {
  out << "t,estimate,stderr";
  for (const auto& [name, values] : extra) {
    if (values.size() != curve.t_grid.size()) throw shape_error("write_curve_csv: column '" + name + "' size mismatch");
    out << ',' << name;
  }
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
    out << curve.t_grid[i] << ',' << curve.phi_hat[i] << ',' << curve.std_error[i];
    for (const auto& col : extra) out << ',' << col.second[i];
    out << '\n';
  }
}

}  // namespace chaoslab
