#include "chaoslab/discrete.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "chaoslab/disorder.hpp"
#include "chaoslab/errors.hpp"
#include "chaoslab/models.hpp"
#include "chaoslab/parallel.hpp"
#include "chaoslab/stats.hpp"

namespace chaoslab {

double gaussian_difference_gamma() { return 8.0 / std::sqrt(M_PI); }

double gaussian_difference_gamma_quadrature() {
  boost::math::quadrature::exp_sinh<double> integrator;
  // X - X' ~ N(0, 2).
  auto integrand = [](double d) {
    if (d > 80.0) return 0.0;
    return d * d * d * std::exp(-d * d / 4.0) / std::sqrt(4.0 * M_PI);
  };
  return 2.0 * integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity());
}

namespace {

double binomial(std::size_t n, std::size_t k) {
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

// f with x_j replaced by x'_j (variable n + j) for j in mask.
Polynomial replaced(const Polynomial& f, std::uint64_t mask) {
  const int n = f.n_vars();
  std::vector<int> map(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) map[static_cast<std::size_t>(j)] = ((mask >> j) & 1) ? n + j : j;
  return f.substitute(map, 2 * n);
}

std::vector<double> replaced_point(const std::vector<double>& x, const std::vector<double>& xp, std::uint64_t mask) {
  std::vector<double> out = x;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if ((mask >> j) & 1) out[j] = xp[j];
  }
  return out;
}

}  // namespace

TkSequence exact_tk(const Polynomial& f) {
  const int n = f.n_vars();
  if (n < 1) throw invalid_parameter("exact_tk: need at least one variable");
  if (n > kMaxExactTkVars) throw resource_error("exact_tk is capped at n = " + std::to_string(kMaxExactTkVars));
  const std::uint64_t full = std::uint64_t{1} << n;
  std::vector<Polynomial> fb;
  fb.reserve(full);
  for (std::uint64_t b = 0; b < full; ++b) fb.push_back(replaced(f, b));
  TkSequence out;
  out.exact = true;
  out.value.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    const Polynomial di = fb[0] - fb[bit];
    for (std::uint64_t a = 0; a < full; ++a) {
      if (a & bit) continue;
      const Polynomial dia = fb[a] - fb[a | bit];
      const auto k = static_cast<std::size_t>(std::popcount(a));
      out.value[k] += gaussian_expectation(di * dia) / binomial(static_cast<std::size_t>(n - 1), k);
    }
  }
  out.std_error.assign(out.value.size(), 0.0);
  out.diff_std_error.assign(out.value.size() - 1, 0.0);
  return out;
}

TkSequence mc_tk(const Polynomial& f, std::size_t samples, const SeedRecord& seed, int threads) {
  const int n = f.n_vars();
  if (n < 1 || n > 63) throw invalid_parameter("mc_tk: need 1 <= n <= 63 variables");
  if (samples < 2) throw invalid_parameter("mc_tk: need at least 2 samples");
  std::vector<std::vector<double>> rows(samples);
  parallel_for(samples, threads, [&](std::size_t s) {
    Rng rng(seed.child({s}));
    std::vector<double> x(static_cast<std::size_t>(n)), xp(static_cast<std::size_t>(n));
    for (auto& v : x) v = rng.gaussian();
    for (auto& v : xp) v = rng.gaussian();
    auto eval = [&](std::uint64_t mask) { return f.evaluate(replaced_point(x, xp, mask)); };
    std::vector<double> row(static_cast<std::size_t>(n), 0.0);
    const double f0 = eval(0);
    for (int i = 0; i < n; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      const double di = f0 - eval(bit);
      std::vector<int> others;
      for (int j = 0; j < n; ++j) {
        if (j != i) others.push_back(j);
      }
      for (std::size_t j = others.size(); j > 1; --j) std::swap(others[j - 1], others[rng.below(j)]);
      std::uint64_t a = 0;
      for (int k = 0; k < n; ++k) {
        row[static_cast<std::size_t>(k)] += di * (eval(a) - eval(a | bit));
        if (k < n - 1) a |= std::uint64_t{1} << others[static_cast<std::size_t>(k)];
      }
    }
    rows[s] = std::move(row);
  });
  TkSequence out;
  out.samples = samples;
  const auto nk = static_cast<std::size_t>(n);
  for (std::size_t k = 0; k < nk; ++k) {
    std::vector<double> col(samples);
    for (std::size_t s = 0; s < samples; ++s) col[s] = rows[s][k];
    const auto est = mean_estimate(col);
    out.value.push_back(est.mean);
    out.std_error.push_back(est.std_error);
    if (k + 1 < nk) {
      for (std::size_t s = 0; s < samples; ++s) col[s] = rows[s][k] - rows[s][k + 1];
      out.diff_std_error.push_back(mean_estimate(col).std_error);
    }
  }
  return out;
}

double disc1_variance(const TkSequence& tk) {
  if (tk.value.empty()) throw invalid_parameter("disc1_variance: empty sequence");
  return std::accumulate(tk.value.begin(), tk.value.end(), 0.0) / (2.0 * static_cast<double>(tk.value.size()));
}

DerivativeBounds derivative_bounds(const Polynomial& f) {
  DerivativeBounds out;
  const double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < f.n_vars(); ++i) {
    const auto d1 = f.derivative(i);
    const auto d2 = d1.derivative(i);
    if (d1.degree() > 0) {
      out.delta = inf;
    } else if (!d1.is_zero()) {
      out.delta = std::max(out.delta, std::abs(d1.terms().begin()->second));
    }
    if (d2.degree() > 0) {
      out.epsilon = inf;
    } else if (!d2.is_zero()) {
      out.epsilon = std::max(out.epsilon, std::abs(d2.terms().begin()->second));
    }
  }
  return out;
}

double discrete_rhs(std::size_t n, std::size_t k, double var_f, double delta, double epsilon, double gamma) {
  if (k > n) throw invalid_parameter("k must be <= n");
  double second = 0.0;
  if (delta != 0.0 && epsilon != 0.0 && gamma != 0.0) second = 1.5 * static_cast<double>(n) * delta * epsilon * gamma;
  return (static_cast<double>(n) + 1.0) / (static_cast<double>(k) + 1.0) * var_f + second;
}

namespace {

void finish(DiscretePerturbReport& r) {
  r.rhs = discrete_rhs(r.n, r.k, r.var_f, r.delta, r.epsilon, r.gamma);
  r.margin = r.rhs - r.lhs;
  r.within = r.lhs - 3.0 * r.lhs_std_error <= r.rhs;
}

// Average over all size-k subsets of E sum_i d_i f(x) d_i f(x^A); nullopt when too many subsets.
std::optional<double> exact_lhs(const Polynomial& f, std::size_t k) {
  const int n = f.n_vars();
  if (n > 20 || binomial(static_cast<std::size_t>(n), k) > 2000.0) return std::nullopt;
  std::vector<Polynomial> grad;
  for (int i = 0; i < n; ++i) grad.push_back(replaced(f.derivative(i), 0));
  double total = 0.0;
  std::size_t count = 0;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
    if (static_cast<std::size_t>(std::popcount(a)) != k) continue;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += gaussian_expectation(grad[static_cast<std::size_t>(i)] * replaced(f.derivative(i), a));
    total += s;
    ++count;
  }
  return total / static_cast<double>(count);
}

}  // namespace

DiscretePerturbReport discrete_perturb_polynomial(const Polynomial& f, std::size_t k, std::size_t n_samples,
                                                  const SeedRecord& seed, int threads, bool with_tk) {
  const auto n = static_cast<std::size_t>(f.n_vars());
  if (k > n) throw invalid_parameter("k must be <= n (got k = " + std::to_string(k) + ", n = " + std::to_string(n) + ")");
  if (n_samples < 2) throw invalid_parameter("n_samples must be >= 2");
  std::vector<Polynomial> grad;
  for (std::size_t i = 0; i < n; ++i) grad.push_back(f.derivative(static_cast<int>(i)));
  std::vector<double> values(n_samples);
  parallel_for(n_samples, threads, [&](std::size_t s) {
    const SeedRecord draw = seed.child({s});
    const auto x = fresh_disorder(n, draw.child({0}));
    const auto xp = fresh_disorder(n, draw.child({1}));
    const auto xa = resample_subset(x, xp, random_mask(n, k, draw.child({2})));
    double acc = 0.0;
    for (const auto& d : grad) acc += d.evaluate(x.view()) * d.evaluate(xa.view());
    values[s] = acc;
  });
  const auto est = mean_estimate(values);
  DiscretePerturbReport r;
  r.f_kind = "polynomial";
  r.n = n;
  r.k = k;
  r.lhs = est.mean;
  r.lhs_std_error = est.std_error;
  r.derivative_sum = est.mean;
  r.lhs_exact = exact_lhs(f, k);
  r.var_f = gaussian_variance_oracle(f);
  const auto bounds = derivative_bounds(f);
  r.delta = bounds.delta;
  r.epsilon = bounds.epsilon;
  r.gamma = gaussian_difference_gamma();
  if (with_tk) r.tk = static_cast<int>(n) <= kMaxExactTkVars ? exact_tk(f) : mc_tk(f, n_samples, seed.child({1u << 20}), threads);
  finish(r);
  return r;
}

DiscretePerturbReport discrete_perturb_sk(int n_sites, Beta beta, std::size_t k, std::size_t n_samples,
                                          const SeedRecord& seed, int threads) {
  const auto model = ModelSpec::sk(n_sites);
  const std::size_t n = model.coupling_count();
  if (k > n) throw invalid_parameter("k must be <= n = N^2 (got k = " + std::to_string(k) + ")");
  if (n_samples < 3) throw invalid_parameter("n_samples must be >= 3");
  if (beta.is_infinite() || beta.value() == 0.0) throw invalid_parameter("SK discrete experiment needs 0 < beta < inf");
  std::vector<double> r2(n_samples), f(n_samples);
  parallel_for(n_samples, threads, [&](std::size_t s) {
    const SeedRecord draw = seed.child({s});
    const auto g = fresh_disorder(n, draw.child({0}));
    const auto gp = fresh_disorder(n, draw.child({1}));
    const auto ga = resample_subset(g, gp, random_mask(n, k, draw.child({2})));
    const auto a = build_gibbs_table(model, g, beta);
    const auto b = build_gibbs_table(model, ga, beta);
    r2[s] = overlap_moment(a, b, 1);
    f[s] = free_energy(a) / std::sqrt(static_cast<double>(n_sites));
  });
  const auto est = mean_estimate(r2);
  const auto var = variance_with_jackknife(f);
  DiscretePerturbReport r;
  r.f_kind = "sk";
  r.n = n;
  r.k = k;
  r.lhs = est.mean;
  r.lhs_std_error = est.std_error;
  // d_ij f = <s_i s_j> / (N sqrt 2) under H = -X / sqrt(2N).
  r.derivative_sum = est.mean / 2.0;
  r.var_f = var.variance;
  r.var_std_error = var.std_error;
  r.delta = 1.0 / n_sites;
  r.epsilon = beta.value() / std::pow(n_sites, 1.5);
  r.gamma = gaussian_difference_gamma();
  finish(r);
  // The variance is itself estimated; allow for its error on the right-hand side too.
  const double slack = (static_cast<double>(n) + 1.0) / (static_cast<double>(k) + 1.0) * r.var_std_error;
  r.within = r.lhs - 3.0 * std::hypot(r.lhs_std_error, slack) <= r.rhs;
  return r;
}

nlohmann::json to_json(const TkSequence& tk) {
  return {{"value", tk.value},
          {"stderr", tk.std_error},
          {"diff_stderr", tk.diff_std_error},
          {"exact", tk.exact},
          {"samples", tk.samples}};
}

namespace {

nlohmann::json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

nlohmann::json to_json(const DiscretePerturbReport& r) {
  nlohmann::json j{{"f_kind", r.f_kind},
                   {"n", r.n},
                   {"k", r.k},
                   {"lhs", r.lhs},
                   {"lhs_stderr", r.lhs_std_error},
                   {"derivative_sum", r.derivative_sum},
                   {"var_f", r.var_f},
                   {"var_f_stderr", r.var_std_error},
                   {"delta", number_or_inf(r.delta)},
                   {"epsilon", number_or_inf(r.epsilon)},
                   {"gamma", r.gamma},
                   {"rhs", number_or_inf(r.rhs)},
                   {"margin", number_or_inf(r.margin)},
                   {"within", r.within}};
  j["lhs_exact"] = r.lhs_exact ? nlohmann::json(*r.lhs_exact) : nlohmann::json(nullptr);
  if (r.tk) j["tk"] = to_json(*r.tk);
  return j;
}

}  // namespace chaoslab
