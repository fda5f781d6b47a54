#include "chaoslab/polynomial.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "chaoslab/errors.hpp"

namespace chaoslab {

namespace {

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw numeric_error(std::string(what) + ": non-finite result");
  return v;
}

}  // namespace

Polynomial::Polynomial(int n_vars) : n_(n_vars) {
  if (n_vars < 0) throw invalid_parameter("Polynomial: negative variable count");
}

Polynomial Polynomial::constant(int n_vars, double c) {
  Polynomial p(n_vars);
  p.add_term(Exponent(static_cast<std::size_t>(n_vars), 0), c);
  return p;
}

Polynomial Polynomial::variable(int n_vars, int i) {
  if (i < 0 || i >= n_vars) throw invalid_parameter("Polynomial::variable: index out of range");
  Polynomial p(n_vars);
  Exponent e(static_cast<std::size_t>(n_vars), 0);
  e[static_cast<std::size_t>(i)] = 1;
  p.add_term(e, 1.0);
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
  return d;
}

void Polynomial::add_term(const Exponent& e, double c) {
  if (static_cast<int>(e.size()) != n_) throw shape_error("Polynomial::add_term: exponent size mismatch");
  for (int x : e) {
    if (x < 0) throw invalid_parameter("Polynomial::add_term: negative exponent");
  }
  if (c == 0.0) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw shape_error("Polynomial::evaluate: size mismatch");
  double total = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (int p = 0; p < e[i]; ++p) m *= x[i];
    }
    total += m;
  }
  return total;
}

Polynomial Polynomial::derivative(int i) const {
  if (i < 0 || i >= n_) throw invalid_parameter("Polynomial::derivative: index out of range");
  Polynomial out(n_);
  const auto k = static_cast<std::size_t>(i);
  for (const auto& [e, c] : terms_) {
    if (e[k] == 0) continue;
    Exponent d = e;
    d[k] -= 1;
    out.add_term(d, c * e[k]);
  }
  return out;
}

Polynomial Polynomial::substitute(const std::vector<int>& var_map, int new_n) const {
  if (static_cast<int>(var_map.size()) != n_) throw shape_error("Polynomial::substitute: map size mismatch");
  Polynomial out(new_n);
  for (const auto& [e, c] : terms_) {
    Exponent d(static_cast<std::size_t>(new_n), 0);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      const int target = var_map[i];
      if (target < 0 || target >= new_n) throw invalid_parameter("Polynomial::substitute: target out of range");
      d[static_cast<std::size_t>(target)] += e[i];
    }
    out.add_term(d, c);
  }
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.n_ != n_) throw shape_error("Polynomial: variable count mismatch");
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  if (other.n_ != n_) throw shape_error("Polynomial: variable count mismatch");
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.n_ != b.n_) throw shape_error("Polynomial: variable count mismatch");
  Polynomial out(a.n_);
  Polynomial::Exponent e(static_cast<std::size_t>(a.n_));
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

double gaussian_moment(int m) {
  if (m < 0) throw invalid_parameter("gaussian_moment: negative order");
  if (m % 2 == 1) return 0.0;
  double r = 1.0;
  for (int j = m - 1; j > 1; j -= 2) r *= j;
  return r;
}

double gaussian_expectation(const Polynomial& f) {
  double total = 0.0;
  for (const auto& [e, c] : f.terms()) {
    double m = c;
    for (int x : e) {
      m *= gaussian_moment(x);
      if (m == 0.0) break;
    }
    total += m;
  }
  return checked(total, "gaussian_expectation");
}

namespace {

void hermite_recurse(const Polynomial& p, int order, double inv_factorial, std::vector<double>& by_order) {
  for (int i = 0; i < p.n_vars(); ++i) {
    const Polynomial d = p.derivative(i);
    if (d.is_zero()) continue;
    const double mean = gaussian_expectation(d);
    by_order[static_cast<std::size_t>(order)] += inv_factorial * mean * mean;
    hermite_recurse(d, order + 1, inv_factorial / (order + 1), by_order);
  }
}

}  // namespace

HermiteVariance hermite_variance(const Polynomial& f) {
  HermiteVariance out;
  out.by_order.assign(static_cast<std::size_t>(f.degree()) + 1, 0.0);
  hermite_recurse(f, 1, 1.0, out.by_order);
  for (double v : out.by_order) out.variance += v;
  checked(out.variance, "hermite_variance");
  return out;
}

double gaussian_variance_oracle(const Polynomial& f) {
  const double mean = gaussian_expectation(f);
  return checked(gaussian_expectation(f * f) - mean * mean, "gaussian_variance_oracle");
}

VarianceLowerBound variance_lower_bound_general(const Polynomial& f) {
  VarianceLowerBound out;
  const int n = f.n_vars();
  if (n == 0) return out;
  double aggregate = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = gaussian_expectation(Polynomial::variable(n, i) * f.derivative(i));
    out.coordinatewise += 0.5 * e * e;
    aggregate += e;
  }
  out.aggregate = aggregate * aggregate / (2.0 * n);
  return out;
}

Polynomial random_polynomial(int n_vars, int max_degree, int n_terms, Rng& rng) {
  if (n_vars < 1 || max_degree < 0 || n_terms < 1) throw invalid_parameter("random_polynomial: bad shape");
  Polynomial p(n_vars);
  for (int t = 0; t < n_terms; ++t) {
    const int deg = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_degree) + 1));
    Polynomial::Exponent e(static_cast<std::size_t>(n_vars), 0);
    for (int d = 0; d < deg; ++d) e[rng.below(static_cast<std::uint64_t>(n_vars))] += 1;
    p.add_term(e, rng.gaussian());
  }
  return p;
}

nlohmann::json to_json(const Polynomial& f) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [e, c] : f.terms()) terms.push_back({{"exponent", e}, {"coeff", c}});
  return {{"n", f.n_vars()}, {"terms", terms}};
}

Polynomial polynomial_from_json(const nlohmann::json& j) {
  if (!j.contains("n")) throw invalid_parameter("polynomial: missing field 'n'");
  if (!j.contains("terms")) throw invalid_parameter("polynomial: missing field 'terms'");
  Polynomial p(j.at("n").get<int>());
  for (const auto& t : j.at("terms")) p.add_term(t.at("exponent").get<Polynomial::Exponent>(), t.at("coeff").get<double>());
  return p;
}

}  // namespace chaoslab
