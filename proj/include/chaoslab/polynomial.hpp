#pragma once

#include <map>
#include <span>
#include <vector>

#include "json.hpp"

#include "chaoslab/rng.hpp"

namespace chaoslab {

// Sparse real polynomial in n variables. Zero coefficients are never stored.
class Polynomial {
 public:
  using Exponent = std::vector<int>;

  explicit Polynomial(int n_vars);
  static Polynomial constant(int n_vars, double c);
  static Polynomial variable(int n_vars, int i);

  int n_vars() const { return n_; }
  const std::map<Exponent, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;

  // Adds c * prod x_i^{e_i}; exponents must be nonnegative and sized n_vars.
  void add_term(const Exponent& e, double c);

  double evaluate(std::span<const double> x) const;
  Polynomial derivative(int i) const;

  // Re-indexes variable i as var_map[i] in a polynomial over new_n variables.
  Polynomial substitute(const std::vector<int>& var_map, int new_n) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

 private:
  int n_;
  std::map<Exponent, double> terms_;
};

// E g^m for g ~ N(0, 1): 0 for odd m, (m - 1)!! for even m.
double gaussian_moment(int m);

// E f(g) for g a vector of i.i.d. standard Gaussians, from exact moments.
double gaussian_expectation(const Polynomial& f);

struct HermiteVariance {
  double variance = 0.0;
  // by_order[k] = (1/k!) sum over ordered k-tuples of (E d^k f)^2; by_order[0] = 0.
  std::vector<double> by_order;
};

// Var f as the terminating series sum_k (1/k!) sum_{i_1..i_k} (E d_{i_1}..d_{i_k} f)^2.
HermiteVariance hermite_variance(const Polynomial& f);

// E f^2 - (E f)^2 from Gaussian moments of the expanded square.
double gaussian_variance_oracle(const Polynomial& f);

struct VarianceLowerBound {
  double coordinatewise = 0.0;  // (1/2) sum_i (E g_i d_i f)^2
  double aggregate = 0.0;       // (1/(2n)) (E g . grad f)^2
};

VarianceLowerBound variance_lower_bound_general(const Polynomial& f);

// Random polynomial with up to n_terms monomials of total degree <= max_degree
// and standard Gaussian coefficients.
Polynomial random_polynomial(int n_vars, int max_degree, int n_terms, Rng& rng);

// {"n": n, "terms": [{"exponent": [...], "coeff": c}, ...]}
nlohmann::json to_json(const Polynomial& f);
Polynomial polynomial_from_json(const nlohmann::json& j);

}  // namespace chaoslab
