#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "chaoslab/exact.hpp"
#include "chaoslab/polynomial.hpp"
#include "chaoslab/rng.hpp"

namespace chaoslab {

// Exact T_k expands f over all 2^n replacement sets.
inline constexpr int kMaxExactTkVars = 8;

// gamma = E|X - X'|^3 for independent standard Gaussians, 8 / sqrt(pi).
double gaussian_difference_gamma();
// The same constant by adaptive quadrature of 2 int_0^inf d^3 phi_{N(0,2)}(d) dd.
double gaussian_difference_gamma_quadrature();

struct TkSequence {
  std::vector<double> value;      // T_0 .. T_{n-1}
  std::vector<double> std_error;  // zero when exact
  // Standard error of T_k - T_{k+1} (paired samples), size n - 1.
  std::vector<double> diff_std_error;
  bool exact = false;
  std::size_t samples = 0;
};

// T_k = sum_i C(n-1,k)^{-1} sum_{|A|=k, i not in A} E(Delta_i f Delta_i f^A),
// Delta_i f^A = f^A - f^{A + i}, by exact Gaussian moments.
TkSequence exact_tk(const Polynomial& f);

// Monte Carlo T_k with nested random sets (prefixes of one permutation per i),
// so the whole sequence is estimated from the same draws.
TkSequence mc_tk(const Polynomial& f, std::size_t samples, const SeedRecord& seed, int threads = 1);

// (1/2n) sum_k T_k.
double disc1_variance(const TkSequence& tk);

// sup |d_i f| and sup |d_i^2 f| over R^n; infinite unless the derivative is constant.
struct DerivativeBounds {
  double delta = 0.0;
  double epsilon = 0.0;
};
DerivativeBounds derivative_bounds(const Polynomial& f);

struct DiscretePerturbReport {
  std::string f_kind;  // "polynomial" or "sk"
  std::size_t n = 0;
  std::size_t k = 0;
  double lhs = 0.0;  // measured left-hand side (E<R^2> for the SK specialization)
  double lhs_std_error = 0.0;
  std::optional<double> lhs_exact;
  double derivative_sum = 0.0;  // E sum_i d_i f(x) d_i f(x^A)
  double var_f = 0.0;
  double var_std_error = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;
  double gamma = 0.0;
  double rhs = 0.0;  // (n+1)/(k+1) var f + 3 n delta epsilon gamma / 2
  double margin = 0.0;
  bool within = false;  // lhs - 3 stderr <= rhs
  std::optional<TkSequence> tk;
};

// rhs of the inequality; a zero epsilon removes the second term even if delta is infinite.
double discrete_rhs(std::size_t n, std::size_t k, double var_f, double delta, double epsilon, double gamma);

DiscretePerturbReport discrete_perturb_polynomial(const Polynomial& f, std::size_t k, std::size_t n_samples,
                                                  const SeedRecord& seed, int threads = 1, bool with_tk = false);

// f = N^{-1/2} F_N over the N^2 SK couplings, k of them resampled.
// lhs is E<R^2> between the original and perturbed Gibbs measures, with
// delta = 1/N, epsilon = beta / N^{3/2}.
DiscretePerturbReport discrete_perturb_sk(int n_sites, Beta beta, std::size_t k, std::size_t n_samples,
                                          const SeedRecord& seed, int threads = 1);

nlohmann::json to_json(const TkSequence& tk);
nlohmann::json to_json(const DiscretePerturbReport& r);

}  // namespace chaoslab
