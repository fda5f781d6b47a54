#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "chaoslab/exact.hpp"
#include "chaoslab/models.hpp"
#include "chaoslab/rng.hpp"
#include "chaoslab/spin.hpp"

namespace chaoslab {

// What is averaged over the pair (sigma^1, sigma^2):
//   overlap_power  R^{2k}
//   kernel         rho = Cov(-H(sigma^1), -H(sigma^2))
//   bond_overlap   Q (E-A only)
//   identity       1{sigma^1 = sigma^2}
enum class ChaosObservable { overlap_power, kernel, bond_overlap, identity };

// exact: state sums exact, Monte Carlo over disorder.
// mc: MCMC over states as well.
// quadrature: Gauss-Hermite over the disorder itself; single-coupling models only.
enum class Engine { exact, mc, quadrature };

std::string to_string(ChaosObservable o);
std::string to_string(Engine e);
ChaosObservable parse_observable(const std::string& s);
Engine parse_engine(const std::string& s);

// Largest value the observable can take for the model.
double observable_max(const ModelSpec& model, ChaosObservable obs, int k);

// Observable evaluated on one pair of configurations.
double pair_observable(const ModelSpec& model, ChaosObservable obs, int k, const SpinConfiguration& a,
                       const SpinConfiguration& b);

// Product-measure average <obs>_{a x b}, exact in the state sums.
double product_expect(const ModelSpec& model, ChaosObservable obs, int k, const GibbsTable& a, const GibbsTable& b);

struct ChaosOptions {
  ChaosObservable observable = ChaosObservable::overlap_power;
  int k = 1;
  std::size_t n_disorder = 100;
  Engine engine = Engine::exact;
  SeedRecord seed;
  int threads = 1;
  std::size_t mc_sweeps = 4000;  // per chain, mc engine only
  int quadrature_nodes = kDefaultQuadratureNodes;

  static constexpr int kDefaultQuadratureNodes = 64;
};

struct ChaosCurve {
  ChaosObservable observable = ChaosObservable::overlap_power;
  int k = 1;
  Engine engine = Engine::exact;
  Beta beta = Beta::finite(0.0);
  std::string model;
  std::vector<double> t_grid;
  std::vector<double> phi_hat;
  std::vector<double> std_error;
  // Covariance of the estimates across grid points (common random numbers).
  std::vector<std::vector<double>> covariance;
  std::size_t n_disorder = 0;
  SeedRecord seed;
  double max_value = 0.0;
};

void validate_time_grid(const std::vector<double>& t_grid);

// phi(t) = E<obs>_{0,t} between the Gibbs measures of g and g^t. Each disorder
// draw uses the same (g, g') at every grid point.
ChaosCurve chaos_curve(const ModelSpec& model, Beta beta, const std::vector<double>& t_grid,
                       const ChaosOptions& options);

// t = 0 followed by points - 1 geometrically spaced times from 1e-3 to t_max.
std::vector<double> default_time_grid(double t_max = 10.0, std::size_t points = 40);

struct MonotonicityViolation {
  std::string kind;  // "monotone" or "interpolation"
  double t = 0.0;
  double s = 0.0;
  double value = 0.0;  // phi(t) (or phi(s) for "monotone")
  double bound = 0.0;
  double sigma = 0.0;  // propagated standard error of value - bound
};

struct MonotonicityReport {
  std::size_t pairs_checked = 0;
  std::size_t triples_checked = 0;
  std::vector<MonotonicityViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks phi nonincreasing and phi(t) <= phi(0)^{1-t/s} phi(s)^{t/s} for all
// grid pairs 0 < t < s, each up to `sigmas` propagated standard errors.
MonotonicityReport check_complete_monotonicity(const ChaosCurve& curve, double sigmas = 3.0);

enum class TailPolicy { add_half, exclude };

struct IntegralEstimate {
  double estimate = 0.0;
  double std_error = 0.0;   // sampling error of the grid estimates
  double tail_bound = 0.0;  // e^{-T} phi(T) >= integral over [T, inf)
  double uncertainty = 0.0; // std_error + tail contribution
  double t_max = 0.0;
  TailPolicy policy = TailPolicy::add_half;
};

// int_0^inf e^{-t} phi(t) dt by the trapezoid rule in u = e^{-t} on the grid,
// with the tail over [T, inf) bounded through monotonicity of phi.
IntegralEstimate variance_from_chaos_integral(const ChaosCurve& curve, TailPolicy policy = TailPolicy::add_half);

// sum_h C(N,h) 2^{-N} phi(rho_h) e^{2 beta^2 e^{-s} rho_h} with phi(x) = (x / rho_diag)^k.
// Needs rho to depend on the Hamming distance only and be nonnegative.
double interpolation_upper_bound(const ModelSpec& model, Beta beta, double s, int k);

// phi(0)^{1 - t/s} RHS(s)^{t/s}; with several s the smallest bound is kept.
struct InterpolationBound {
  double bound = 0.0;
  double best_s = 0.0;
};
InterpolationBound chaos_from_interpolation(const ModelSpec& model, Beta beta, double t, const std::vector<double>& s_values,
                                            int k, double phi0);

// E<1{sigma^1 = sigma^2}>_{0,t} for the REM.
ChaosCurve rem_overlap_curve(int n, Beta beta, const std::vector<double>& t_grid, std::size_t n_disorder,
                             const SeedRecord& seed, int threads = 1);

nlohmann::json to_json(const ChaosCurve& curve);
nlohmann::json to_json(const MonotonicityReport& report);
nlohmann::json to_json(const IntegralEstimate& est);
// Columns t, estimate, stderr, then one column per extra bound series.
void write_curve_csv(std::ostream& out, const ChaosCurve& curve,
                     const std::vector<std::pair<std::string, std::vector<double>>>& extra = {});

}  // namespace chaoslab
