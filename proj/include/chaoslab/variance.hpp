#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "json.hpp"

#include "chaoslab/chaos.hpp"
#include "chaoslab/exact.hpp"
#include "chaoslab/graph.hpp"
#include "chaoslab/models.hpp"
#include "chaoslab/stats.hpp"

namespace chaoslab {

struct VarianceOptions {
  std::size_t n_disorder = 1000;
  Engine engine = Engine::exact;  // exact or quadrature
  SeedRecord seed;
  int threads = 1;
  int quadrature_nodes = 64;
  // Overrides the i.i.d. Gaussian draw for disorder index i when set.
  std::function<DisorderVector(std::size_t)> disorder_source;
};

// F for each disorder draw (exact state sums).
std::vector<double> free_energy_samples(const ModelSpec& model, Beta beta, const VarianceOptions& options);

// Var F with a jackknife interval (exact engine) or by tensor Gauss-Hermite
// quadrature over at most 3 couplings (quadrature engine, zero stderr).
VarianceEstimate variance_direct(const ModelSpec& model, Beta beta, const VarianceOptions& options);

// C N log(2 + C beta) / log N.
double superconcentration_bound(double n, double beta, double c = 1.0);

// 9|E|/32 min(beta^2, 1/(4 d^2)) with d the maximum degree.
double ea_variance_lower_bound(const Graph& graph, Beta beta);

// (v/2) e^{-t(2-v)/v} for v in (0, 1], t >= 0.
double laplace_tail_bound(double v, double t);

// (1/2) var_f e^{-t(2-v)/v}.
double no_chaos_floor(double var_f, double v, double t);

struct VarianceReport {
  VarianceEstimate direct;
  IntegralEstimate integral;
  ChaosCurve curve;
  std::optional<double> lower_bound;  // E-A only
  std::optional<double> upper_bound;  // SK only, with C = 1
};

VarianceReport variance_report(const ModelSpec& model, Beta beta, const VarianceOptions& var_options,
                               const ChaosOptions& chaos_options, const std::vector<double>& t_grid);

struct NoChaosPoint {
  double t = 0.0;
  double rho = 0.0;        // E<rho>_{0,t}
  double rho_std_error = 0.0;
  double floor = 0.0;
  double margin = 0.0;     // rho - floor
  double margin_std_error = 0.0;  // jackknife over disorder draws
  bool pass = false;       // margin >= -3 margin_std_error
};

struct NoChaosReport {
  VarianceEstimate var_f;
  double rho00 = 0.0;
  double v = 0.0;
  std::vector<NoChaosPoint> points;
  bool pass = false;
};

// Measures Var F, E<rho>_{0,0} and E<rho>_{0,t} on the same disorder draws and
// compares the curve with the floor at every grid time.
NoChaosReport no_chaos_experiment(const ModelSpec& model, Beta beta, const std::vector<double>& t_grid,
                                  std::size_t n_disorder, const SeedRecord& seed, int threads = 1);

struct QuenchedOptions {
  std::size_t n_disorder = 1000;
  Engine engine = Engine::exact;  // exact or mc
  SeedRecord seed;
  int threads = 1;
  std::size_t mc_sweeps = 4000;
};

struct QuenchedReport {
  Estimate statistic;  // E<(Q - <Q>)^2> under G(g^t) x G(g^{-t})
  Estimate mean_q;     // E<Q>
  double bound = 0.0;  // 2 / (beta e^{-t/2} sqrt(t |E|))
  bool within = false; // statistic - 3 stderr <= bound
};

QuenchedReport quenched_chaos_statistic(const Graph& graph, Beta beta, double t, const QuenchedOptions& options);

nlohmann::json to_json(const VarianceEstimate& v);
nlohmann::json to_json(const VarianceReport& r);
nlohmann::json to_json(const NoChaosReport& r);
nlohmann::json to_json(const QuenchedReport& r);

}  // namespace chaoslab
