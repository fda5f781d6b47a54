#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chaoslab {

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

// Sample mean with the i.i.d. standard error s / sqrt(n).
Estimate mean_estimate(std::span<const double> samples);

// Sample variance with a delete-one jackknife standard error and a
// normal-approximation 95% interval.
struct VarianceEstimate {
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
};

VarianceEstimate variance_with_jackknife(std::span<const double> samples);

// Integrated autocorrelation time tau = 1 + 2 sum rho_k, truncated by Geyer's
// initial positive sequence rule. Returns 1 for fewer than 4 samples.
double integrated_autocorrelation_time(std::span<const double> series);

// Mean of a correlated series with std_error sqrt(tau var / n).
Estimate chain_mean(std::span<const double> series);

// Covariance matrix of the column means of a samples x columns table
// (rows are i.i.d. draws, columns may be correlated).
std::vector<std::vector<double>> mean_covariance(const std::vector<std::vector<double>>& rows);

}  // namespace chaoslab
