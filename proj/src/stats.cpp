#include "chaoslab/stats.hpp"

#include <cmath>
#include <limits>
#include <algorithm>

#include "chaoslab/errors.hpp"

namespace chaoslab {

Estimate mean_estimate(std::span<const double> samples) {
  Estimate out;
  out.n = samples.size();
  if (samples.empty()) throw invalid_parameter("mean_estimate: no samples");
  double sum = 0.0;
  for (double x : samples) sum += x;
  out.mean = sum / static_cast<double>(out.n);
  if (out.n < 2) return out;
  double ss = 0.0;
  for (double x : samples) ss += (x - out.mean) * (x - out.mean);
  out.std_error = std::sqrt(ss / static_cast<double>(out.n - 1) / static_cast<double>(out.n));
  return out;
}

VarianceEstimate variance_with_jackknife(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 3) throw invalid_parameter("variance_with_jackknife: need at least 3 samples");
  VarianceEstimate out;
  out.n = n;
  double sum = 0.0;
  for (double x : samples) sum += x;
  out.mean = sum / static_cast<double>(n);
  // Centered sums keep the leave-one-out updates well conditioned.
  double s1 = 0.0;
  double s2 = 0.0;
  for (double x : samples) {
    const double c = x - out.mean;
    s1 += c;
    s2 += c * c;
  }
  const double dn = static_cast<double>(n);
  out.variance = (s2 - s1 * s1 / dn) / (dn - 1.0);
  std::vector<double> loo(n);
  double loo_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = samples[i] - out.mean;
    const double t1 = s1 - c;
    const double t2 = s2 - c * c;
    loo[i] = (t2 - t1 * t1 / (dn - 1.0)) / (dn - 2.0);
    loo_mean += loo[i];
  }
  loo_mean /= dn;
  double jk = 0.0;
  for (double v : loo) jk += (v - loo_mean) * (v - loo_mean);
  out.std_error = std::sqrt(jk * (dn - 1.0) / dn);
  out.ci_low = out.variance - 1.959963984540054 * out.std_error;
  out.ci_high = out.variance + 1.959963984540054 * out.std_error;
  return out;
}

double integrated_autocorrelation_time(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 4) return 1.0;
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);
  auto autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) acc += (series[i] - mean) * (series[i + lag] - mean);
    return acc / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (c0 <= 0.0) return 1.0;
  // Pairs Gamma_m = gamma(2m) + gamma(2m+1) are positive and decreasing for a
  // reversible chain; stop at the first nonpositive pair.
  double tau = -1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    double pair = (autocov(2 * m) + autocov(2 * m + 1)) / c0;
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    tau += 2.0 * pair;
    prev_pair = pair;
  }
  return std::max(tau, 1.0);
}

Estimate chain_mean(std::span<const double> series) {
  Estimate out = mean_estimate(series);
  out.std_error *= std::sqrt(integrated_autocorrelation_time(series));
  return out;
}

std::vector<std::vector<double>> mean_covariance(const std::vector<std::vector<double>>& rows) {
  if (rows.size() < 2) throw invalid_parameter("mean_covariance: need at least 2 rows");
  const std::size_t m = rows.front().size();
  const double n = static_cast<double>(rows.size());
  std::vector<double> mean(m, 0.0);
  for (const auto& r : rows) {
    if (r.size() != m) throw shape_error("mean_covariance: ragged rows");
    for (std::size_t j = 0; j < m; ++j) mean[j] += r[j];
  }
  for (double& x : mean) x /= n;
  std::vector<std::vector<double>> cov(m, std::vector<double>(m, 0.0));
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < m; ++i) {
      const double di = r[i] - mean[i];
      for (std::size_t j = i; j < m; ++j) cov[i][j] += di * (r[j] - mean[j]);
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      cov[i][j] /= (n - 1.0) * n;
      cov[j][i] = cov[i][j];
    }
  }
  return cov;
}

}  // namespace chaoslab
