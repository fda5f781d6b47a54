#include "chaoslab/valleys.hpp"

#include <cmath>

#include "chaoslab/errors.hpp"
#include "chaoslab/parallel.hpp"

namespace chaoslab {

void validate(const ValleyParams& p) {
  if (p.r < 2) throw invalid_parameter("valleys: r must be >= 2");
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) throw invalid_parameter("valleys: epsilon must lie in (0, 1)");
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw invalid_parameter("valleys: delta must lie in (0, 1)");
  if (!(p.beta >= 0.0) || !std::isfinite(p.beta)) throw invalid_parameter("valleys: beta must be finite and >= 0");
  if (!(p.t >= 0.0)) throw invalid_parameter("valleys: t must be >= 0");
}

ValleyParams paper_schedule(int n) {
  if (n < 3) throw invalid_parameter("paper schedule needs N >= 3");
  const double l = std::log(static_cast<double>(n));
  ValleyParams p;
  p.beta = std::exp(std::sqrt(l));
  p.r = std::max(2, static_cast<int>(std::floor(std::pow(l, 0.125))));
  p.delta = std::pow(l, -0.125);
  p.t = std::pow(l, -1.0 / 3.0);
  p.epsilon = std::exp(-std::pow(l, 0.125));
  return p;
}

namespace {

ValleyReport certify_against(const ModelSpec& model, const std::vector<double>& field, double max_field,
                             const std::vector<SpinConfiguration>& configs, double epsilon, double delta,
                             double alpha, double width) {
  ValleyReport r;
  r.configs = configs;
  r.max_field = max_field;
  const auto probe = SpinConfiguration::from_index(0, model.n_sites());
  r.sigma2 = covariance_kernel(model, probe, probe);
  r.epsilon = epsilon;
  r.delta = delta;
  r.alpha = alpha;
  r.energy_width = width;
  const std::size_t m = configs.size();
  r.overlap_ratio.assign(m, std::vector<double>(m, 0.0));
  r.orthogonal = true;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      r.overlap_ratio[a][b] = covariance_kernel(model, configs[a], configs[b]) / r.sigma2;
      if (a != b && r.overlap_ratio[a][b] > epsilon) r.orthogonal = false;
    }
  }
  r.energetic = true;
  for (const auto& c : configs) {
    const double x = field[c.index()];
    r.field_ratio.push_back(max_field != 0.0 ? x / max_field : 0.0);
    const bool ok = width == 1.0 ? x >= (1.0 - delta) * max_field
                                 : std::abs(x - alpha * max_field) <= width * delta * std::abs(max_field);
    if (!ok) r.energetic = false;
  }
  r.pass = r.orthogonal && r.energetic;
  return r;
}

void check_configs(const ModelSpec& model, const std::vector<SpinConfiguration>& configs) {
  if (configs.empty()) throw invalid_parameter("certify: need at least one configuration");
  for (const auto& c : configs) {
    if (c.n_sites() != model.n_sites()) throw shape_error("certify: configuration size mismatch");
  }
}

std::vector<SpinConfiguration> sample_valleys(const ModelSpec& model, const DisorderVector& g,
                                              const ValleyParams& params, const SeedRecord& seed, int threads) {
  std::vector<SpinConfiguration> out(static_cast<std::size_t>(params.r), SpinConfiguration(model.n_sites()));
  parallel_for(out.size(), threads, [&](std::size_t k) {
    const SeedRecord s = seed.child({k});
    const auto z = fresh_disorder(g.size(), s.child({0}));
    const auto table = build_gibbs_table(model, ou_mix(g, z, params.t), Beta::finite(params.beta));
    Rng rng(s.child({1}));
    out[k] = SpinConfiguration::from_index(sample_state(table, rng.uniform()), model.n_sites());
  });
  return out;
}

}  // namespace

ValleyReport certify(const ModelSpec& model, const DisorderVector& g, const std::vector<SpinConfiguration>& configs,
                     double epsilon, double delta) {
  check_configs(model, configs);
  const auto field = enumerate_field(model, g);
  const double m = *std::max_element(field.begin(), field.end());
  auto r = certify_against(model, field, m, configs, epsilon, delta, 1.0, 1.0);
  r.params.r = static_cast<int>(configs.size());
  r.params.epsilon = epsilon;
  r.params.delta = delta;
  return r;
}

ValleyReport find_valleys(const ModelSpec& model, const DisorderVector& g, const ValleyParams& params,
                          const SeedRecord& seed, int threads) {
  validate(params);
  if (model.n_sites() > kMaxExactSites) throw resource_error("find_valleys needs exact M (N <= 24)");
  check_disorder(model, g);
  const auto configs = sample_valleys(model, g, params, seed, threads);
  const auto field = enumerate_field(model, g);
  const double m = *std::max_element(field.begin(), field.end());
  auto r = certify_against(model, field, m, configs, params.epsilon, params.delta, 1.0, 1.0);
  r.params = params;
  return r;
}

ValleyReport find_level_valleys(const ModelSpec& model, const DisorderVector& g, double alpha,
                                const ValleyParams& params, const SeedRecord& seed, int threads) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw invalid_parameter("level valleys: alpha must lie in (0, 1]");
  validate(params);
  if (model.n_sites() > kMaxExactSites) throw resource_error("find_level_valleys needs exact M (N <= 24)");
  check_disorder(model, g);
  const auto gp = fresh_disorder(g.size(), seed.child({1u << 20}));
  DisorderVector y = g;
  const double c = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
  for (std::size_t i = 0; i < y.values.size(); ++i) y.values[i] = alpha * g.values[i] + c * gp.values[i];
  const auto configs = sample_valleys(model, y, params, seed, threads);
  const auto field = enumerate_field(model, g);
  const double m = *std::max_element(field.begin(), field.end());
  auto r = certify_against(model, field, m, configs, params.epsilon, params.delta, alpha, 5.0);
  r.params = params;
  return r;
}

nlohmann::json to_json(const ValleyParams& p) {
  return {{"r", p.r}, {"epsilon", p.epsilon}, {"delta", p.delta}, {"beta", p.beta}, {"t", p.t}};
}

ValleyParams valley_params_from_json(const nlohmann::json& j, const ValleyParams& defaults) {
  ValleyParams p = defaults;
  if (j.contains("r")) p.r = j.at("r").get<int>();
  if (j.contains("epsilon")) p.epsilon = j.at("epsilon").get<double>();
  if (j.contains("delta")) p.delta = j.at("delta").get<double>();
  if (j.contains("beta")) p.beta = j.at("beta").get<double>();
  if (j.contains("t")) p.t = j.at("t").get<double>();
  validate(p);
  return p;
}

nlohmann::json to_json(const ValleyReport& r) {
  nlohmann::json configs = nlohmann::json::array();
  for (const auto& c : r.configs) configs.push_back(c.to_string());
  // Field-scale overlap: rho / sigma^2 is R^2 for SK, and R itself is also useful.
  nlohmann::json site = nlohmann::json::array();
  for (const auto& a : r.configs) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& b : r.configs) row.push_back(site_overlap(a, b).value);
    site.push_back(row);
  }
  return {{"configs", configs},
          {"M", r.max_field},
          {"sigma2", r.sigma2},
          {"rho_over_sigma2", r.overlap_ratio},
          {"site_overlap", site},
          {"X_over_M", r.field_ratio},
          {"epsilon", r.epsilon},
          {"delta", r.delta},
          {"alpha", r.alpha},
          {"energy_width", r.energy_width},
          {"orthogonal", r.orthogonal},
          {"energetic", r.energetic},
          {"pass", r.pass},
          {"params", to_json(r.params)}};
}

}  // namespace chaoslab
