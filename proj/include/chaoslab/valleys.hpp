#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "chaoslab/disorder.hpp"
#include "chaoslab/exact.hpp"
#include "chaoslab/models.hpp"
#include "chaoslab/spin.hpp"

namespace chaoslab {

struct ValleyParams {
  int r = 3;
  double epsilon = 0.2;  // on the rho / sigma^2 scale
  double delta = 0.3;    // relative to M
  double beta = 1.0;
  double t = 0.5;
};

void validate(const ValleyParams& p);

// beta = e^{sqrt(log N)}, r = floor((log N)^{1/8}), delta = (log N)^{-1/8},
// t = (log N)^{-1/3}, epsilon = e^{-(log N)^{1/8}}. r is raised to 2 when the
// formula gives less.
ValleyParams paper_schedule(int n);

struct ValleyReport {
  std::vector<SpinConfiguration> configs;
  double max_field = 0.0;  // M
  double sigma2 = 0.0;     // max Var(-H), the scale of rho
  // rho(sigma^a, sigma^b) / sigma^2; for SK this is R^2.
  std::vector<std::vector<double>> overlap_ratio;
  std::vector<double> field_ratio;  // X / M per config
  double epsilon = 0.0;
  double delta = 0.0;
  double energy_width = 1.0;        // 1 for the plain certificate, 5 for levels
  double alpha = 1.0;
  bool orthogonal = false;
  bool energetic = false;
  bool pass = false;
  ValleyParams params;
};

// Pure check of the certificate on externally supplied configurations:
// every off-diagonal rho <= epsilon sigma^2 and every X >= (1 - delta) M.
ValleyReport certify(const ModelSpec& model, const DisorderVector& g, const std::vector<SpinConfiguration>& configs,
                     double epsilon, double delta);

// r perturbed fields x^(k) = e^{-t} g + sqrt(1 - e^{-2t}) z^(k); one exact
// Gibbs draw at beta from each, certified against the exact M of g.
ValleyReport find_valleys(const ModelSpec& model, const DisorderVector& g, const ValleyParams& params,
                          const SeedRecord& seed, int threads = 1);

// Runs find_valleys on y = alpha g + sqrt(1 - alpha^2) g' and checks
// |X - alpha M| <= 5 delta |M| on the original field.
ValleyReport find_level_valleys(const ModelSpec& model, const DisorderVector& g, double alpha,
                                const ValleyParams& params, const SeedRecord& seed, int threads = 1);

nlohmann::json to_json(const ValleyParams& p);
ValleyParams valley_params_from_json(const nlohmann::json& j, const ValleyParams& defaults);
nlohmann::json to_json(const ValleyReport& r);

}  // namespace chaoslab
