#include "chaoslab/quadrature.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include <gsl/gsl_integration.h>

#include "chaoslab/errors.hpp"

namespace chaoslab {

QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw invalid_parameter("gauss_hermite: need at least one node");
  std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> ws(
      gsl_integration_fixed_alloc(gsl_integration_fixed_hermite, static_cast<std::size_t>(n), 0.0, 1.0, 0.0, 0.0),
      &gsl_integration_fixed_free);
  if (!ws) throw numeric_error("gauss_hermite: GSL allocation failed");
  const double* x = gsl_integration_fixed_nodes(ws.get());
  const double* w = gsl_integration_fixed_weights(ws.get());
  QuadratureRule rule;
  rule.nodes.assign(x, x + n);
  rule.weights.assign(w, w + n);
  return rule;
}

QuadratureRule standard_normal_rule(int n) {
  QuadratureRule rule = gauss_hermite(n);
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  for (double& x : rule.nodes) x *= std::numbers::sqrt2;
  for (double& w : rule.weights) w *= inv_sqrt_pi;
  return rule;
}

double gaussian_expect(const std::function<double(double)>& f, int n) {
  const auto rule = standard_normal_rule(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(rule.nodes[i]);
  return acc;
}

double gaussian_expect(const std::function<double(std::span<const double>)>& f, int dims, int n) {
  if (dims < 1) throw invalid_parameter("gaussian_expect: dims must be >= 1");
  const auto rule = standard_normal_rule(n);
  const std::size_t nodes = rule.nodes.size();
  std::vector<std::size_t> idx(static_cast<std::size_t>(dims), 0);
  std::vector<double> point(static_cast<std::size_t>(dims));
  double acc = 0.0;
  for (;;) {
    double w = 1.0;
    for (std::size_t d = 0; d < idx.size(); ++d) {
      point[d] = rule.nodes[idx[d]];
      w *= rule.weights[idx[d]];
    }
    acc += w * f(point);
    std::size_t d = 0;
    while (d < idx.size() && ++idx[d] == nodes) idx[d++] = 0;
    if (d == idx.size()) break;
  }
  return acc;
}

}  // namespace chaoslab
