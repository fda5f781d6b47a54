#pragma once

#include <functional>
#include <span>
#include <vector>

namespace chaoslab {

inline constexpr int kDefaultHermiteNodes = 64;

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Hermite rule for the weight e^{-x^2} (physicists' convention).
QuadratureRule gauss_hermite(int n);

// The same rule rescaled so that sum w_i f(x_i) ~ E f(Z), Z ~ N(0, 1).
QuadratureRule standard_normal_rule(int n = kDefaultHermiteNodes);

double gaussian_expect(const std::function<double(double)>& f, int n = kDefaultHermiteNodes);

// Tensor-product rule over `dims` independent standard Gaussians.
double gaussian_expect(const std::function<double(std::span<const double>)>& f, int dims,
                       int n = kDefaultHermiteNodes);

}  // namespace chaoslab
