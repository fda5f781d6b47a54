#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "json.hpp"

#include "chaoslab/rng.hpp"

namespace chaoslab {

// Times at or beyond this value are treated as infinite (e^{-50} < 2e-22).
inline constexpr double kInfiniteTime = 50.0;

// Flat array of Gaussian couplings together with the stream that made it.
struct DisorderVector {
  std::vector<double> values;
  SeedRecord seed;

  std::size_t size() const { return values.size(); }
  std::span<const double> view() const { return values; }
  double operator[](std::size_t i) const { return values[i]; }
};

// Base disorder g and two independent fresh copies g', g'' at time t.
struct CoupledDisorder {
  DisorderVector base;
  DisorderVector fresh_plus;
  DisorderVector fresh_minus;
  double t = 0.0;
};

enum class Side { plus, minus };

struct ResampleMask {
  std::vector<std::size_t> indices;  // sorted, distinct
  std::size_t n = 0;

  std::size_t k() const { return indices.size(); }
};

DisorderVector fresh_disorder(std::size_t n, const SeedRecord& seed);

// Wraps caller-supplied couplings (e.g. quadrature nodes) as a disorder vector.
DisorderVector make_disorder(std::vector<double> values, const SeedRecord& seed = {});

// g, g', g'' drawn from three independent children of `seed`.
CoupledDisorder couple(std::size_t n, const SeedRecord& seed, double t);

// e^{-t} g + sqrt(1 - e^{-2t}) fresh; t >= kInfiniteTime returns fresh exactly.
DisorderVector ou_mix(const DisorderVector& g, const DisorderVector& fresh, double t);

// g^{+t} (Side::plus, uses g') or g^{-t} (Side::minus, uses g'').
DisorderVector ou_perturb(const CoupledDisorder& coupled, Side side);

DisorderVector resample_subset(const DisorderVector& g, const DisorderVector& g_fresh, const ResampleMask& mask);

// Uniform random subset of size k of {0, ..., n-1}.
ResampleMask random_mask(std::size_t n, std::size_t k, const SeedRecord& seed);

nlohmann::json to_json(const DisorderVector& g);
DisorderVector disorder_from_json(const nlohmann::json& j);

// Binary layout: magic "CLDV", u32 version, u64 master, u64 stream, u64 n, n f64 (little endian host order).
void write_binary(std::ostream& out, const DisorderVector& g);
DisorderVector read_binary(std::istream& in);

}  // namespace chaoslab
