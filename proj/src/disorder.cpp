#include "chaoslab/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "chaoslab/errors.hpp"

namespace chaoslab {

DisorderVector fresh_disorder(std::size_t n, const SeedRecord& seed) {
  if (n == 0) throw invalid_parameter("fresh_disorder: coupling count must be >= 1");
  Rng rng(seed);
  DisorderVector g;
  g.seed = seed;
  g.values.resize(n);
  for (double& v : g.values) v = rng.gaussian();
  return g;
}

DisorderVector make_disorder(std::vector<double> values, const SeedRecord& seed) {
  for (double v : values) {
    if (!std::isfinite(v)) throw numeric_error("make_disorder: non-finite coupling");
  }
  return DisorderVector{std::move(values), seed};
}

CoupledDisorder couple(std::size_t n, const SeedRecord& seed, double t) {
  if (!(t >= 0.0)) throw invalid_parameter("couple: time must be nonnegative");
  return CoupledDisorder{fresh_disorder(n, seed.child({0})), fresh_disorder(n, seed.child({1})),
                         fresh_disorder(n, seed.child({2})), t};
}

DisorderVector ou_mix(const DisorderVector& g, const DisorderVector& fresh, double t) {
  if (!(t >= 0.0)) throw invalid_parameter("ou_mix: time must be nonnegative");
  if (g.size() != fresh.size()) throw shape_error("ou_mix: length mismatch");
  if (t == 0.0) return g;
  if (t >= kInfiniteTime) return fresh;
  const double a = std::exp(-t);
  const double b = std::sqrt(-std::expm1(-2.0 * t));
  DisorderVector out;
  out.seed = g.seed;
  out.values.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = a * g.values[i] + b * fresh.values[i];
  return out;
}

DisorderVector ou_perturb(const CoupledDisorder& coupled, Side side) {
  return ou_mix(coupled.base, side == Side::plus ? coupled.fresh_plus : coupled.fresh_minus, coupled.t);
}

DisorderVector resample_subset(const DisorderVector& g, const DisorderVector& g_fresh, const ResampleMask& mask) {
  if (g.size() != g_fresh.size()) throw shape_error("resample_subset: length mismatch");
  if (mask.n != g.size()) throw shape_error("resample_subset: mask built for a different length");
  DisorderVector out = g;
  for (std::size_t i : mask.indices) {
    if (i >= g.size()) throw shape_error("resample_subset: mask index out of range");
    out.values[i] = g_fresh.values[i];
  }
  return out;
}

ResampleMask random_mask(std::size_t n, std::size_t k, const SeedRecord& seed) {
  if (k > n) throw invalid_parameter("random_mask: k exceeds n");
  Rng rng(seed);
  // Partial Fisher-Yates: the first k slots form a uniform k-subset.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(perm[i], perm[j]);
  }
  ResampleMask mask;
  mask.n = n;
  mask.indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(mask.indices.begin(), mask.indices.end());
  return mask;
}

nlohmann::json to_json(const DisorderVector& g) {
  return nlohmann::json{{"n", g.size()},
                        {"seed", {{"master", g.seed.master}, {"stream", g.seed.stream}}},
                        {"gaussian_method", std::string(kGaussianMethod)},
                        {"values", g.values}};
}

DisorderVector disorder_from_json(const nlohmann::json& j) {
  DisorderVector g;
  g.values = j.at("values").get<std::vector<double>>();
  if (j.contains("seed")) {
    g.seed.master = j.at("seed").at("master").get<std::uint64_t>();
    g.seed.stream = j.at("seed").at("stream").get<std::uint64_t>();
  }
  if (j.contains("n") && j.at("n").get<std::size_t>() != g.values.size()) {
    throw shape_error("disorder_from_json: declared n does not match values");
  }
  return make_disorder(std::move(g.values), g.seed);
}

namespace {

constexpr char kMagic[4] = {'C', 'L', 'D', 'V'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw shape_error("read_binary: truncated stream");
  return v;
}

}  // namespace

void write_binary(std::ostream& out, const DisorderVector& g) {
  out.write(kMagic, 4);
  put(out, kVersion);
  put(out, g.seed.master);
  put(out, g.seed.stream);
  put(out, static_cast<std::uint64_t>(g.size()));
  out.write(reinterpret_cast<const char*>(g.values.data()), static_cast<std::streamsize>(g.size() * sizeof(double)));
}

DisorderVector read_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw shape_error("read_binary: bad magic");
  if (get<std::uint32_t>(in) != kVersion) throw shape_error("read_binary: unsupported version");
  SeedRecord seed;
  seed.master = get<std::uint64_t>(in);
  seed.stream = get<std::uint64_t>(in);
  const auto n = get<std::uint64_t>(in);
  std::vector<double> values(n);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw shape_error("read_binary: truncated payload");
  return make_disorder(std::move(values), seed);
}

}  // namespace chaoslab
