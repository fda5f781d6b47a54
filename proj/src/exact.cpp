#include "chaoslab/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "chaoslab/errors.hpp"
#include "chaoslab/parallel.hpp"

namespace chaoslab {

Beta Beta::finite(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) throw invalid_parameter("beta must be finite and >= 0");
  return Beta(value, false);
}

double Beta::value() const {
  if (infinite_) throw unsupported_error("beta is infinite");
  return value_;
}

nlohmann::json to_json(const Beta& beta) {
  if (beta.is_infinite()) return "inf";
  return beta.value();
}

Beta beta_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return Beta::infinity();
    throw invalid_parameter("beta string must be \"inf\"");
  }
  return Beta::finite(j.get<double>());
}

namespace {

constexpr int kChunkBits = 12;

void check_exact_size(int n) {
  if (n > kMaxExactSites) {
    throw resource_error("exact enumeration is capped at N = " + std::to_string(kMaxExactSites) + " (got " +
                         std::to_string(n) + ")");
  }
}

void sweep_chunk(const MultilinearForm& form, std::uint64_t lo, std::uint64_t hi, std::vector<double>& out) {
  std::uint64_t state = lo ^ (lo >> 1);
  std::vector<double> term_value(form.terms.size());
  double h = form.constant;
  for (std::size_t t = 0; t < form.terms.size(); ++t) {
    const auto& term = form.terms[t];
    const bool negative = std::popcount(~state & term.mask) & 1;
    term_value[t] = negative ? -term.coeff : term.coeff;
    h += term_value[t];
  }
  out[state] = h;
  for (std::uint64_t i = lo + 1; i < hi; ++i) {
    const int k = std::countr_zero(i);
    double delta = 0.0;
    for (int t : form.terms_of_site[static_cast<std::size_t>(k)]) {
      delta -= 2.0 * term_value[static_cast<std::size_t>(t)];
      term_value[static_cast<std::size_t>(t)] = -term_value[static_cast<std::size_t>(t)];
    }
    h += delta;
    state ^= std::uint64_t{1} << k;
    out[state] = h;
  }
}

}  // namespace

std::vector<double> enumerate_energies(const ModelSpec& model, const DisorderVector& g,
                                       const EnumerationOptions& options) {
  const int n = model.n_sites();
  check_exact_size(n);
  check_disorder(model, g);
  const std::uint64_t states = std::uint64_t{1} << n;
  std::vector<double> energies(states);
  if (model.is_rem()) {
    const double scale = -std::sqrt(static_cast<double>(n));
    for (std::uint64_t s = 0; s < states; ++s) energies[s] = scale * g.values[s];
  } else {
    const MultilinearForm form = hamiltonian_terms(model, g);
    const std::uint64_t chunk = std::min<std::uint64_t>(states, std::uint64_t{1} << kChunkBits);
    const std::uint64_t n_chunks = states / chunk;
    parallel_for(n_chunks, options.threads,
                 [&](std::size_t c) { sweep_chunk(form, c * chunk, (c + 1) * chunk, energies); });
  }
  for (double e : energies) {
    if (!std::isfinite(e)) throw numeric_error("non-finite energy in enumeration");
  }
  return energies;
}

GibbsTable gibbs_table_from_energies(std::vector<double> energies, int n_sites, Beta beta) {
  check_exact_size(n_sites);
  if (energies.size() != (std::size_t{1} << n_sites)) throw shape_error("energy table size is not 2^N");
  GibbsTable table;
  table.n_sites = n_sites;
  table.beta = beta;
  table.energies = std::move(energies);
  const auto& e = table.energies;
  table.min_energy = *std::min_element(e.begin(), e.end());
  double scale = 1.0;
  for (double v : e) scale = std::max(scale, std::abs(v));
  const double tie = kTieTolerance * scale;
  table.ground_count = static_cast<std::size_t>(
      std::count_if(e.begin(), e.end(), [&](double v) { return v <= table.min_energy + tie; }));

  table.log_weights.resize(e.size());
  table.weights.resize(e.size());
  if (beta.is_infinite()) {
    const double lw = -std::log(static_cast<double>(table.ground_count));
    const double w = 1.0 / static_cast<double>(table.ground_count);
    for (std::size_t s = 0; s < e.size(); ++s) {
      const bool ground = e[s] <= table.min_energy + tie;
      table.log_weights[s] = ground ? lw : -std::numeric_limits<double>::infinity();
      table.weights[s] = ground ? w : 0.0;
    }
    table.log_z = std::numeric_limits<double>::quiet_NaN();
    return table;
  }
  const double b = beta.value();
  // Max-shifted log-sum-exp of -beta H.
  double sum = 0.0;
  for (std::size_t s = 0; s < e.size(); ++s) sum += std::exp(-b * (e[s] - table.min_energy));
  table.log_z = -b * table.min_energy + std::log(sum);
  if (!std::isfinite(table.log_z)) throw numeric_error("non-finite log partition function");
  for (std::size_t s = 0; s < e.size(); ++s) {
    table.log_weights[s] = -b * e[s] - table.log_z;
    table.weights[s] = std::exp(table.log_weights[s]);
  }
  return table;
}

GibbsTable build_gibbs_table(const ModelSpec& model, const DisorderVector& g, Beta beta,
                             const EnumerationOptions& options) {
  return gibbs_table_from_energies(enumerate_energies(model, g, options), model.n_sites(), beta);
}

double free_energy(const GibbsTable& table) {
  if (table.beta.is_infinite()) return -table.min_energy;
  const double b = table.beta.value();
  if (b == 0.0) throw numeric_error("free energy (1/beta) log Z diverges at beta = 0");
  return table.log_z / b;
}

double gibbs_expect(const GibbsTable& table, const std::function<double(std::uint64_t)>& observable) {
  double acc = 0.0;
  for (std::uint64_t s = 0; s < table.size(); ++s) {
    if (table.weights[s] != 0.0) acc += table.weights[s] * observable(s);
  }
  return acc;
}

namespace {

void check_pair(const GibbsTable& a, const GibbsTable& b) {
  if (a.n_sites != b.n_sites) throw shape_error("two-replica average needs tables of equal N");
}

}  // namespace

double two_replica_expect(const GibbsTable& a, const GibbsTable& b,
                          const std::function<double(std::uint64_t, std::uint64_t)>& observable) {
  check_pair(a, b);
  if (a.n_sites > kMaxPairSites) {
    throw resource_error("generic two-replica average is capped at N = " + std::to_string(kMaxPairSites));
  }
  double acc = 0.0;
  for (std::uint64_t x = 0; x < a.size(); ++x) {
    if (a.weights[x] == 0.0) continue;
    double inner = 0.0;
    for (std::uint64_t y = 0; y < b.size(); ++y) {
      if (b.weights[y] != 0.0) inner += b.weights[y] * observable(x, y);
    }
    acc += a.weights[x] * inner;
  }
  return acc;
}

void walsh_hadamard(std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n == 0 || (n & (n - 1)) != 0) throw shape_error("walsh_hadamard: size must be a power of two");
  for (std::size_t len = 1; len < n; len <<= 1) {
    for (std::size_t i = 0; i < n; i += len << 1) {
      for (std::size_t j = i; j < i + len; ++j) {
        const double u = v[j];
        const double w = v[j + len];
        v[j] = u + w;
        v[j + len] = u - w;
      }
    }
  }
}

std::vector<double> disagreement_law(const GibbsTable& a, const GibbsTable& b) {
  check_pair(a, b);
  std::vector<double> fa = a.weights;
  walsh_hadamard(fa);
  if (&a == &b) {
    for (double& x : fa) x *= x;
  } else {
    std::vector<double> fb = b.weights;
    walsh_hadamard(fb);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  }
  walsh_hadamard(fa);
  const double inv = 1.0 / static_cast<double>(fa.size());
  for (double& x : fa) x = std::max(0.0, x * inv);
  return fa;
}

double disagreement_expect(const std::vector<double>& law, const std::function<double(std::uint64_t)>& observable) {
  double acc = 0.0;
  for (std::uint64_t d = 0; d < law.size(); ++d) {
    if (law[d] != 0.0) acc += law[d] * observable(d);
  }
  return acc;
}

std::vector<double> hamming_law(const GibbsTable& a, const GibbsTable& b) {
  const auto law = disagreement_law(a, b);
  std::vector<double> out(static_cast<std::size_t>(a.n_sites) + 1, 0.0);
  for (std::uint64_t d = 0; d < law.size(); ++d) out[static_cast<std::size_t>(std::popcount(d))] += law[d];
  return out;
}

double overlap_moment(const GibbsTable& a, const GibbsTable& b, int k) {
  if (k < 0) throw invalid_parameter("overlap_moment: k must be >= 0");
  const auto law = hamming_law(a, b);
  const double n = a.n_sites;
  double acc = 0.0;
  for (std::size_t h = 0; h < law.size(); ++h) {
    const double r = (n - 2.0 * static_cast<double>(h)) / n;
    acc += law[h] * std::pow(r * r, k);
  }
  return acc;
}

std::vector<double> enumerate_field(const ModelSpec& model, const DisorderVector& g, const EnumerationOptions& options) {
  auto values = enumerate_energies(model, g, options);
  const double inv = -1.0 / field_scale(model);
  for (double& v : values) v *= inv;
  return values;
}

FieldSummary field_summary(const ModelSpec& model, const DisorderVector& g, const EnumerationOptions& options) {
  const auto field = enumerate_field(model, g, options);
  const int n = model.n_sites();
  FieldSummary out;
  out.max_field = *std::max_element(field.begin(), field.end());
  double scale = 1.0;
  for (double v : field) scale = std::max(scale, std::abs(v));
  for (std::uint64_t s = 0; s < field.size(); ++s) {
    if (field[s] >= out.max_field - kTieTolerance * scale) out.argmax.push_back(SpinConfiguration::from_index(s, n));
  }
  // Every model here has constant per-state variance; evaluate it at one state.
  const auto probe = SpinConfiguration::from_index(0, n);
  out.sigma2_gibbs = covariance_kernel(model, probe, probe);
  out.sigma2 = field_covariance(model, probe, probe);
  return out;
}

std::vector<SpinConfiguration> ground_states(const ModelSpec& model, const DisorderVector& g,
                                             const EnumerationOptions& options) {
  const auto table = build_gibbs_table(model, g, Beta::infinity(), options);
  std::vector<SpinConfiguration> out;
  out.reserve(table.ground_count);
  for (std::uint64_t s = 0; s < table.size(); ++s) {
    if (table.weights[s] > 0.0) out.push_back(SpinConfiguration::from_index(s, table.n_sites));
  }
  return out;
}

std::uint64_t sample_state(const GibbsTable& table, double u) {
  double acc = 0.0;
  std::uint64_t last = 0;
  for (std::uint64_t s = 0; s < table.size(); ++s) {
    if (table.weights[s] == 0.0) continue;
    acc += table.weights[s];
    last = s;
    if (u < acc) return s;
  }
  return last;
}

nlohmann::json summary_json(const GibbsTable& table, std::size_t max_ground_states) {
  nlohmann::json ground = nlohmann::json::array();
  double scale = 1.0;
  for (double v : table.energies) scale = std::max(scale, std::abs(v));
  for (std::uint64_t s = 0; s < table.size() && ground.size() < max_ground_states; ++s) {
    if (table.energies[s] <= table.min_energy + kTieTolerance * scale) {
      ground.push_back(SpinConfiguration::from_index(s, table.n_sites).to_string());
    }
  }
  nlohmann::json j{{"n_sites", table.n_sites},
                   {"beta", to_json(table.beta)},
                   {"min_energy", table.min_energy},
                   {"ground_count", table.ground_count},
                   {"ground_states", ground}};
  if (table.beta.is_infinite()) {
    j["free_energy"] = free_energy(table);
    j["log_z"] = nullptr;
  } else {
    j["log_z"] = table.log_z;
    j["free_energy"] = table.beta.value() > 0.0 ? nlohmann::json(free_energy(table)) : nlohmann::json(nullptr);
  }
  return j;
}

}  // namespace chaoslab
