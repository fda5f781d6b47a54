#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "json.hpp"

#include "chaoslab/disorder.hpp"
#include "chaoslab/models.hpp"
#include "chaoslab/spin.hpp"

namespace chaoslab {

inline constexpr int kMaxExactSites = 24;
// Generic two-replica sums cost 4^N.
inline constexpr int kMaxPairSites = 12;

// Inverse temperature; infinity is a distinct state, never a large float.
class Beta {
 public:
  static Beta finite(double value);
  static Beta infinity() { return Beta(0.0, true); }

  bool is_infinite() const { return infinite_; }
  // Throws for the infinite state.
  double value() const;

  friend bool operator==(const Beta&, const Beta&) = default;

 private:
  Beta(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

nlohmann::json to_json(const Beta& beta);
Beta beta_from_json(const nlohmann::json& j);

// Exact Gibbs measure over all 2^N states. State index bit i set <=> sigma_i = +1.
struct GibbsTable {
  int n_sites = 0;
  Beta beta = Beta::finite(0.0);
  std::vector<double> energies;     // H(sigma)
  std::vector<double> log_weights;  // normalized; -inf off the ground set at beta = inf
  std::vector<double> weights;      // exp(log_weights)
  double log_z = 0.0;               // log sum exp(-beta H); undefined at beta = inf
  double min_energy = 0.0;
  std::size_t ground_count = 0;

  std::size_t size() const { return energies.size(); }
};

// Relative tolerance used to decide energy ties for ground states.
inline constexpr double kTieTolerance = 1e-10;

struct EnumerationOptions {
  int threads = 1;
};

// H(sigma) for every state, via Gray-code single-flip updates in fixed chunks.
std::vector<double> enumerate_energies(const ModelSpec& model, const DisorderVector& g,
                                       const EnumerationOptions& options = {});

GibbsTable gibbs_table_from_energies(std::vector<double> energies, int n_sites, Beta beta);
GibbsTable build_gibbs_table(const ModelSpec& model, const DisorderVector& g, Beta beta,
                             const EnumerationOptions& options = {});

// log Z / beta; at beta = inf the negated ground-state energy. beta = 0 is a domain error.
double free_energy(const GibbsTable& table);

double gibbs_expect(const GibbsTable& table, const std::function<double(std::uint64_t)>& observable);

// Generic product-measure average; cost 4^N, so N <= kMaxPairSites.
double two_replica_expect(const GibbsTable& a, const GibbsTable& b,
                          const std::function<double(std::uint64_t, std::uint64_t)>& observable);

// c(d) = sum_x w_a(x) w_b(x xor d): the law of the disagreement pattern
// sigma^1 * sigma^2 under the product measure. O(N 2^N) via Walsh-Hadamard.
std::vector<double> disagreement_law(const GibbsTable& a, const GibbsTable& b);

// Product-measure average of an observable of the disagreement pattern d.
double disagreement_expect(const std::vector<double>& law, const std::function<double(std::uint64_t)>& observable);

// P(Hamming distance = h), h = 0..N.
std::vector<double> hamming_law(const GibbsTable& a, const GibbsTable& b);

// <R^{2k}> under the product measure.
double overlap_moment(const GibbsTable& a, const GibbsTable& b, int k);

// In-place fast Walsh-Hadamard transform (unnormalized); size must be a power of two.
void walsh_hadamard(std::vector<double>& v);

struct FieldSummary {
  double max_field = 0.0;                  // M = max field_value
  std::vector<SpinConfiguration> argmax;   // ties within kTieTolerance
  double sigma2 = 0.0;                     // max Var(field_value(sigma))
  double sigma2_gibbs = 0.0;               // max Var(-H(sigma))
};

FieldSummary field_summary(const ModelSpec& model, const DisorderVector& g, const EnumerationOptions& options = {});

// field_value for every state.
std::vector<double> enumerate_field(const ModelSpec& model, const DisorderVector& g,
                                    const EnumerationOptions& options = {});

std::vector<SpinConfiguration> ground_states(const ModelSpec& model, const DisorderVector& g,
                                             const EnumerationOptions& options = {});

// Inverse-CDF draw from the table with u uniform on [0, 1).
std::uint64_t sample_state(const GibbsTable& table, double u);

nlohmann::json summary_json(const GibbsTable& table, std::size_t max_ground_states = 64);

}  // namespace chaoslab
