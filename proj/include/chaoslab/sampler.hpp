#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "chaoslab/disorder.hpp"
#include "chaoslab/exact.hpp"
#include "chaoslab/models.hpp"
#include "chaoslab/rng.hpp"
#include "chaoslab/spin.hpp"

namespace chaoslab {

enum class UpdateKernel { glauber, metropolis };

struct ChainConfig {
  std::size_t sweeps = 10000;
  std::size_t burn_in = 1000;
  std::size_t thinning = 1;
  UpdateKernel kernel = UpdateKernel::glauber;
  SeedRecord seed;
};

// Burn-in of 100 N sweeps; a heuristic, not a mixing guarantee.
ChainConfig default_chain_config(int n_sites, std::size_t sweeps, const SeedRecord& seed);

void validate(const ChainConfig& cfg);

// Probability that a single-site update flips the spin given the energy
// change delta_h = H(flipped) - H(current).
double flip_probability(UpdateKernel kernel, double beta, double delta_h);

// Single-site chain targeting exp(-beta H) / Z. Systematic-scan sweeps.
class GibbsChain {
 public:
  GibbsChain(const ModelSpec& model, const DisorderVector& g, Beta beta, UpdateKernel kernel, const SeedRecord& seed);

  void set_state(const SpinConfiguration& s);
  const SpinConfiguration& state() const { return state_; }
  double energy() const { return energy_; }

  // H(state with site k flipped) - H(state).
  double delta_energy(int k) const;
  // One heat-bath or Metropolis update of site k; returns true if it flipped.
  bool update_site(int k);
  void sweep();

 private:
  void flip(int k, double delta);

  int n_;
  double beta_;
  UpdateKernel kernel_;
  Rng rng_;
  SpinConfiguration state_;
  double energy_ = 0.0;
  // Multilinear path.
  MultilinearForm form_;
  std::vector<double> term_value_;
  // REM path.
  bool rem_ = false;
  std::vector<double> rem_energies_;
};

// Records the state every `thinning` sweeps after burn-in.
void run_chain(const ModelSpec& model, const DisorderVector& g, Beta beta, const ChainConfig& cfg,
               const std::function<void(const SpinConfiguration&)>& visit);
std::vector<SpinConfiguration> run_chain(const ModelSpec& model, const DisorderVector& g, Beta beta,
                                         const ChainConfig& cfg);

struct ReplicaSample {
  SpinConfiguration first;   // from the measure of g_a
  SpinConfiguration second;  // from the measure of g_b
  std::string provenance;
};

// Two independent chains, one per disorder, recorded in lockstep.
std::vector<ReplicaSample> sample_replica_pair(const ModelSpec& model, const DisorderVector& g_a,
                                               const DisorderVector& g_b, Beta beta, const ChainConfig& cfg,
                                               const std::string& provenance = {});

}  // namespace chaoslab
