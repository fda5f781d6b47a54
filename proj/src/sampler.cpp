#include "chaoslab/sampler.hpp"

#include <cmath>

#include "chaoslab/errors.hpp"

namespace chaoslab {

ChainConfig default_chain_config(int n_sites, std::size_t sweeps, const SeedRecord& seed) {
  ChainConfig cfg;
  cfg.burn_in = 100 * static_cast<std::size_t>(n_sites);
  cfg.sweeps = std::max(sweeps, cfg.burn_in + 1);
  cfg.seed = seed;
  return cfg;
}

void validate(const ChainConfig& cfg) {
  if (cfg.thinning < 1) throw invalid_parameter("chain thinning must be >= 1");
  if (cfg.burn_in >= cfg.sweeps) throw invalid_parameter("chain burn_in must be < sweeps");
}

double flip_probability(UpdateKernel kernel, double beta, double delta_h) {
  const double x = beta * delta_h;
  if (kernel == UpdateKernel::glauber) {
    // Logistic 1 / (1 + e^x), written to avoid overflow for large |x|.
    if (x >= 0.0) {
      const double e = std::exp(-x);
      return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
  }
  return x <= 0.0 ? 1.0 : std::exp(-x);
}

GibbsChain::GibbsChain(const ModelSpec& model, const DisorderVector& g, Beta beta, UpdateKernel kernel,
                       const SeedRecord& seed)
    : n_(model.n_sites()), beta_(0.0), kernel_(kernel), rng_(seed), state_(model.n_sites()) {
  if (beta.is_infinite()) throw unsupported_error("MCMC at beta = inf is not supported; use exact ground states");
  beta_ = beta.value();
  check_disorder(model, g);
  rem_ = model.is_rem();
  if (rem_) {
    rem_energies_ = enumerate_energies(model, g);
  } else {
    form_ = hamiltonian_terms(model, g);
    term_value_.resize(form_.terms.size());
  }
  SpinConfiguration start(n_);
  for (int i = 0; i < n_; ++i) start.set(i, rng_.uniform() < 0.5 ? 1 : -1);
  set_state(start);
}

void GibbsChain::set_state(const SpinConfiguration& s) {
  if (s.n_sites() != n_) throw shape_error("GibbsChain::set_state: size mismatch");
  state_ = s;
  if (rem_) {
    energy_ = rem_energies_[state_.index()];
    return;
  }
  energy_ = form_.constant;
  for (std::size_t t = 0; t < form_.terms.size(); ++t) {
    int prod = 1;
    for (int i : form_.terms[t].sites) prod *= state_.spin(i);
    term_value_[t] = prod * form_.terms[t].coeff;
    energy_ += term_value_[t];
  }
}

double GibbsChain::delta_energy(int k) const {
  if (rem_) {
    const std::uint64_t idx = state_.index();
    return rem_energies_[idx ^ (std::uint64_t{1} << k)] - rem_energies_[idx];
  }
  double delta = 0.0;
  for (int t : form_.terms_of_site[static_cast<std::size_t>(k)]) delta -= 2.0 * term_value_[static_cast<std::size_t>(t)];
  return delta;
}

void GibbsChain::flip(int k, double delta) {
  state_.flip(k);
  energy_ += delta;
  if (!rem_) {
    for (int t : form_.terms_of_site[static_cast<std::size_t>(k)]) {
      term_value_[static_cast<std::size_t>(t)] = -term_value_[static_cast<std::size_t>(t)];
    }
  }
}

bool GibbsChain::update_site(int k) {
  const double delta = delta_energy(k);
  if (rng_.uniform() < flip_probability(kernel_, beta_, delta)) {
    flip(k, delta);
    return true;
  }
  return false;
}

void GibbsChain::sweep() {
  for (int k = 0; k < n_; ++k) update_site(k);
}

void run_chain(const ModelSpec& model, const DisorderVector& g, Beta beta, const ChainConfig& cfg,
               const std::function<void(const SpinConfiguration&)>& visit) {
  validate(cfg);
  GibbsChain chain(model, g, beta, cfg.kernel, cfg.seed);
  for (std::size_t s = 0; s < cfg.sweeps; ++s) {
    chain.sweep();
    if (s >= cfg.burn_in && (s - cfg.burn_in) % cfg.thinning == 0) visit(chain.state());
  }
}

std::vector<SpinConfiguration> run_chain(const ModelSpec& model, const DisorderVector& g, Beta beta,
                                         const ChainConfig& cfg) {
  std::vector<SpinConfiguration> out;
  run_chain(model, g, beta, cfg, [&](const SpinConfiguration& s) { out.push_back(s); });
  return out;
}

std::vector<ReplicaSample> sample_replica_pair(const ModelSpec& model, const DisorderVector& g_a,
                                               const DisorderVector& g_b, Beta beta, const ChainConfig& cfg,
                                               const std::string& provenance) {
  validate(cfg);
  GibbsChain a(model, g_a, beta, cfg.kernel, cfg.seed.child({1}));
  GibbsChain b(model, g_b, beta, cfg.kernel, cfg.seed.child({2}));
  std::vector<ReplicaSample> out;
  for (std::size_t s = 0; s < cfg.sweeps; ++s) {
    a.sweep();
    b.sweep();
    if (s >= cfg.burn_in && (s - cfg.burn_in) % cfg.thinning == 0) out.push_back({a.state(), b.state(), provenance});
  }
  return out;
}

}  // namespace chaoslab
