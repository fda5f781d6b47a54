#include "chaoslab/spin.hpp"

#include "chaoslab/errors.hpp"

namespace chaoslab {

SpinConfiguration::SpinConfiguration(int n_sites) : n_(n_sites), words_((n_sites + 63) / 64, 0) {
  if (n_sites < 1) throw invalid_parameter("SpinConfiguration: need at least one site");
}

SpinConfiguration SpinConfiguration::from_index(std::uint64_t index, int n_sites) {
  if (n_sites > 64) throw invalid_parameter("SpinConfiguration::from_index: more than 64 sites");
  SpinConfiguration s(n_sites);
  s.words_[0] = n_sites == 64 ? index : (index & ((std::uint64_t{1} << n_sites) - 1));
  return s;
}

SpinConfiguration SpinConfiguration::from_spins(const std::vector<int>& spins) {
  SpinConfiguration s(static_cast<int>(spins.size()));
  for (int i = 0; i < s.n_; ++i) s.set(i, spins[static_cast<std::size_t>(i)]);
  return s;
}

SpinConfiguration SpinConfiguration::from_string(const std::string& text) {
  SpinConfiguration s(static_cast<int>(text.size()));
  for (int i = 0; i < s.n_; ++i) {
    const char c = text[static_cast<std::size_t>(i)];
    if (c != '+' && c != '-') throw invalid_parameter("SpinConfiguration::from_string: expected '+' or '-'");
    s.set(i, c == '+' ? 1 : -1);
  }
  return s;
}

void SpinConfiguration::set(int i, int value) {
  if (value != 1 && value != -1) throw invalid_parameter("SpinConfiguration::set: spin must be +1 or -1");
  const std::uint64_t bit = std::uint64_t{1} << (i & 63);
  if (value == 1) {
    words_[i >> 6] |= bit;
  } else {
    words_[i >> 6] &= ~bit;
  }
}

std::uint64_t SpinConfiguration::index() const {
  if (n_ > 64) throw invalid_parameter("SpinConfiguration::index: more than 64 sites");
  return words_[0];
}

SpinConfiguration SpinConfiguration::flipped() const {
  SpinConfiguration out = *this;
  for (std::size_t w = 0; w < out.words_.size(); ++w) out.words_[w] = ~out.words_[w];
  const int tail = n_ & 63;
  if (tail != 0) out.words_.back() &= (std::uint64_t{1} << tail) - 1;
  return out;
}

std::string SpinConfiguration::to_string() const {
  std::string s(static_cast<std::size_t>(n_), '-');
  for (int i = 0; i < n_; ++i) {
    if (spin(i) == 1) s[static_cast<std::size_t>(i)] = '+';
  }
  return s;
}

std::vector<int> SpinConfiguration::spins() const {
  std::vector<int> out(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] = spin(i);
  return out;
}

int hamming_distance(const SpinConfiguration& a, const SpinConfiguration& b) {
  if (a.n_sites() != b.n_sites()) throw shape_error("hamming_distance: site count mismatch");
  int d = 0;
  for (std::size_t w = 0; w < a.words().size(); ++w) d += std::popcount(a.words()[w] ^ b.words()[w]);
  return d;
}

}  // namespace chaoslab
