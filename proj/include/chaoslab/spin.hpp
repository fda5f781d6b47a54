#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace chaoslab {

// A configuration in {-1,+1}^N: bit i set <=> sigma_i = +1. Unused high bits
// of the last word are always zero.
class SpinConfiguration {
 public:
  SpinConfiguration() = default;
  explicit SpinConfiguration(int n_sites);

  // All-minus configuration is index 0; bit i of `index` is site i.
  static SpinConfiguration from_index(std::uint64_t index, int n_sites);
  static SpinConfiguration from_spins(const std::vector<int>& spins);
  // Parses a string of '+' and '-' characters.
  static SpinConfiguration from_string(const std::string& text);

  int n_sites() const { return n_; }
  int spin(int i) const { return ((words_[i >> 6] >> (i & 63)) & 1U) ? 1 : -1; }
  void set(int i, int value);
  void flip(int i) { words_[i >> 6] ^= (std::uint64_t{1} << (i & 63)); }

  // Only valid for n_sites <= 64.
  std::uint64_t index() const;
  SpinConfiguration flipped() const;
  std::string to_string() const;
  std::vector<int> spins() const;

  const std::vector<std::uint64_t>& words() const { return words_; }

  friend bool operator==(const SpinConfiguration&, const SpinConfiguration&) = default;

 private:
  int n_ = 0;
  std::vector<std::uint64_t> words_;
};

// Number of sites where the two configurations disagree.
int hamming_distance(const SpinConfiguration& a, const SpinConfiguration& b);

// Site value of an enumeration index: +1 if bit i is set.
inline int spin_of(std::uint64_t index, int i) { return ((index >> i) & 1U) ? 1 : -1; }

}  // namespace chaoslab
