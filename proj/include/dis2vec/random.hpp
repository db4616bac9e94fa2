#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace dis2vec {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits; avoids the
// implementation-defined std::uniform_real_distribution so streams are
// reproducible across standard libraries.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). n must be positive.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream seed derived from a master seed and two stream keys.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(master) ^ a) ^ b);
}

// Fisher-Yates shuffle driven by uniform_index.
template <class T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

// Vose alias table: O(n) construction, O(1) sampling from an arbitrary
// non-negative weight vector (weights need not be normalized).
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const { return prob_.size(); }
  bool empty() const { return prob_.empty(); }

  std::size_t sample(Rng& rng) const {
    std::size_t column = uniform_index(rng, prob_.size());
    return uniform01(rng) < prob_[column] ? column : alias_[column];
  }

  // Sampling probability of each outcome implied by the table.
  std::vector<double> probabilities() const;

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace dis2vec
