#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qam/types.hpp"

namespace qam {

// Child seed for stream `index` of a master seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Thin wrapper over mt19937_64. Distributions are implemented here so that
// sampled values do not depend on the standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();                      // [0, 1)
  double uniform_open();                 // (0, 1)
  double normal();                       // standard normal
  std::size_t index(std::size_t bound);  // [0, bound)
  Complex complex_normal();              // E|z|^2 = 1

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qam
