#pragma once

#include <cmath>
#include <cstdint>

#include "hamred/symplin.hpp"

namespace hamred {

// Counter-based generator: draw i of stream (seed, stream) is a pure function
// of its coordinates, so results do not depend on call order or threading.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t bits(std::uint64_t i) const { return mix(key_ + i * 0x9e3779b97f4a7c15ULL); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t i) const { return (bits(i) >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller on draws 2i, 2i+1.
  double normal(std::uint64_t i) const {
    const double u1 = 1.0 - uniform(2 * i);
    const double u2 = uniform(2 * i + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Sequential convenience wrappers.
  double next_uniform() { return uniform(counter_++); }
  double next_normal() { return normal(counter_++); }

  Matrix normal_matrix(Index rows, Index cols) {
    Matrix M(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) M(i, j) = next_normal();
    return M;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace hamred
