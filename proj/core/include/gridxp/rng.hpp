#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace gridxp {

// Seeded random source. All sampling goes through the hand-rolled draws
// below rather than std distributions, so that identical seeds produce
// identical streams across standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform integer in [lo, hi], inclusive. Rejection sampling, unbiased.
  int uniform_int(int lo, int hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return lo + static_cast<int>(v % range);
  }

  // Uniform double in [0, 1).
  double uniform_real() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform_real(double lo, double hi) {
    return lo + (hi - lo) * uniform_real();
  }

  // Index sampled from a (not necessarily normalized) 4-way distribution.
  int sample_categorical(const std::array<double, 4>& probs) {
    double total = probs[0] + probs[1] + probs[2] + probs[3];
    double u = uniform_real() * total;
    for (int i = 0; i < 3; ++i) {
      u -= probs[i];
      if (u < 0.0) return i;
    }
    return 3;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace gridxp
