#pragma once

#include <cstdint>
#include <random>

namespace ssinv {

// Seeded random source with a platform-stable Gaussian (Box-Muller on the
// raw engine output, so draws do not depend on the standard library's
// distribution implementation).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi);

  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0;
  bool has_cached_ = false;
};

}  // namespace ssinv
