#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace roadmot::sim {

// mt19937_64 plus hand-rolled transforms. The standard distributions are not
// bit-stable across library implementations, so uniform/normal/poisson are
// built here from the raw stream to keep seeded scenes reproducible.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  // [0, 1)
  double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + int(gen_() % uint64_t(hi - lo + 1));
  }

  // Box-Muller (cosine branch only, so draws stay aligned).
  double normal(double mean = 0.0, double sigma = 1.0) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return mean + sigma * std::sqrt(-2.0 * std::log(u1)) *
                      std::cos(2.0 * M_PI * u2);
  }

  // Knuth's product method; fine for the small per-frame clutter rates used.
  int poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace roadmot::sim
