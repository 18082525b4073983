#pragma once

#include <cmath>
#include <cstdint>

#include "gbeam/types.hpp"

namespace gbeam {

// Counter-based generator (splitmix64 of seed^counter). Stateless per draw,
// so sample schedules are reproducible across platforms and thread counts.
struct CounterRng {
  std::uint64_t seed;
  std::uint64_t counter = 0;

  explicit CounterRng(std::uint64_t s) : seed(s) {}

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  // [0,1)
  double uniform() {
    const std::uint64_t r = mix(seed + 0x632be59bd9b4e019ULL * ++counter);
    return static_cast<double>(r >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  Vec on_sphere(int d) {
    Vec v(d);
    double norm = 0.0;
    do {
      for (int i = 0; i < d; ++i) v[i] = gaussian();
      norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
  }

  Vec in_ball(int d, double radius) {
    Vec v(d);
    do {
      for (int i = 0; i < d; ++i) v[i] = uniform(-1.0, 1.0);
    } while (v.squaredNorm() > 1.0);
    return radius * v;
  }
};

inline constexpr std::uint64_t kDefaultProbeSeed = 0x5eedu;

}  // namespace gbeam
