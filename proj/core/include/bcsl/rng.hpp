#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace bcsl {

// Stream identifiers keep independent uses of one master seed apart.
enum class Stream : std::uint64_t {
  Search = 1,
  Codebook = 2,
  Encoder = 3,
  Trial = 4,
  Study = 5,
};

// mt19937_64 keyed by (master seed, stream, index). Identical keys give identical
// sequences on every thread, which is what makes parallel runs reproducible.
class Rng {
 public:
  Rng(std::uint64_t seed, Stream stream, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    eng_.seed(seq);
  }

  std::uint64_t bits() { return eng_(); }
  // Uniform on [0,1) from the top 53 bits; avoids implementation-defined distributions.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

  std::size_t categorical(const double* p, std::size_t k) {
    double u = uniform(), acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      acc += p[i];
      if (u < acc) return i;
    }
    // Round-off tail: last symbol with positive mass.
    for (std::size_t i = k; i-- > 0;)
      if (p[i] > 0.0) return i;
    return k - 1;
  }

  // Flat Dirichlet(alpha) draw.
  std::vector<double> dirichlet(std::size_t k, double alpha = 1.0) {
    std::vector<double> v(k);
    double s = 0.0;
    for (auto& x : v) {
      x = alpha == 1.0 ? -std::log(1.0 - uniform()) : gamma(alpha);
      s += x;
    }
    for (auto& x : v) x /= s;
    return v;
  }

 private:
  double normal() {
    double u1 = 1.0 - uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  // Marsaglia-Tsang.
  double gamma(double a) {
    if (a < 1.0) return gamma(a + 1.0) * std::pow(1.0 - uniform(), 1.0 / a);
    double d = a - 1.0 / 3.0, c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double z = normal(), v = 1.0 + c * z;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = 1.0 - uniform();
      if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v;
    }
  }

  std::mt19937_64 eng_;
};

}  // namespace bcsl
