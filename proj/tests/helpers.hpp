#pragma once

#include <cmath>
#include <vector>

#include "bcsl/channel.hpp"
#include "bcsl/info.hpp"
#include "bcsl/rng.hpp"

namespace testing {

inline std::vector<double> bsc(double p) { return {1 - p, p, p, 1 - p}; }
inline std::vector<double> bec(double e) { return {1 - e, e, 0, 0, e, 1 - e}; }
inline std::vector<double> noiseless(std::size_t k) {
  std::vector<double> w(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) w[i * k + i] = 1.0;
  return w;
}
inline double h2(double p) { return p <= 0 || p >= 1 ? 0.0 : -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

// Row-stochastic k x m matrix with Dirichlet rows.
inline std::vector<double> random_stochastic(bcsl::Rng& rng, std::size_t k, std::size_t m) {
  std::vector<double> w;
  for (std::size_t i = 0; i < k; ++i) {
    auto r = rng.dirichlet(m, 1.0);
    w.insert(w.end(), r.begin(), r.end());
  }
  return w;
}

// Composition a (k x m) then b (m x l).
inline std::vector<double> compose(const std::vector<double>& a, const std::vector<double>& b, std::size_t k,
                                   std::size_t m, std::size_t l) {
  std::vector<double> c(k * l, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t t = 0; t < l; ++t) c[i * l + t] += a[i * m + j] * b[j * l + t];
  return c;
}

inline bcsl::Channel3 bsc3(double p1, double p2, double p3) {
  return bcsl::Channel3::from_marginals(2, bsc(p1), 2, bsc(p2), 2, bsc(p3), 2);
}

// Aux with U1 = U2 mod m1 = U3 mod m1, p(u1) p(u2,u3|u1) on the matching labels and
// p(x|u2,u3). Every such law satisfies the three Markov chains. Needs m2, m3 >= m1.
inline bcsl::AuxJoint random_aux(bcsl::Rng& rng, std::size_t m1, std::size_t m2, std::size_t m3, std::size_t nx) {
  auto pu1 = rng.dirichlet(m1, 1.0);
  auto px = random_stochastic(rng, m2 * m3, nx);
  std::vector<double> p(m1 * m2 * m3 * nx, 0.0);
  for (std::size_t a = 0; a < m1; ++a) {
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t b = a; b < m2; b += m1)
      for (std::size_t c = a; c < m3; c += m1) cells.push_back({b, c});
    auto w = rng.dirichlet(cells.size(), 1.0);
    for (std::size_t k = 0; k < cells.size(); ++k) {
      auto [b, c] = cells[k];
      for (std::size_t x = 0; x < nx; ++x) p[((a * m2 + b) * m3 + c) * nx + x] = pu1[a] * w[k] * px[(b * m3 + c) * nx + x];
    }
  }
  return bcsl::AuxJoint(m1, m2, m3, nx, p);
}

inline bcsl::Channel3 random_channel(bcsl::Rng& rng, std::size_t nx, std::size_t ny1, std::size_t ny2, std::size_t ny3) {
  std::vector<double> p;
  for (std::size_t x = 0; x < nx; ++x) {
    auto r = rng.dirichlet(ny1 * ny2 * ny3, 1.0);
    p.insert(p.end(), r.begin(), r.end());
  }
  return bcsl::Channel3(nx, ny1, ny2, ny3, p);
}

}  // namespace testing
