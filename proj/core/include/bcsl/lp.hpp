#pragma once

// Dense two-phase simplex with Bland's rule. Instantiated for double and for
// exact rationals (mpq_class); Bland's rule guarantees termination for the latter.

#include <cmath>
#include <cstddef>
#include <vector>

#include <gmpxx.h>

namespace bcsl {

template <class T>
struct NumTraits;

template <>
struct NumTraits<double> {
  static constexpr double eps = 1e-11;
  static bool pos(double v) { return v > eps; }
  static bool neg(double v) { return v < -eps; }
  static bool zero(double v) { return std::abs(v) <= eps; }
};

template <>
struct NumTraits<mpq_class> {
  static bool pos(const mpq_class& v) { return sgn(v) > 0; }
  static bool neg(const mpq_class& v) { return sgn(v) < 0; }
  static bool zero(const mpq_class& v) { return sgn(v) == 0; }
};

enum class Rel { Le, Eq, Ge };
enum class LpStatus { Optimal, Infeasible, Unbounded };

// maximize c.x  s.t.  A x (rel) b,  x >= 0
template <class T>
struct LpProblem {
  std::size_t n = 0;
  std::vector<std::vector<T>> A;
  std::vector<Rel> rel;
  std::vector<T> b;
  std::vector<T> c;

  void add(std::vector<T> row, Rel r, T rhs) {
    A.push_back(std::move(row));
    rel.push_back(r);
    b.push_back(std::move(rhs));
  }
};

template <class T>
struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  T value{};
  std::vector<T> x;
};

template <class T>
LpResult<T> solve_lp(const LpProblem<T>& p) {
  using N = NumTraits<T>;
  const std::size_t m = p.A.size();
  const std::size_t n = p.n;

  // Column layout: [x (n) | slack/surplus (m) | artificial (m) | rhs]
  const std::size_t s0 = n, a0 = n + m, rhs = n + 2 * m, W = n + 2 * m + 1;
  std::vector<std::vector<T>> t(m, std::vector<T>(W, T(0)));
  std::vector<std::size_t> basis(m);
  std::vector<bool> has_art(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    T sign = N::neg(p.b[i]) ? T(-1) : T(1);
    for (std::size_t j = 0; j < n; ++j) t[i][j] = sign * p.A[i][j];
    t[i][rhs] = sign * p.b[i];
    Rel r = p.rel[i];
    if (N::neg(p.b[i])) r = r == Rel::Le ? Rel::Ge : r == Rel::Ge ? Rel::Le : Rel::Eq;
    if (r == Rel::Le) {
      t[i][s0 + i] = T(1);
      basis[i] = s0 + i;
    } else {
      if (r == Rel::Ge) t[i][s0 + i] = T(-1);
      t[i][a0 + i] = T(1);
      basis[i] = a0 + i;
      has_art[i] = true;
    }
  }

  std::vector<char> is_basic(W, 0);
  for (std::size_t i = 0; i < m; ++i) is_basic[basis[i]] = 1;

  auto pivot = [&](std::size_t r, std::size_t c) {
    T piv = t[r][c];
    for (std::size_t j = 0; j < W; ++j) t[r][j] /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || N::zero(t[i][c])) continue;
      T f = t[i][c];
      for (std::size_t j = 0; j < W; ++j) t[i][j] -= f * t[r][j];
    }
    is_basic[basis[r]] = 0;
    basis[r] = c;
    is_basic[c] = 1;
  };

  // Maximizes obj over columns [0, ncols); returns false if unbounded.
  auto run = [&](const std::vector<T>& obj, std::size_t ncols) -> bool {
    for (;;) {
      // Reduced cost d_j = obj_j - sum_i obj_{basis i} t[i][j]
      std::size_t enter = ncols;
      for (std::size_t j = 0; j < ncols; ++j) {
        if (is_basic[j]) continue;
        T d = obj[j];
        for (std::size_t i = 0; i < m; ++i)
          if (!N::zero(t[i][j])) d -= obj[basis[i]] * t[i][j];
        if (N::pos(d)) {
          enter = j;
          break;
        }
      }
      if (enter == ncols) return true;
      std::size_t leave = m;
      T best{};
      for (std::size_t i = 0; i < m; ++i) {
        if (!N::pos(t[i][enter])) continue;
        T ratio = t[i][rhs] / t[i][enter];
        if (leave == m || ratio < best || (!(best < ratio) && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave == m) return false;
      pivot(leave, enter);
    }
  };

  std::vector<T> obj1(W - 1, T(0));
  bool any_art = false;
  for (std::size_t i = 0; i < m; ++i)
    if (has_art[i]) {
      obj1[a0 + i] = T(-1);
      any_art = true;
    }
  LpResult<T> res;
  if (any_art) {
    run(obj1, W - 1);
    T infeas(0);
    for (std::size_t i = 0; i < m; ++i)
      if (basis[i] >= a0) infeas += t[i][rhs];
    if (N::pos(infeas)) return res;
    // Drive remaining artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < a0) continue;
      for (std::size_t j = 0; j < a0; ++j)
        if (!N::zero(t[i][j])) {
          pivot(i, j);
          break;
        }
    }
  }
  std::vector<T> obj2(W - 1, T(0));
  for (std::size_t j = 0; j < n; ++j) obj2[j] = p.c.empty() ? T(0) : p.c[j];
  if (!run(obj2, a0)) {
    res.status = LpStatus::Unbounded;
    return res;
  }
  res.status = LpStatus::Optimal;
  res.x.assign(n, T(0));
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) res.x[basis[i]] = t[i][rhs];
  res.value = T(0);
  for (std::size_t j = 0; j < n; ++j)
    if (!p.c.empty()) res.value += p.c[j] * res.x[j];
  return res;
}

}  // namespace bcsl
