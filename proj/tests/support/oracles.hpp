#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's width, lattice or constant code; values come from direct loops
// in long double, closed forms, or plain box enumeration.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Index = std::int64_t;
using LD = long double;

struct ScanResult {
  LD value = 0;
  Index argmax = 0;
};

/// sup over m in (n, m_max] of (m-n)^{1/q} / (Σ_{k<=m} λ_k^{-p})^{1/p}.
inline ScanResult ratio_scan(const std::function<LD(Index)>& lambda, double p, double q, Index n, Index m_max) {
  ScanResult best;
  LD prefix = 0;
  for (Index k = 1; k <= n; ++k) prefix += std::pow(lambda(k), -static_cast<LD>(p));
  for (Index m = n + 1; m <= m_max; ++m) {
    prefix += std::pow(lambda(m), -static_cast<LD>(p));
    const LD r = std::pow(static_cast<LD>(m - n), 1.0L / q) / std::pow(prefix, 1.0L / p);
    if (r > best.value) best = {r, m};
  }
  return best;
}

/// Smallest m > n with ratio(m) >= ratio(m+1), by direct evaluation.
inline Index first_peak(const std::function<LD(Index)>& lambda, double p, double q, Index n, Index m_max) {
  LD prefix = 0;
  for (Index k = 1; k <= n; ++k) prefix += std::pow(lambda(k), -static_cast<LD>(p));
  auto ratio = [&](Index m, LD pre) { return std::pow(static_cast<LD>(m - n), 1.0L / q) / std::pow(pre, 1.0L / p); };
  prefix += std::pow(lambda(n + 1), -static_cast<LD>(p));
  for (Index m = n + 1; m < m_max; ++m) {
    const LD next = prefix + std::pow(lambda(m + 1), -static_cast<LD>(p));
    if (ratio(m, prefix) >= ratio(m + 1, next)) return m;
    prefix = next;
  }
  return -1;
}

/// Largest m > n with (m-n) λ_m^{-p} <= Σ_{k<=m} λ_k^{-p}, scanning up to m_max.
inline Index last_feasible(const std::function<LD(Index)>& lambda, double p, Index n, Index m_max) {
  LD prefix = 0;
  for (Index k = 1; k <= n; ++k) prefix += std::pow(lambda(k), -static_cast<LD>(p));
  Index last = -1;
  for (Index m = n + 1; m <= m_max; ++m) {
    const LD t = std::pow(lambda(m), -static_cast<LD>(p));
    prefix += t;
    if (static_cast<LD>(m - n) * t <= prefix * (1 + 1e-15L)) last = m;
  }
  return last;
}

/// Width for q < p < ∞ with λ_k = c ρ^{k-1}, tail summed in closed form.
inline LD geometric_case_ii(double rho, double c, double p, double q, Index n) {
  const LD alpha = static_cast<LD>(p) * q / (p - q);
  auto lam = [&](Index k) { return static_cast<LD>(c) * std::pow(static_cast<LD>(rho), static_cast<LD>(k - 1)); };
  const Index ns = last_feasible(lam, p, n, n + 400);
  LD prefix = 0;
  for (Index k = 1; k <= ns; ++k) prefix += std::pow(lam(k), -static_cast<LD>(p));
  const LD head = std::pow(static_cast<LD>(ns - n), static_cast<LD>(p) / (p - q)) /
                  std::pow(prefix, static_cast<LD>(q) / (p - q));
  const LD tail = std::pow(lam(ns + 1), alpha) / (1 - std::pow(static_cast<LD>(rho), alpha));
  return std::pow(head + tail, 1.0L / q - 1.0L / p);
}

// ------------------------------------------------------------ lattice

inline LD mixed_factor(Index j, double s, double r) {
  const LD a = std::abs(static_cast<LD>(j));
  if (std::isinf(r)) return std::pow(std::max<LD>(1, a), static_cast<LD>(s));
  return std::pow(1 + std::pow(a, static_cast<LD>(r)), static_cast<LD>(s) / r);
}

inline LD mixed_weight(const std::vector<Index>& k, double s, double r) {
  LD w = 1;
  for (Index j : k) w *= mixed_factor(j, s, r);
  return w;
}

inline LD energy_weight(const std::vector<Index>& k, double s) {
  LD prod = 1;
  LD sq = 0;
  for (Index j : k) {
    const LD x = static_cast<LD>(j) * j;
    prod *= std::pow(1 + x, static_cast<LD>(s) / 2);
    sq += x;
  }
  return prod / std::sqrt(1 + sq);
}

/// Every k in ℤ^d with mixed weight <= t, by nested loops pruned on the
/// partial product (each factor is >= 1).
inline std::vector<std::vector<Index>> mixed_points_leq(double s, double r, int d, LD t) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> k(static_cast<std::size_t>(d), 0);
  std::function<void(int, LD)> rec = [&](int i, LD budget) {
    if (i == d) {
      out.push_back(k);
      return;
    }
    for (Index j = 0;; ++j) {
      const LD f = mixed_factor(j, s, r);
      if (f > budget) break;
      k[static_cast<std::size_t>(i)] = j;
      rec(i + 1, budget / f);
      if (j > 0) {
        k[static_cast<std::size_t>(i)] = -j;
        rec(i + 1, budget / f);
      }
    }
  };
  rec(0, t * (1 + 1e-15L));
  return out;
}

/// Points of the box [-R, R]^d.
inline std::vector<std::vector<Index>> box(int d, Index radius) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> k(static_cast<std::size_t>(d), -radius);
  while (true) {
    out.push_back(k);
    int i = d - 1;
    while (i >= 0 && k[static_cast<std::size_t>(i)] == radius) k[static_cast<std::size_t>(i--)] = -radius;
    if (i < 0) break;
    ++k[static_cast<std::size_t>(i)];
  }
  return out;
}

// ------------------------------------------------------------ constants

/// (π coth π - 1) / 2 = Σ_{k>=1} 1/(k²+1).
inline double energy_S_at_2() {
  const double pi = std::numbers::pi;
  return (pi / std::tanh(pi) - 1.0) / 2.0;
}

/// Σ_{k>=1} (k²+1)^{-e}: partial sum to N plus the integral bracket of the
/// convex tail; returns the midpoint and the bracket half-width.
inline std::pair<LD, LD> lattice_series(LD e, Index n_terms) {
  LD sum = 0;
  for (Index k = n_terms; k >= 1; --k) sum += std::pow(static_cast<LD>(k) * k + 1, -e);
  // (x²+1)^{-e} lies between x^{-2e} (1 - e/x²) and x^{-2e}
  auto upper = [&](LD x) { return std::pow(x, 1 - 2 * e) / (2 * e - 1); };
  auto lower = [&](LD x) { return upper(x) - e * std::pow(x, -1 - 2 * e) / (2 * e + 1); };
  const LD lo = lower(static_cast<LD>(n_terms) + 1);
  const LD hi = upper(static_cast<LD>(n_terms) + 0.5L);
  return {sum + (lo + hi) / 2, (hi - lo) / 2};
}

// ------------------------------------------------------------ generators

/// Hand-rolled generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  Index integer(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng_); }
  bool coin(double prob = 0.5) { return std::bernoulli_distribution(prob)(rng_); }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(integer(0, static_cast<Index>(v.size()) - 1))];
  }

  /// Positive non-increasing list with occasional ties.
  std::vector<double> prefix(Index m) {
    std::vector<double> lam(static_cast<std::size_t>(m));
    double v = uniform(0.5, 4.0);
    for (auto& x : lam) {
      x = v;
      if (!coin(0.15)) v *= uniform(0.2, 1.0);
    }
    return lam;
  }

  /// Exponent in (0, ∞], mostly finite.
  double exponent() {
    if (coin(0.1)) return std::numeric_limits<double>::infinity();
    return pick(std::vector<double>{0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0});
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace oracle
