#pragma once

#include <vector>

#include "nterm/numeric.hpp"

namespace nterm {

/// Brackets Σ_{k>N} f(k) for f convex and decreasing on [N + 1/2, ∞).
///
/// Trapezoid sums overestimate and midpoint sums underestimate integrals of
/// convex functions, so
///   ∫_{N+1}^∞ f + f(N+1)/2  <=  Σ_{k>N} f(k)  <=  ∫_{N+1/2}^∞ f.
/// `from_next` encloses ∫_{N+1}^∞ f and `from_half` encloses ∫_{N+1/2}^∞ f.
CertifiedValue convex_tail_bracket(double f_next, CertifiedValue from_next, CertifiedValue from_half);

/// Enclosure of ∫_X^∞ x^{-a} (1 + ln x)^b dx for a > 1, b >= 0, X >= 1.
CertifiedValue powerlog_integral(double a, double b, double x);

/// Smallest x >= 1 from which x^{-a} (1 + ln x)^b is convex and decreasing.
double powerlog_convex_from(double a, double b);

/// Tails of the one-dimensional weight series g(j) = (1 + j^r)^{-a/r}
/// (r < ∞) or max(1, j)^{-a} (r = ∞), j >= 0.
///
/// Terms up to an internal cutoff are summed exactly (suffix sums are
/// precomputed); beyond it the convex bracket above is applied with the
/// integral expanded as an alternating binomial series in x^{-r}.
class PowerTail1D {
 public:
  /// Throws DivergenceError unless a > 1.
  PowerTail1D(double a, double r, double tol);

  double a() const { return a_; }
  double r() const { return r_; }
  double term(Index j) const;
  /// Σ_{j>J} g(j) for J >= 0.
  CertifiedValue tail(Index j) const;
  /// Σ_{j∈ℤ} g(|j|) = 1 + 2 Σ_{j>0} g(j).
  CertifiedValue full() const;

 private:
  CertifiedValue integral(double x) const;
  CertifiedValue bracket(Index n) const;

  double a_;
  double r_;
  Index cutoff_;
  std::vector<double> suffix_;  // suffix_[J] = Σ_{J<j<=cutoff} g(j)
  CertifiedValue beyond_cutoff_;
};

}  // namespace nterm
