#include "nterm/tail_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

namespace nterm {

CertifiedValue convex_tail_bracket(double f_next, CertifiedValue from_next, CertifiedValue from_half) {
  return CertifiedValue{from_next.lo + 0.5 * f_next, from_half.hi}.widened();
}

double powerlog_convex_from(double a, double b) {
  // With L = 1 + ln x, f'' has the sign of (aL - b)((a+1)L - b + 1) - aL,
  // which is nonnegative once L >= max(1, 2b/a) for a > 1.
  if (b <= 0.0) return 1.0;
  return std::exp(std::max(0.0, 2.0 * b / a - 1.0));
}

CertifiedValue powerlog_integral(double a, double b, double x) {
  if (!(a > 1.0)) throw DivergenceError("power-log integral diverges for exponent " + std::to_string(a));
  if (!(x >= 1.0)) throw DomainError("power-log integral needs a lower limit >= 1");
  const double am1 = a - 1.0;
  if (b == 0.0) {
    const double v = std::exp(-am1 * std::log(x)) / am1;
    return CertifiedValue::exact(v).widened(16);
  }
  // ∫_X^∞ x^{-a} L^b dx = e^{a-1} (a-1)^{-(b+1)} Γ(b+1, (a-1)(1 + ln X))
  const double z = am1 * (1.0 + std::log(x));
  const double log_prefactor = am1 - (b + 1.0) * std::log(am1);
  double upper_gamma = 0.0;
  try {
    upper_gamma = boost::math::tgamma(b + 1.0, z);
  } catch (const std::exception&) {
    upper_gamma = 0.0;
  }
  if (upper_gamma > 0.0 && std::isfinite(upper_gamma)) {
    const double v = std::exp(log_prefactor + std::log(upper_gamma));
    return CertifiedValue::exact(v).widened(64);
  }
  // Far tail: z^b e^{-z} <= Γ(b+1, z) <= z^b e^{-z} z / (z - b) for z > b.
  if (!(z > b)) throw ToleranceUnreachable("power-log integral is not representable");
  const double log_core = log_prefactor + b * std::log(z) - z;
  return CertifiedValue{std::exp(log_core), std::exp(log_core + std::log(z / (z - b)))}.widened(64);
}

namespace {

constexpr Index kMaxCutoff = 4'000'000;

double g_term(double a, double r, Index j) {
  if (std::isinf(r)) return j <= 1 ? 1.0 : std::pow(static_cast<double>(j), -a);
  if (j == 0) return 1.0;
  const double x = static_cast<double>(j);
  return std::exp(-(a / r) * std::log1p(std::pow(x, r)));
}

}  // namespace

PowerTail1D::PowerTail1D(double a, double r, double tol) : a_(a), r_(r) {
  if (!(a > 1.0)) throw DivergenceError("one-dimensional weight series diverges: exponent " + std::to_string(a) + " <= 1");
  if (!(r > 0.0)) throw DomainError("inner exponent r must be positive");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const double c = std::isinf(r) ? 0.0 : a / r;
  // Alternating series for the integral converges with ratio <= 1/2 here.
  double min_x = 2.0;
  if (!std::isinf(r)) min_x = std::max(min_x, std::pow(2.0 * std::max(c, 1.0), 1.0 / r));
  // Relative bracket width behaves like a(a-1) / (8 N^2).
  const double wanted = std::ceil(std::sqrt(a * (a - 1.0) / (2.0 * tol)));
  cutoff_ = static_cast<Index>(std::min<double>(std::max(wanted, std::ceil(min_x) + 1.0), static_cast<double>(kMaxCutoff)));
  cutoff_ = std::max<Index>(cutoff_, static_cast<Index>(std::ceil(min_x)) + 1);
  suffix_.assign(static_cast<std::size_t>(cutoff_) + 1, 0.0);
  CompensatedSum acc;
  for (Index j = cutoff_; j >= 1; --j) {
    suffix_[static_cast<std::size_t>(j)] = acc.value();
    acc.add(g_term(a_, r_, j));
  }
  suffix_[0] = acc.value();
  beyond_cutoff_ = bracket(cutoff_);
}

double PowerTail1D::term(Index j) const { return g_term(a_, r_, j); }

CertifiedValue PowerTail1D::integral(double x) const {
  if (std::isinf(r_)) {
    const double v = std::exp((1.0 - a_) * std::log(x)) / (a_ - 1.0);
    return CertifiedValue::exact(v).widened(16);
  }
  // (1 + x^r)^{-c} = x^{-a} Σ_m binom(-c, m) x^{-rm}; integrate termwise.
  const double c = a_ / r_;
  const double u = std::pow(x, -r_);
  const double lead = std::exp((1.0 - a_) * std::log(x));
  double coeff = 1.0;  // binom(-c, m) u^m
  double sum = 0.0;
  double prev = 0.0;
  for (int m = 0; m < 400; ++m) {
    const double t = lead * coeff / (a_ + r_ * m - 1.0);
    prev = sum;
    sum += t;
    if (std::abs(t) <= 1e-18 * std::abs(sum)) break;
    coeff *= -(c + m) / (m + 1.0) * u;
  }
  return CertifiedValue{std::min(sum, prev), std::max(sum, prev)}.widened(32);
}

CertifiedValue PowerTail1D::bracket(Index n) const {
  const double next = static_cast<double>(n) + 1.0;
  return convex_tail_bracket(term(n + 1), integral(next), integral(next - 0.5));
}

CertifiedValue PowerTail1D::tail(Index j) const {
  if (j < 0) throw DomainError("tail index must be nonnegative");
  if (j >= cutoff_) return bracket(j);
  const double explicit_part = suffix_[static_cast<std::size_t>(j)];
  return CertifiedValue{explicit_part + beyond_cutoff_.lo, explicit_part + beyond_cutoff_.hi}.widened();
}

CertifiedValue PowerTail1D::full() const {
  const CertifiedValue t = tail(0);
  return CertifiedValue{1.0 + 2.0 * t.lo, 1.0 + 2.0 * t.hi}.widened();
}

}  // namespace nterm
