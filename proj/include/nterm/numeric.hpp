#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "nterm/errors.hpp"

namespace nterm {

using Index = std::int64_t;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// 1/p with the convention 1/inf = 0.
inline double reciprocal(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

/// Validates a sequence-space exponent p in (0, inf].
void require_exponent(double p, const char* name);

/// Closed interval [lo, hi] guaranteed to contain a quantity.
struct CertifiedValue {
  double lo = 0.0;
  double hi = 0.0;

  static CertifiedValue exact(double v) { return {v, v}; }

  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  /// Width relative to the upper end (0 when both ends are 0).
  double relative_width() const { return hi > 0.0 ? (hi - lo) / hi : 0.0; }
  bool contains(double v) const { return lo <= v && v <= hi; }

  CertifiedValue operator+(const CertifiedValue& o) const { return {lo + o.lo, hi + o.hi}; }
  /// Product of two enclosures of nonnegative quantities.
  CertifiedValue operator*(const CertifiedValue& o) const { return {lo * o.lo, hi * o.hi}; }
  CertifiedValue scaled(double c) const { return c >= 0 ? CertifiedValue{lo * c, hi * c} : CertifiedValue{hi * c, lo * c}; }

  /// Widens both ends outward by `ulps` relative units of round-off.
  CertifiedValue widened(double ulps = 8.0) const;
};

/// Positive real stored as mantissa * 2^exponent so that sums of
/// λ_k^{-p} never overflow.
struct ExtendedReal {
  double mantissa = 0.0;
  std::int64_t exponent = 0;

  static ExtendedReal from_log2(double log2_value);
  static ExtendedReal from_double(double v) { return {v, 0}; }

  bool is_zero() const { return mantissa == 0.0; }
  double log() const;   ///< natural logarithm; -inf for zero
  double log2() const;
  /// Value as a double; throws OverflowError when it exceeds the range.
  double value() const;
  ExtendedReal scaled_log2(double log2_factor) const;
};

/// Compensated (Neumaier) accumulator of nonnegative addends that rescales
/// to a mantissa-plus-exponent form once addends leave the range 2^{±600}.
class ExtendedSum {
 public:
  /// Adds x >= 0.
  void add(double x);
  /// Adds 2^l2 without forming it in linear form.
  void add_log2(double l2);
  /// Adds base^power, switching to the log path when it would over/underflow.
  /// `log_base` is ln(base), supplied separately so that bases below the
  /// double range still contribute.
  void add_pow(double base, double power, double log_base);
  void add_pow(double base, double power) { add_pow(base, power, std::log(base)); }

  ExtendedReal result() const;
  double log() const { return result().log(); }

 private:
  void add_scaled(double y);  // y already in units of 2^exponent_
  void rebase(std::int64_t new_exponent);

  double sum_ = 0.0;
  double comp_ = 0.0;
  std::int64_t exponent_ = 0;
};

/// log(1 + e^u) without overflow.
inline double log1p_exp(double u) {
  return u > 35.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

/// Neumaier-compensated sum of doubles in linear form.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace nterm
