#include "nterm/numeric.hpp"

#include <algorithm>
#include <numbers>
#include <string>

namespace nterm {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kRangeExponent = 600;
}  // namespace

void require_exponent(double p, const char* name) {
  if (!(p > 0.0))
    throw DomainError(std::string(name) + " must lie in (0, inf], got " + std::to_string(p));
}

CertifiedValue CertifiedValue::widened(double ulps) const {
  const double f = ulps * kEps;
  auto down = [f](double v) { return v >= 0 ? v * (1.0 - f) : v * (1.0 + f); };
  auto up = [f](double v) { return v >= 0 ? v * (1.0 + f) : v * (1.0 - f); };
  return {down(lo), up(hi)};
}

ExtendedReal ExtendedReal::from_log2(double log2_value) {
  if (std::isinf(log2_value) && log2_value < 0) return {};
  const double whole = std::floor(log2_value);
  return {std::exp2(log2_value - whole), static_cast<std::int64_t>(whole)};
}

double ExtendedReal::log2() const {
  if (mantissa == 0.0) return -kInf;
  return std::log2(mantissa) + static_cast<double>(exponent);
}

double ExtendedReal::log() const {
  if (mantissa == 0.0) return -kInf;
  return std::log(mantissa) + static_cast<double>(exponent) * std::numbers::ln2;
}

double ExtendedReal::value() const {
  if (mantissa == 0.0) return 0.0;
  const double l2 = log2();
  if (l2 >= 1024.0) throw OverflowError("extended value 2^" + std::to_string(l2) + " exceeds double range");
  return std::ldexp(mantissa, static_cast<int>(exponent));
}

ExtendedReal ExtendedReal::scaled_log2(double log2_factor) const {
  if (mantissa == 0.0) return *this;
  const double whole = std::floor(log2_factor);
  ExtendedReal r{mantissa * std::exp2(log2_factor - whole), exponent + static_cast<std::int64_t>(whole)};
  int e = 0;
  r.mantissa = std::frexp(r.mantissa, &e);
  r.exponent += e;
  return r;
}

void ExtendedSum::rebase(std::int64_t new_exponent) {
  const std::int64_t shift = exponent_ - new_exponent;
  const int s = static_cast<int>(std::max<std::int64_t>(std::min<std::int64_t>(shift, 4000), -4000));
  sum_ = std::ldexp(sum_, s);
  comp_ = std::ldexp(comp_, s);
  exponent_ = new_exponent;
}

void ExtendedSum::add_scaled(double y) {
  const double t = sum_ + y;
  if (std::abs(sum_) >= std::abs(y))
    comp_ += (sum_ - t) + y;
  else
    comp_ += (y - t) + sum_;
  sum_ = t;
  if (sum_ != 0.0) {
    const int e = std::ilogb(sum_);
    if (e > kRangeExponent || e < -kRangeExponent) rebase(exponent_ + e);
  }
}

void ExtendedSum::add(double x) {
  if (x == 0.0) return;
  if (!std::isfinite(x) || x < 0.0) throw DomainError("extended sum addends must be finite and nonnegative");
  const int e = std::ilogb(x);
  if (sum_ == 0.0 && exponent_ == 0 && (e > kRangeExponent || e < -kRangeExponent)) exponent_ = e;
  if (e - exponent_ > 1000) rebase(e);
  if (e - exponent_ < -1100) return;
  add_scaled(std::ldexp(x, static_cast<int>(-exponent_)));
}

void ExtendedSum::add_log2(double l2) {
  if (std::isinf(l2) && l2 < 0) return;
  if (!std::isfinite(l2)) throw OverflowError("non-finite log addend in extended sum");
  if (sum_ == 0.0 && (l2 > kRangeExponent || l2 < -kRangeExponent))
    exponent_ = static_cast<std::int64_t>(std::floor(l2));
  const double rel = l2 - static_cast<double>(exponent_);
  if (rel < -1100.0) return;  // below the resolution of the running sum
  if (rel > 1000.0) rebase(static_cast<std::int64_t>(std::floor(l2)));
  add_scaled(std::exp2(l2 - static_cast<double>(exponent_)));
}

void ExtendedSum::add_pow(double base, double power, double log_base) {
  const double l2 = power * log_base / std::numbers::ln2;
  if (std::isnormal(base) && std::abs(l2) < kRangeExponent && exponent_ == 0)
    add(std::pow(base, power));
  else
    add_log2(l2);
}

ExtendedReal ExtendedSum::result() const {
  const double total = sum_ + comp_;
  if (total == 0.0) return {};
  int e = 0;
  const double m = std::frexp(total, &e);
  return {m, exponent_ + e};
}

}  // namespace nterm
