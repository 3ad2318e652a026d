#include "nterm/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nterm/tail_bounds.hpp"

namespace nterm {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require_index(Index n) {
  if (n < 1) throw DomainError("sequence index must be >= 1, got " + std::to_string(n));
}

}  // namespace

double SequenceSource::term(Index n) const {
  require_index(n);
  return term_unchecked(n);
}

double SequenceSource::log_term(Index n) const {
  require_index(n);
  return log_term_unchecked(n);
}

ExtendedReal SequenceSource::prefix_pow_sum(Index m, double e) const {
  require_index(m);
  ExtendedSum acc;
  for (Index k = 1; k <= m; ++k) {
    const double t = term_unchecked(k);
    acc.add_pow(t, e, std::isnormal(t) ? std::log(t) : log_term_unchecked(k));
  }
  return acc.result();
}

CertifiedValue SequenceSource::tail_pow_sum(Index n, double e, double tol) const {
  if (n < 0) throw DomainError("tail start must be >= 0");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (tail_convergence(e) == Convergence::diverges)
    throw DivergenceError("series of " + name() + " to the power " + fmt(e) + " diverges");
  const CertifiedValue v = tail_unchecked(n, e, tol);
  if (v.relative_width() > tol)
    throw ToleranceUnreachable("tail enclosure of " + name() + " has relative width " + fmt(v.relative_width()) +
                               " above tolerance " + fmt(tol));
  return v;
}

CertifiedValue SequenceSource::tail_unchecked(Index, double, double) const {
  throw ToleranceUnreachable(name() + " provides no certified tail rule");
}

// ---------------------------------------------------------------- power-log

PowerLogSequence::PowerLogSequence(double s, double beta, double c) : s_(s), beta_(beta), c_(c) {
  if (!(s > 0.0)) throw DomainError("power-log decay exponent s must be positive");
  if (!(beta >= 0.0)) throw DomainError("power-log exponent beta must be nonnegative");
  if (!(c > 0.0)) throw DomainError("power-log constant C must be positive");
  if (beta > s) {
    // (1 + ln x)^β x^{-s} peaks at 1 + ln x = β/s.
    const double x = std::exp(beta / s - 1.0);
    const Index lo = std::max<Index>(1, static_cast<Index>(std::floor(x)));
    peak_ = raw(lo + 1) > raw(lo) ? lo + 1 : lo;
  }
}

double PowerLogSequence::raw(Index n) const {
  const double x = static_cast<double>(n);
  const double logs = beta_ == 0.0 ? 1.0 : std::pow(1.0 + std::log(x), beta_);
  return c_ * std::pow(x, -s_) * logs;
}

double PowerLogSequence::log_raw(Index n) const {
  const double x = static_cast<double>(n);
  return std::log(c_) - s_ * std::log(x) + beta_ * std::log1p(std::log(x));
}

double PowerLogSequence::term_unchecked(Index n) const { return raw(std::max(n, peak_)); }
double PowerLogSequence::log_term_unchecked(Index n) const { return log_raw(std::max(n, peak_)); }

std::string PowerLogSequence::name() const {
  return "power_log(s=" + fmt(s_) + ",beta=" + fmt(beta_) + ",C=" + fmt(c_) + ")";
}

Convergence PowerLogSequence::tail_convergence(double e) const {
  return s_ * e > 1.0 ? Convergence::converges : Convergence::diverges;
}

CertifiedValue PowerLogSequence::tail_unchecked(Index n, double e, double tol) const {
  const double a = s_ * e;
  const double b = beta_ * e;
  const double x0 = powerlog_convex_from(a, b);
  const double wanted = std::ceil(std::sqrt(a * (a - 1.0) / (2.0 * tol)) * (1.0 + b));
  Index cut = std::max({n, peak_, static_cast<Index>(std::ceil(x0 + 0.5)), static_cast<Index>(std::min(wanted, 5e7))});
  const double scale = std::exp(e * std::log(c_));
  for (int attempt = 0;; ++attempt) {
    CompensatedSum explicit_part;
    for (Index k = n + 1; k <= cut; ++k) explicit_part.add(std::pow(term_unchecked(k), e));
    const double next = static_cast<double>(cut) + 1.0;
    const double f_next = std::exp(-a * std::log(next) + b * std::log1p(std::log(next)));
    const CertifiedValue rest =
        convex_tail_bracket(f_next, powerlog_integral(a, b, next), powerlog_integral(a, b, next - 0.5)).scaled(scale);
    const CertifiedValue total = CertifiedValue{explicit_part.value() + rest.lo, explicit_part.value() + rest.hi}.widened();
    if (total.relative_width() <= tol || attempt >= 3) return total;
    cut *= 4;
  }
}

// ---------------------------------------------------------------- geometric

GeometricSequence::GeometricSequence(double ratio, double c) : ratio_(ratio), c_(c) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw DomainError("geometric ratio must lie in (0, 1]");
  if (!(c > 0.0)) throw DomainError("geometric constant must be positive");
}

double GeometricSequence::term_unchecked(Index n) const {
  return c_ * std::pow(ratio_, static_cast<double>(n - 1));
}

double GeometricSequence::log_term_unchecked(Index n) const {
  return std::log(c_) + static_cast<double>(n - 1) * std::log(ratio_);
}

std::string GeometricSequence::name() const { return "geometric(ratio=" + fmt(ratio_) + ",C=" + fmt(c_) + ")"; }

Convergence GeometricSequence::tail_convergence(double e) const {
  return (ratio_ < 1.0 && e > 0.0) ? Convergence::converges : Convergence::diverges;
}

CertifiedValue GeometricSequence::tail_unchecked(Index n, double e, double) const {
  // Σ_{k>n} (C ρ^{k-1})^e = C^e ρ^{ne} / (1 - ρ^e)
  const double lr = e * std::log(ratio_);
  const double v = std::exp(e * std::log(c_) + static_cast<double>(n) * lr) / -std::expm1(lr);
  return CertifiedValue::exact(v).widened(16);
}

// ---------------------------------------------------------------- finite

FiniteSequence::FiniteSequence(std::vector<double> values, double tail_value)
    : values_(std::move(values)), tail_(tail_value) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i]))
      throw DomainError("finite sequence values must be positive and finite (entry " + std::to_string(i + 1) + ")");
    if (i > 0 && values_[i] > values_[i - 1])
      throw DomainError("finite sequence values must be non-increasing (entry " + std::to_string(i + 1) + ")");
  }
  if (!(tail_ > 0.0)) throw DomainError("finite sequence tail constant must be positive");
  if (!values_.empty() && tail_ > values_.back())
    throw DomainError("finite sequence tail constant exceeds the last explicit value");
}

double FiniteSequence::term_unchecked(Index n) const {
  return static_cast<std::size_t>(n) <= values_.size() ? values_[static_cast<std::size_t>(n - 1)] : tail_;
}

std::string FiniteSequence::name() const {
  return "finite(" + std::to_string(values_.size()) + " values, tail=" + fmt(tail_) + ")";
}

Convergence FiniteSequence::tail_convergence(double) const { return Convergence::diverges; }

ExtendedReal FiniteSequence::prefix_pow_sum(Index m, double e) const {
  require_index(m);
  ExtendedSum acc;
  const Index explicit_count = std::min<Index>(m, static_cast<Index>(values_.size()));
  for (Index k = 1; k <= explicit_count; ++k) acc.add_pow(values_[static_cast<std::size_t>(k - 1)], e);
  if (m > explicit_count) {
    const double l2 = std::log2(static_cast<double>(m - explicit_count)) + e * std::log2(tail_);
    acc.add_log2(l2);
  }
  return acc.result();
}

// ---------------------------------------------------------------- scaled

ScaledSequence::ScaledSequence(SourcePtr inner, double factor) : inner_(std::move(inner)), factor_(factor) {
  if (!inner_) throw DomainError("scaled sequence needs an inner source");
  if (!(factor > 0.0) || !std::isfinite(factor)) throw DomainError("scale factor must be positive and finite");
}

std::string ScaledSequence::name() const { return fmt(factor_) + "*" + inner_->name(); }

ExtendedReal ScaledSequence::prefix_pow_sum(Index m, double e) const {
  return inner_->prefix_pow_sum(m, e).scaled_log2(e * std::log2(factor_));
}

CertifiedValue ScaledSequence::tail_unchecked(Index n, double e, double tol) const {
  const double f = std::exp(e * std::log(factor_));
  return inner_->tail_pow_sum(n, e, tol).scaled(f).widened(2);
}

SourcePtr make_power_log(double s, double beta, double c) { return std::make_shared<PowerLogSequence>(s, beta, c); }
SourcePtr make_geometric(double ratio, double c) { return std::make_shared<GeometricSequence>(ratio, c); }
SourcePtr make_finite(std::vector<double> values, double tail_value) {
  return std::make_shared<FiniteSequence>(std::move(values), tail_value);
}
SourcePtr make_scaled(SourcePtr inner, double factor) {
  return std::make_shared<ScaledSequence>(std::move(inner), factor);
}

}  // namespace nterm
