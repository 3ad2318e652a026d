#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "nterm/numeric.hpp"

namespace nterm {

/// Whether Σ_k λ_k^e converges, as far as a family can tell.
enum class Convergence { converges, diverges, unknown };

/// A positive non-increasing sequence λ_1 >= λ_2 >= ... > 0.
///
/// Implementations are immutable after construction (lazily grown caches
/// are internally synchronized) and may be shared across threads.
class SequenceSource {
 public:
  virtual ~SequenceSource() = default;

  /// λ_n for n >= 1.
  double term(Index n) const;
  /// ln λ_n; stays finite where λ_n underflows.
  double log_term(Index n) const;

  virtual std::string name() const = 0;

  /// inf_k λ_k, which is also the limit.
  virtual double limit() const { return 0.0; }

  /// Convergence of Σ_k λ_k^e.
  virtual Convergence tail_convergence(double e) const = 0;

  /// Σ_{k=1}^m λ_k^e with compensated, range-extended accumulation.
  virtual ExtendedReal prefix_pow_sum(Index m, double e) const;

  /// Enclosure of Σ_{k>n} λ_k^e with relative width <= tol.
  ///
  /// Throws DivergenceError when the series diverges and
  /// ToleranceUnreachable when no certified bracket is available.
  CertifiedValue tail_pow_sum(Index n, double e, double tol = 1e-10) const;

 protected:
  virtual double term_unchecked(Index n) const = 0;
  virtual double log_term_unchecked(Index n) const { return std::log(term_unchecked(n)); }
  virtual CertifiedValue tail_unchecked(Index n, double e, double tol) const;
};

using SourcePtr = std::shared_ptr<const SequenceSource>;

/// λ_n = C n^{-s} (1 + ln n)^β.
///
/// When β > s the raw formula rises before it decays; terms up to the peak
/// index are clamped to the peak value so the sequence is non-increasing.
class PowerLogSequence final : public SequenceSource {
 public:
  PowerLogSequence(double s, double beta, double c = 1.0);

  double s() const { return s_; }
  double beta() const { return beta_; }
  double constant() const { return c_; }
  Index peak_index() const { return peak_; }

  std::string name() const override;
  Convergence tail_convergence(double e) const override;

 protected:
  double term_unchecked(Index n) const override;
  double log_term_unchecked(Index n) const override;
  CertifiedValue tail_unchecked(Index n, double e, double tol) const override;

 private:
  double raw(Index n) const;
  double log_raw(Index n) const;

  double s_;
  double beta_;
  double c_;
  Index peak_ = 1;
};

/// λ_n = C ρ^{n-1} with 0 < ρ <= 1; ρ = 1 gives the constant sequence C.
class GeometricSequence final : public SequenceSource {
 public:
  explicit GeometricSequence(double ratio, double c = 1.0);

  double ratio() const { return ratio_; }
  double constant() const { return c_; }

  std::string name() const override;
  double limit() const override { return ratio_ == 1.0 ? c_ : 0.0; }
  Convergence tail_convergence(double e) const override;

 protected:
  double term_unchecked(Index n) const override;
  double log_term_unchecked(Index n) const override;
  CertifiedValue tail_unchecked(Index n, double e, double tol) const override;

 private:
  double ratio_;
  double c_;
};

/// Explicit leading values followed by a constant positive tail.
///
/// Zero padding is not allowed: the tail constant must be positive and no
/// larger than the last explicit value.
class FiniteSequence final : public SequenceSource {
 public:
  FiniteSequence(std::vector<double> values, double tail_value);

  const std::vector<double>& values() const { return values_; }
  double tail_value() const { return tail_; }

  std::string name() const override;
  double limit() const override { return tail_; }
  Convergence tail_convergence(double e) const override;
  ExtendedReal prefix_pow_sum(Index m, double e) const override;

 protected:
  double term_unchecked(Index n) const override;

 private:
  std::vector<double> values_;
  double tail_;
};

/// c · λ for a positive constant c.
class ScaledSequence final : public SequenceSource {
 public:
  ScaledSequence(SourcePtr inner, double factor);

  std::string name() const override;
  double limit() const override { return factor_ * inner_->limit(); }
  Convergence tail_convergence(double e) const override { return inner_->tail_convergence(e); }
  ExtendedReal prefix_pow_sum(Index m, double e) const override;

 protected:
  double term_unchecked(Index n) const override { return factor_ * inner_->term(n); }
  double log_term_unchecked(Index n) const override { return std::log(factor_) + inner_->log_term(n); }
  CertifiedValue tail_unchecked(Index n, double e, double tol) const override;

 private:
  SourcePtr inner_;
  double factor_;
};

SourcePtr make_power_log(double s, double beta, double c = 1.0);
SourcePtr make_geometric(double ratio, double c = 1.0);
SourcePtr make_finite(std::vector<double> values, double tail_value);
SourcePtr make_scaled(SourcePtr inner, double factor);

}  // namespace nterm
