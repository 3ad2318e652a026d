#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nterm/sequence.hpp"

namespace nterm {

/// Parameter regimes of the width formula.
enum class Regime {
  p_le_q,       ///< (i)   p <= q < ∞
  q_lt_p,       ///< (ii)  q < p < ∞
  p_lt_q_inf,   ///< (iii) p < q = ∞
  q_lt_p_inf,   ///< (iv)  q < p = ∞
  both_inf,     ///< (v)   p = q = ∞
};

/// Roman-numeral tag "i" ... "v".
std::string regime_tag(Regime r);

/// The diagonal operator T_λ : ℓ_p → ℓ_q.
struct DiagonalSpec {
  double p;
  double q;
  SourcePtr source;

  /// Validates p, q and the source; throws DomainError.
  void validate() const;
  Regime regime() const;
};

struct WidthResult {
  CertifiedValue value;
  Regime regime;
  /// n* in case (i) when the supremum is attained, n_* in case (ii).
  std::optional<Index> achiever;
  Index n = 0;
};

/// Largest index any scan may visit for a given n.
Index scan_budget(Index n);

/// σ_n(T_λ) in all five regimes. n = 0 is accepted (nothing dropped).
WidthResult sigma_exact(const DiagonalSpec& spec, Index n, double tol = 1e-10);

/// Smallest m > n with ratio(m) >= ratio(m+1),
/// ratio(m) = (m-n)^{1/q} / (Σ_{k<=m} λ_k^{-p})^{1/p}.
/// Requires p < q < ∞, or p = q < ∞ with λ_k → 0.
Index find_nstar(const DiagonalSpec& spec, Index n);

/// Largest m > n with (m-n) λ_m^{-p} <= Σ_{k<=m} λ_k^{-p}; requires q < p < ∞ and λ_k → 0.
Index find_nlowerstar(const DiagonalSpec& spec, Index n);

/// σ_n of the M-dimensional truncation with diagonal `prefix` (positive,
/// non-increasing, length M > n).
double sigma_finite(double p, double q, const std::vector<double>& prefix, Index n);

}  // namespace nterm
