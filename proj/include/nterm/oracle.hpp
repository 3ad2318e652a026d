#pragma once

#include <cstdint>
#include <vector>

#include "nterm/numeric.hpp"

namespace nterm {

/// A point ξ of the unit ball of ℓ_p^M.
struct BallSample {
  double p = 2.0;
  std::vector<double> xi;

  /// Σ|ξ_k|^p (or max|ξ_k| for p = ∞).
  double norm_power() const;
  /// max(0, norm_power() - 1).
  double feasibility_residual() const;
};

/// min over |Γ| = n of ‖(λ_k ξ_k)_{k∉Γ}‖_q: drop the n largest products.
double best_n_term_error(const std::vector<double>& lambda, const std::vector<double>& xi, Index n, double q);

/// ξ supported on 1..m with |ξ_k|^p = λ_k^{-p} / Σ_{j<=m} λ_j^{-p}, so that all
/// products λ_k ξ_k are equal. Length matches `lambda`.
BallSample extremal_vector(const std::vector<double>& lambda, Index m, double p);

/// Deterministic points on the unit sphere of ℓ_p^M (dense, sparse and
/// heavy-tailed draws with random signs); the stream depends on (seed, M, p).
std::vector<BallSample> sample_ball(Index m, double p, Index count, std::uint64_t seed);

struct OptimizerResult {
  double value = 0.0;
  BallSample witness;
};

/// Multi-start coordinate ascent for max over the unit ball of
/// best_n_term_error(λ, ·, n, q). Returns a lower bound with its witness.
/// Requires M = lambda.size() <= 16 and n < M.
OptimizerResult maximize_small(double p, double q, const std::vector<double>& lambda, Index n, int restarts,
                               std::uint64_t seed);

}  // namespace nterm
