#pragma once

#include <string>
#include <vector>

#include "nterm/widths.hpp"

namespace nterm {

/// Decay model λ_n ~ C n^{-s} (ln n)^β.
struct AsymptoticProfile {
  double s;
  double beta;
  double c;
};

/// lim σ_n / (n^{-s-1/p+1/q} (ln n)^β) for a sequence with the given profile.
/// For q < p it needs s > 1/q - 1/p.
double predicted_constant(double p, double q, const AsymptoticProfile& profile);

/// (2^d / (d-1)!)^s.
double mix_reference_constant(double s, int d);

/// S = Σ_{k>=1} (k² + 1)^{-s/(2(s-1))} for s > 1.
///
/// Throws ToleranceUnreachable once s is so close to 1 that the terms
/// underflow (s - 1 below about 4.6e-4).
CertifiedValue energy_S(double s, double tol = 1e-10);

/// (2d)^{s-1} (2S + 1)^{(s-1)(d-1)}.
CertifiedValue energy_constant(double s, int d, double tol = 1e-10);

enum class ConstantTag { H_L2, H_A, A_L2, A_A, H_H1, A_H1 };

std::string tag_name(ConstantTag tag);
/// Parses "H_L2", "H->L2", "H→L2" and the like; throws DomainError.
ConstantTag parse_tag(const std::string& text);

/// The limit constant of the named function-space embedding.
CertifiedValue specialized_constant(ConstantTag tag, double s, int d, double tol = 1e-10);

/// (p, q) and profile through which a tag reduces to predicted_constant.
struct TagReduction {
  double p;
  double q;
  double decay;
  double beta;
  CertifiedValue reference;  ///< enclosure of the profile constant C
};
TagReduction tag_reduction(ConstantTag tag, double s, int d, double tol = 1e-10);

struct RatioDiagnostics {
  std::vector<Index> grid;
  std::vector<double> observed;
  double predicted = 0.0;
  std::vector<double> gap;  ///< observed / predicted - 1
  double last_quartile_mean = 0.0;
  int slope_sign = 0;       ///< sign of the last step of the observed ratios
  std::string trend;        ///< "converging", "diverging" or "mixed"
  double final_gap = 0.0;   ///< |gap| at the largest n
};

/// σ_n / (n^{-s-1/p+1/q} (ln n)^β) over a grid against predicted_constant.
RatioDiagnostics empirical_ratio(const DiagonalSpec& spec, const AsymptoticProfile& profile,
                                 const std::vector<Index>& grid, double tol = 1e-10);

/// λ_n / (n^{-s} (ln n)^β) over a grid against C.
RatioDiagnostics term_ratio(const SequenceSource& source, const AsymptoticProfile& profile,
                            const std::vector<Index>& grid);

/// 10^lo, 10^{lo+1}, ..., 10^hi, with `per_decade` points per decade.
std::vector<Index> geometric_grid(int lo_exponent, int hi_exponent, int per_decade = 1);

}  // namespace nterm
