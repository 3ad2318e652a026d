#include "nterm/asymptotics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "nterm/tail_bounds.hpp"

namespace nterm {

namespace {

// ln(x^{1/x}) with the limit 0 at x = ∞.
double log_self_root(double x) { return std::isinf(x) ? 0.0 : std::log(x) / x; }

void require_profile(const AsymptoticProfile& pr) {
  if (!(pr.s > 0.0) || !std::isfinite(pr.s)) throw DomainError("profile needs s > 0");
  if (!(pr.beta >= 0.0)) throw DomainError("profile needs beta >= 0");
  if (!(pr.c > 0.0)) throw DomainError("profile needs C > 0");
}

double log_predicted_unit(double p, double q, double s) {
  const double ip = reciprocal(p);
  const double iq = reciprocal(q);
  if (p <= q) {
    const double a = s + ip - iq;
    const double b = s + ip;
    return a * std::log(a) - s * std::log(b) + log_self_root(p) - log_self_root(q);
  }
  const double g = iq - ip;
  if (!(s > g)) throw DomainError("q < p needs s > 1/q - 1/p");
  return s * std::log(s / (s + ip)) + g * std::log(iq / (s + ip - iq));
}

void require_dimension(int d) {
  if (d < 1 || d > 16) throw DomainError("dimension must lie in 1..16");
}

CertifiedValue exp_enclosure(double lo, double hi) {
  if (hi > 709.0) throw OverflowError("constant exceeds the double range");
  return CertifiedValue{std::exp(lo), std::exp(hi)}.widened();
}

std::string trend_of(const std::vector<double>& gap) {
  const std::size_t k = std::min<std::size_t>(5, gap.size());
  if (k < 2) return "mixed";
  bool shrinking = true;
  bool growing = true;
  for (std::size_t i = gap.size() - k + 1; i < gap.size(); ++i) {
    const double prev = std::abs(gap[i - 1]);
    const double cur = std::abs(gap[i]);
    if (!(cur < prev)) shrinking = false;
    if (!(cur > prev)) growing = false;
  }
  if (shrinking) return "converging";
  if (growing) return "diverging";
  return "mixed";
}

RatioDiagnostics summarize(std::vector<Index> grid, std::vector<double> observed, double predicted) {
  RatioDiagnostics r;
  r.grid = std::move(grid);
  r.observed = std::move(observed);
  r.predicted = predicted;
  for (double o : r.observed) r.gap.push_back(o / predicted - 1.0);
  const std::size_t n = r.observed.size();
  const std::size_t start = n - std::max<std::size_t>(1, n / 4);
  r.last_quartile_mean =
      std::accumulate(r.observed.begin() + static_cast<std::ptrdiff_t>(start), r.observed.end(), 0.0) /
      static_cast<double>(n - start);
  if (n >= 2) {
    const double step = r.observed[n - 1] - r.observed[n - 2];
    r.slope_sign = step > 0 ? 1 : (step < 0 ? -1 : 0);
  }
  r.trend = trend_of(r.gap);
  r.final_gap = std::abs(r.gap.back());
  return r;
}

void require_grid(const std::vector<Index>& grid) {
  if (grid.empty()) throw DomainError("grid must not be empty");
  if (grid.front() < 3) throw DomainError("grid values must be >= 3");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1]) throw DomainError("grid must be strictly increasing");
}

}  // namespace

double predicted_constant(double p, double q, const AsymptoticProfile& profile) {
  require_exponent(p, "p");
  require_exponent(q, "q");
  require_profile(profile);
  return std::exp(log_predicted_unit(p, q, profile.s) + std::log(profile.c));
}

double mix_reference_constant(double s, int d) {
  if (!(s > 0.0)) throw DomainError("s must be positive");
  if (d < 1) throw DomainError("d must be >= 1");
  if (d <= 20) {
    double fact = 1.0;
    for (int j = 2; j < d; ++j) fact *= j;
    return std::pow(std::ldexp(1.0, d) / fact, s);
  }
  return std::exp(s * (d * std::log(2.0) - std::lgamma(static_cast<double>(d))));
}

CertifiedValue energy_S(double s, double tol) {
  if (!(s > 1.0) || !std::isfinite(s)) throw DomainError("energy series needs s > 1");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const PowerTail1D series(s / (s - 1.0), 2.0, tol);
  const CertifiedValue v = series.tail(0);
  if (!(v.lo > 0.0))
    throw ToleranceUnreachable("energy series underflows for s = " + std::to_string(s) + " (s - 1 too small)");
  if (v.relative_width() > tol)
    throw ToleranceUnreachable("energy series enclosure is wider than the requested tolerance");
  return v;
}

CertifiedValue energy_constant(double s, int d, double tol) {
  if (!(s > 1.0)) throw DomainError("energy constant needs s > 1");
  require_dimension(d);
  const double base = (s - 1.0) * std::log(2.0 * d);
  if (d == 1) return exp_enclosure(base, base);
  const CertifiedValue sv = energy_S(s, tol);
  const double e = (s - 1.0) * (d - 1);
  return exp_enclosure(base + e * std::log1p(2.0 * sv.lo), base + e * std::log1p(2.0 * sv.hi));
}

std::string tag_name(ConstantTag tag) {
  switch (tag) {
    case ConstantTag::H_L2: return "H_L2";
    case ConstantTag::H_A: return "H_A";
    case ConstantTag::A_L2: return "A_L2";
    case ConstantTag::A_A: return "A_A";
    case ConstantTag::H_H1: return "H_H1";
    case ConstantTag::A_H1: return "A_H1";
  }
  return "?";
}

ConstantTag parse_tag(const std::string& text) {
  std::string key;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      key += '_';
      ++i;
    } else if (c == 0xE2 && i + 2 < text.size()) {  // U+2192
      key += '_';
      i += 2;
    } else {
      key += static_cast<char>(std::toupper(c));
    }
  }
  for (ConstantTag t : {ConstantTag::H_L2, ConstantTag::H_A, ConstantTag::A_L2, ConstantTag::A_A, ConstantTag::H_H1,
                        ConstantTag::A_H1})
    if (key == tag_name(t)) return t;
  throw DomainError("unknown constant tag '" + text + "'");
}

CertifiedValue specialized_constant(ConstantTag tag, double s, int d, double tol) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("s must be positive");
  require_dimension(d);
  const double log_mix = s * (d * std::log(2.0) - std::lgamma(static_cast<double>(d)));
  double l = 0.0;
  switch (tag) {
    case ConstantTag::H_L2:
      l = s * std::log(s / (s + 0.5)) + log_mix;
      return exp_enclosure(l, l);
    case ConstantTag::H_A:
      if (!(s > 0.5)) throw DomainError("H_A needs s > 1/2");
      l = s * std::log(s / (s + 0.5)) - 0.5 * std::log(s - 0.5) + log_mix;
      return exp_enclosure(l, l);
    case ConstantTag::A_L2:
      l = (s + 0.5) * std::log(s + 0.5) - s * std::log(s + 1.0) - 0.5 * std::log(2.0) + log_mix;
      return exp_enclosure(l, l);
    case ConstantTag::A_A:
      l = s * std::log(s / (s + 1.0)) + log_mix;
      return exp_enclosure(l, l);
    case ConstantTag::H_H1:
    case ConstantTag::A_H1: {
      if (!(s > 1.0)) throw DomainError(tag_name(tag) + " needs s > 1");
      const double t = s - 1.0;
      const double lead = tag == ConstantTag::H_H1
                              ? t * std::log(t / (t + 0.5))
                              : (t + 0.5) * std::log(t + 0.5) - t * std::log(s) - 0.5 * std::log(2.0);
      const double base = lead + t * std::log(2.0 * d);
      if (d == 1) return exp_enclosure(base, base);
      const CertifiedValue sv = energy_S(s, tol);
      const double e = t * (d - 1);
      return exp_enclosure(base + e * std::log1p(2.0 * sv.lo), base + e * std::log1p(2.0 * sv.hi));
    }
  }
  throw DomainError("unknown constant tag");
}

TagReduction tag_reduction(ConstantTag tag, double s, int d, double tol) {
  switch (tag) {
    case ConstantTag::H_L2:
      return {2.0, 2.0, s, s * (d - 1), CertifiedValue::exact(mix_reference_constant(s, d))};
    case ConstantTag::H_A:
      return {2.0, 1.0, s, s * (d - 1), CertifiedValue::exact(mix_reference_constant(s, d))};
    case ConstantTag::A_L2:
      return {1.0, 2.0, s, s * (d - 1), CertifiedValue::exact(mix_reference_constant(s, d))};
    case ConstantTag::A_A:
      return {1.0, 1.0, s, s * (d - 1), CertifiedValue::exact(mix_reference_constant(s, d))};
    case ConstantTag::H_H1:
      return {2.0, 2.0, s - 1.0, 0.0, energy_constant(s, d, tol)};
    case ConstantTag::A_H1:
      return {1.0, 2.0, s - 1.0, 0.0, energy_constant(s, d, tol)};
  }
  throw DomainError("unknown constant tag");
}

RatioDiagnostics empirical_ratio(const DiagonalSpec& spec, const AsymptoticProfile& profile,
                                 const std::vector<Index>& grid, double tol) {
  require_grid(grid);
  require_profile(profile);
  const double rate = profile.s + reciprocal(spec.p) - reciprocal(spec.q);
  std::vector<double> observed;
  for (Index n : grid) {
    const double x = static_cast<double>(n);
    const double envelope = std::exp(-rate * std::log(x) + profile.beta * std::log(std::log(x)));
    observed.push_back(sigma_exact(spec, n, tol).value.mid() / envelope);
  }
  return summarize(grid, std::move(observed), predicted_constant(spec.p, spec.q, profile));
}

RatioDiagnostics term_ratio(const SequenceSource& source, const AsymptoticProfile& profile,
                            const std::vector<Index>& grid) {
  require_grid(grid);
  require_profile(profile);
  std::vector<double> observed;
  for (Index n : grid) {
    const double x = static_cast<double>(n);
    observed.push_back(std::exp(source.log_term(n) + profile.s * std::log(x) - profile.beta * std::log(std::log(x))));
  }
  return summarize(grid, std::move(observed), profile.c);
}

std::vector<Index> geometric_grid(int lo_exponent, int hi_exponent, int per_decade) {
  if (lo_exponent > hi_exponent || per_decade < 1) throw DomainError("invalid grid bounds");
  std::vector<Index> g;
  for (int e = lo_exponent * per_decade; e <= hi_exponent * per_decade; ++e) {
    const Index v = static_cast<Index>(std::llround(std::pow(10.0, static_cast<double>(e) / per_decade)));
    if (g.empty() || v > g.back()) g.push_back(v);
  }
  return g;
}

}  // namespace nterm
