#include "nterm/widths.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nterm {

namespace {

constexpr double kTieSlack = 1e-15;
constexpr Index kBudgetFloor = 10'000'000;

// Running P_m = Σ_{k<=m} λ_k^{-p} together with ln λ_m^{-p}.
class PrefixScan {
 public:
  PrefixScan(const SequenceSource& src, double p) : src_(src), p_(p) {}

  void advance() {
    ++m_;
    const double t = src_.term(m_);
    const double lt = std::isnormal(t) ? std::log(t) : src_.log_term(m_);
    log_a_ = -p_ * lt;
    sum_.add_pow(t, -p_, lt);
    log_sum_ = sum_.log();
  }
  void advance_to(Index m) {
    while (m_ < m) advance();
  }
  double peek_log_a(Index k) const {
    const double t = src_.term(k);
    return -p_ * (std::isnormal(t) ? std::log(t) : src_.log_term(k));
  }

  Index m() const { return m_; }
  double log_a() const { return log_a_; }
  double log_sum() const { return log_sum_; }

 private:
  const SequenceSource& src_;
  double p_;
  Index m_ = 0;
  ExtendedSum sum_;
  double log_a_ = 0.0;
  double log_sum_ = -kInf;
};

struct ScanHit {
  Index m;
  double log_sum;
};

void require_n(Index n) {
  if (n < 0) throw DomainError("n must be >= 0");
}

[[noreturn]] void budget_exceeded(const char* what, double partial, Index m) {
  throw ScanBudgetExceeded(std::string(what) + " exceeded the scan budget at m = " + std::to_string(m), partial, m);
}

ScanHit nstar_scan(const DiagonalSpec& spec, Index n) {
  const double ip = 1.0 / spec.p;
  const double iq = 1.0 / spec.q;
  const Index budget = scan_budget(n);
  PrefixScan scan(*spec.source, spec.p);
  scan.advance_to(n + 1);
  for (;;) {
    const Index m = scan.m();
    const double gap = static_cast<double>(m - n);
    // ln ratio(m+1) - ln ratio(m)
    const double step = iq * std::log1p(1.0 / gap) - ip * log1p_exp(scan.peek_log_a(m + 1) - scan.log_sum());
    if (step <= kTieSlack) return {m, scan.log_sum()};
    if (m >= budget) budget_exceeded("n* scan", std::exp(iq * std::log(gap) - ip * scan.log_sum()), m);
    scan.advance();
  }
}

ScanHit nlowerstar_scan(const DiagonalSpec& spec, Index n) {
  const Index budget = scan_budget(n);
  PrefixScan scan(*spec.source, spec.p);
  scan.advance_to(n + 1);
  for (;;) {
    const Index m = scan.m();
    // m+1 is feasible iff (m+1-n) a_{m+1} <= P_m + a_{m+1}, i.e. (m-n) a_{m+1} <= P_m.
    const bool next_feasible =
        std::log(static_cast<double>(m - n)) + scan.peek_log_a(m + 1) <= scan.log_sum() + kTieSlack;
    if (!next_feasible) return {m, scan.log_sum()};
    if (m >= budget) budget_exceeded("n_* scan", 0.0, m);
    scan.advance();
  }
}

// p = q: certified scan of sup_{m>n} (m-n) / P_m, all in logs.
WidthResult equal_exponent_scan(const DiagonalSpec& spec, Index n, double tol) {
  const double p = spec.p;
  const double limit = spec.source->limit();
  const double log_limit = limit > 0.0 ? p * std::log(limit) : -kInf;
  const double slack = p * std::log1p(tol);
  const Index budget = scan_budget(n);
  PrefixScan scan(*spec.source, p);
  scan.advance_to(n + 1);
  double best = -kInf;
  Index best_m = 0;
  for (;;) {
    const Index m = scan.m();
    const double log_gap = std::log(static_cast<double>(m - n));
    const double g = log_gap - scan.log_sum();
    if (g > best) {
      best = g;
      best_m = m;
    }
    // For m' >= m, P_{m'} >= P_m + (m'-m) a_m, and (m'-n)/(P_m + (m'-m) a_m) is
    // monotone in m': it is bounded by its value at m or by its limit 1/a_m.
    const bool decreasing = log_gap + scan.log_a() >= scan.log_sum();
    const double upper = std::max(best, decreasing ? g : -scan.log_a());
    const double lower = std::max(best, log_limit);
    WidthResult r{{}, Regime::p_le_q, std::nullopt, n};
    if (upper <= best) {
      r.value = CertifiedValue::exact(std::exp(best / p));
      r.achiever = best_m;
      return r;
    }
    if (upper - lower <= slack) {
      r.value = CertifiedValue{std::exp(lower / p), std::exp(upper / p)};
      return r;
    }
    if (m >= budget) budget_exceeded("supremum scan", std::exp(lower / p), m);
    scan.advance();
  }
}

double pow_extended(const ExtendedReal& x, double e) {
  if (x.exponent == 0) return std::pow(x.mantissa, e);
  return std::exp2(e * x.log2());
}

void require_vanishing(const DiagonalSpec& spec, const char* what) {
  if (spec.source->limit() > 0.0)
    throw DomainError(std::string(what) + " needs a sequence tending to zero; " + spec.source->name() +
                      " has a positive limit");
}

}  // namespace

std::string regime_tag(Regime r) {
  switch (r) {
    case Regime::p_le_q: return "i";
    case Regime::q_lt_p: return "ii";
    case Regime::p_lt_q_inf: return "iii";
    case Regime::q_lt_p_inf: return "iv";
    case Regime::both_inf: return "v";
  }
  return "?";
}

void DiagonalSpec::validate() const {
  require_exponent(p, "p");
  require_exponent(q, "q");
  if (!source) throw DomainError("diagonal operator needs a sequence source");
}

Regime DiagonalSpec::regime() const {
  validate();
  const bool pinf = std::isinf(p);
  const bool qinf = std::isinf(q);
  if (pinf && qinf) return Regime::both_inf;
  if (qinf) return Regime::p_lt_q_inf;
  if (pinf) return Regime::q_lt_p_inf;
  return p <= q ? Regime::p_le_q : Regime::q_lt_p;
}

Index scan_budget(Index n) { return std::max<Index>(kBudgetFloor, 1000 * n); }

Index find_nstar(const DiagonalSpec& spec, Index n) {
  require_n(n);
  if (spec.regime() != Regime::p_le_q) throw DomainError("n* is defined for p <= q < inf");
  if (spec.p == spec.q) require_vanishing(spec, "n* with p = q");
  return nstar_scan(spec, n).m;
}

Index find_nlowerstar(const DiagonalSpec& spec, Index n) {
  require_n(n);
  if (spec.regime() != Regime::q_lt_p) throw DomainError("n_* is defined for q < p < inf");
  require_vanishing(spec, "n_*");
  return nlowerstar_scan(spec, n).m;
}

WidthResult sigma_exact(const DiagonalSpec& spec, Index n, double tol) {
  require_n(n);
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const Regime regime = spec.regime();
  const SequenceSource& src = *spec.source;
  WidthResult r{{}, regime, std::nullopt, n};
  switch (regime) {
    case Regime::both_inf:
      r.value = CertifiedValue::exact(src.term(n + 1));
      return r;
    case Regime::p_lt_q_inf:
      r.value = CertifiedValue::exact(pow_extended(src.prefix_pow_sum(n + 1, -spec.p), -1.0 / spec.p));
      return r;
    case Regime::q_lt_p_inf: {
      const CertifiedValue t = src.tail_pow_sum(n, spec.q, tol / 2.0);
      const double iq = 1.0 / spec.q;
      r.value = CertifiedValue{std::pow(t.lo, iq), std::pow(t.hi, iq)}.widened();
      return r;
    }
    case Regime::p_le_q: {
      if (spec.p == spec.q) return equal_exponent_scan(spec, n, tol);
      const ScanHit hit = nstar_scan(spec, n);
      const double lr = std::log(static_cast<double>(hit.m - n)) / spec.q - hit.log_sum / spec.p;
      r.value = CertifiedValue::exact(std::exp(lr));
      r.achiever = hit.m;
      return r;
    }
    case Regime::q_lt_p: {
      const double p = spec.p;
      const double q = spec.q;
      const double alpha = p * q / (p - q);
      if (src.tail_convergence(alpha) == Convergence::diverges)
        throw DivergenceError("series of " + src.name() + " to the power " + std::to_string(alpha) + " diverges");
      require_vanishing(spec, "case (ii)");
      const ScanHit hit = nlowerstar_scan(spec, n);
      const double gamma = 1.0 / q - 1.0 / p;
      const double log_x = (p / (p - q)) * std::log(static_cast<double>(hit.m - n)) - (q / (p - q)) * hit.log_sum;
      const double x = std::exp(log_x);
      const CertifiedValue tail = src.tail_pow_sum(hit.m, alpha, tol / (2.0 * std::max(1.0, gamma)));
      r.value = CertifiedValue{std::pow(x + tail.lo, gamma), std::pow(x + tail.hi, gamma)}.widened();
      r.achiever = hit.m;
      return r;
    }
  }
  return r;
}

double sigma_finite(double p, double q, const std::vector<double>& prefix, Index n) {
  require_exponent(p, "p");
  require_exponent(q, "q");
  require_n(n);
  const Index big_m = static_cast<Index>(prefix.size());
  if (n >= big_m) throw DomainError("sigma_finite needs n < M");
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (!(prefix[i] > 0.0) || !std::isfinite(prefix[i])) throw DomainError("prefix values must be positive");
    if (i > 0 && prefix[i] > prefix[i - 1]) throw DomainError("prefix values must be non-increasing");
  }
  auto lam = [&](Index k) { return prefix[static_cast<std::size_t>(k - 1)]; };
  const bool pinf = std::isinf(p);
  const bool qinf = std::isinf(q);
  if (pinf && qinf) return lam(n + 1);
  if (pinf) {
    CompensatedSum s;
    for (Index k = n + 1; k <= big_m; ++k) s.add(std::pow(lam(k), q));
    return std::pow(s.value(), 1.0 / q);
  }
  const double iq = reciprocal(q);
  if (p <= q) {
    ExtendedSum sum;
    double best = -kInf;
    for (Index m = 1; m <= big_m; ++m) {
      sum.add_pow(lam(m), -p);
      if (m <= n) continue;
      best = std::max(best, iq * std::log(static_cast<double>(m - n)) - sum.log() / p);
    }
    return std::exp(best);
  }
  // q < p < ∞ on the truncation: n_* is capped at M.
  ExtendedSum sum;
  for (Index m = 1; m <= n + 1; ++m) sum.add_pow(lam(m), -p);
  Index nl = n + 1;
  while (nl < big_m &&
         std::log(static_cast<double>(nl - n)) - p * std::log(lam(nl + 1)) <= sum.log() + kTieSlack) {
    ++nl;
    sum.add_pow(lam(nl), -p);
  }
  const double alpha = p * q / (p - q);
  const double x = std::exp((p / (p - q)) * std::log(static_cast<double>(nl - n)) - (q / (p - q)) * sum.log());
  CompensatedSum tail;
  for (Index k = nl + 1; k <= big_m; ++k) tail.add(std::pow(lam(k), alpha));
  return std::pow(x + tail.value(), 1.0 / q - 1.0 / p);
}

}  // namespace nterm
