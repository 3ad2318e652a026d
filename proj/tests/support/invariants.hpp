#pragma once

// Randomized invariant checks shared by the property tests and the
// acceptance binary. Each returns the list of violations it found.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "nterm/lattice.hpp"
#include "nterm/widths.hpp"
#include "support/oracles.hpp"

namespace invariants {

using nterm::Index;
using Violations = std::vector<std::string>;

struct Case {
  nterm::SourcePtr source;
  std::string label;
};

inline Case random_source(oracle::Gen& g, bool allow_lattice = true) {
  switch (g.integer(0, allow_lattice ? 4 : 3)) {
    case 0: {
      const double s = g.uniform(0.3, 3.0);
      const double b = g.pick(std::vector<double>{0.0, 0.5, 1.0, 2.0});
      return {nterm::make_power_log(s, b, g.uniform(0.5, 3.0)), "power_log s=" + std::to_string(s)};
    }
    case 1: {
      const double r = g.uniform(0.3, 0.95);
      return {nterm::make_geometric(r, g.uniform(0.5, 3.0)), "geometric " + std::to_string(r)};
    }
    case 2: {
      auto v = g.prefix(g.integer(1, 8));
      const double tail = v.back() * g.uniform(0.2, 1.0);
      return {nterm::make_finite(v, tail), "finite"};
    }
    case 3:
      return {nterm::make_scaled(nterm::make_power_log(g.uniform(0.6, 2.0), 0.0), g.uniform(0.1, 10.0)), "scaled"};
    default: {
      const int d = static_cast<int>(g.integer(1, 2));
      const double s = g.pick(std::vector<double>{1.0, 1.5, 2.0});
      const double r = g.coin() ? nterm::kInf : 2.0;
      return {nterm::rearranged_source(nterm::WeightFamily::mixed(s, r, d)), "lattice d=" + std::to_string(d)};
    }
  }
}

inline std::string describe(const std::string& what, const Case& c, double p, double q, Index n) {
  std::ostringstream os;
  os << what << " [" << c.label << " p=" << p << " q=" << q << " n=" << n << "]";
  return os.str();
}

/// Widths computed under a size budget; errors other than divergence count
/// as violations, divergence only skips the draw.
template <class F>
bool guarded(Violations& v, const std::string& where, F&& f) {
  try {
    f();
    return true;
  } catch (const nterm::DivergenceError&) {
    return false;
  } catch (const std::exception& e) {
    v.push_back(where + ": " + e.what());
    return false;
  }
}

inline Violations monotone_in_n(oracle::Gen& g, int trials) {
  Violations v;
  for (int t = 0; t < trials; ++t) {
    const Case c = random_source(g);
    const double p = g.exponent();
    const double q = g.exponent();
    const Index n = g.integer(0, 150);
    const nterm::DiagonalSpec spec{p, q, c.source};
    guarded(v, describe("monotone", c, p, q, n), [&] {
      const auto a = nterm::sigma_exact(spec, n);
      const auto b = nterm::sigma_exact(spec, n + 1);
      if (b.value.lo > a.value.hi * (1 + 1e-12)) v.push_back(describe("sigma increased", c, p, q, n));
    });
  }
  return v;
}

inline Violations homogeneous(oracle::Gen& g, int trials) {
  Violations v;
  for (int t = 0; t < trials; ++t) {
    const Case c = random_source(g, false);
    const double factor = g.uniform(0.1, 10.0);
    const double p = g.exponent();
    const double q = g.exponent();
    const Index n = g.integer(0, 100);
    guarded(v, describe("homogeneity", c, p, q, n), [&] {
      const auto a = nterm::sigma_exact({p, q, c.source}, n);
      const auto b = nterm::sigma_exact({p, q, nterm::make_scaled(c.source, factor)}, n);
      const double slack = 1e-12 * factor * a.value.mid() + 0.5 * (b.value.width() + factor * a.value.width());
      if (std::abs(b.value.mid() - factor * a.value.mid()) > slack)
        v.push_back(describe("scaling broke homogeneity", c, p, q, n));
    });
  }
  return v;
}

inline double log_ratio(const nterm::SequenceSource& src, double p, double q, Index n, Index m) {
  return std::log(static_cast<double>(m - n)) / q - src.prefix_pow_sum(m, -p).log() / p;
}

inline Violations unimodal_case_i(oracle::Gen& g, int trials) {
  Violations v;
  for (int t = 0; t < trials; ++t) {
    Case c = random_source(g);
    const double p = g.pick(std::vector<double>{0.5, 1.0, 1.5, 2.0});
    const double q = p * g.uniform(1.1, 3.0);
    const Index n = g.integer(0, 120);
    const nterm::DiagonalSpec spec{p, q, c.source};
    guarded(v, describe("unimodality", c, p, q, n), [&] {
      const Index ns = nterm::find_nstar(spec, n);
      if (ns > 20000) return;
      for (Index m = n + 1; m < ns; ++m)
        if (!(log_ratio(*c.source, p, q, n, m) < log_ratio(*c.source, p, q, n, m + 1)))
          v.push_back(describe("ratio not increasing before n*", c, p, q, n));
      for (Index m = ns; m < ns + 50; ++m)
        if (log_ratio(*c.source, p, q, n, m + 1) > log_ratio(*c.source, p, q, n, m) + 1e-15)
          v.push_back(describe("ratio increases after n*", c, p, q, n));
      const auto w = nterm::sigma_exact(spec, n);
      const double at = std::exp(log_ratio(*c.source, p, q, n, ns));
      if (!w.achiever || *w.achiever != ns || oracle::rel_diff(w.value.mid(), at) > 1e-14)
        v.push_back(describe("value is not ratio(n*)", c, p, q, n));
    });
  }
  return v;
}

inline Violations contiguous_case_ii(oracle::Gen& g, int trials) {
  Violations v;
  for (int t = 0; t < trials; ++t) {
    Case c = random_source(g);
    const double q = g.pick(std::vector<double>{0.5, 1.0, 1.5, 2.0});
    const double p = q * g.uniform(1.1, 3.0);
    const Index n = g.integer(0, 120);
    const nterm::DiagonalSpec spec{p, q, c.source};
    if (c.source->limit() > 0.0) continue;
    guarded(v, describe("contiguity", c, p, q, n), [&] {
      const Index ns = nterm::find_nlowerstar(spec, n);
      if (ns > 20000) return;
      auto holds = [&](Index m) {
        return std::log(static_cast<double>(m - n)) - p * c.source->log_term(m) <=
               c.source->prefix_pow_sum(m, -p).log() + 1e-15;
      };
      for (Index m = n + 1; m <= ns; ++m)
        if (!holds(m)) v.push_back(describe("interval has a gap", c, p, q, n));
      if (holds(ns + 1)) v.push_back(describe("n_*+1 still feasible", c, p, q, n));
    });
  }
  return v;
}

inline Violations count_nth_duality(oracle::Gen& g, int trials) {
  Violations v;
  for (int t = 0; t < trials; ++t) {
    const int d = static_cast<int>(g.integer(1, 3));
    const bool energy = g.coin(0.3);
    const double s = g.pick(std::vector<double>{1.0, 1.5, 2.0, 3.0});
    const auto fam = energy ? nterm::WeightFamily::energy(s + 0.5, d)
                            : nterm::WeightFamily::mixed(s, g.coin() ? nterm::kInf : 2.0, d);
    const Index n = g.integer(1, 5000);
    const double w = fam.nth_smallest_weight(n);
    if (fam.count_leq(w) < n) v.push_back(fam.name() + ": count_leq(nth(n)) < n at n=" + std::to_string(n));
    if (fam.count_leq(std::nextafter(w, 0.0)) >= n)
      v.push_back(fam.name() + ": nth(n) is not the smallest threshold at n=" + std::to_string(n));
    const double t1 = g.uniform(1.0, 40.0);
    const double t2 = t1 * g.uniform(1.0, 2.0);
    if (fam.count_leq(t1) > fam.count_leq(t2)) v.push_back(fam.name() + ": count_leq decreased");
  }
  return v;
}

}  // namespace invariants
