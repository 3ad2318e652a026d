// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nterm/asymptotics.hpp"
#include "nterm/lattice.hpp"
#include "nterm/oracle.hpp"
#include "nterm/widths.hpp"
#include "support/invariants.hpp"
#include "support/oracles.hpp"

using namespace nterm;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

const std::vector<double> kExponents{0.5, 1.0, 2.0, 3.0};

struct Config {
  double p;
  double q;
  std::vector<double> lambda;
  Index n;
};

/// 50 random (prefix, M, n) draws for every (p, q) accepted by `keep`.
std::vector<Config> grid(std::uint64_t seed, const std::function<bool(double, double)>& keep) {
  oracle::Gen g(seed);
  std::vector<Config> out;
  for (double p : kExponents)
    for (double q : kExponents) {
      if (!keep(p, q)) continue;
      for (int t = 0; t < 50; ++t) {
        const Index m = g.integer(2, 12);
        out.push_back({p, q, g.prefix(m), g.integer(0, m - 1)});
      }
    }
  return out;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome finite_formula() {
  double worst = 0.0;
  for (const Config& c : grid(1, [](double p, double q) { return p <= q; })) {
    double best = 0.0;
    for (Index m = c.n + 1; m <= static_cast<Index>(c.lambda.size()); ++m)
      best = std::max(best, best_n_term_error(c.lambda, extremal_vector(c.lambda, m, c.p).xi, c.n, c.q));
    worst = std::max(worst, oracle::rel_diff(best, sigma_finite(c.p, c.q, c.lambda, c.n)));
  }
  return {worst <= 1e-10, fmt("max relative gap %.3g (tol 1e-10)", worst)};
}

Outcome optimizer() {
  double under = 0.0;
  double over = -kInf;
  for (const Config& c : grid(2, [](double p, double q) { return q < p; })) {
    const double f = sigma_finite(c.p, c.q, c.lambda, c.n);
    const double v = maximize_small(c.p, c.q, c.lambda, c.n, 64, 7).value;
    under = std::max(under, f - v);
    over = std::max(over, v - f);
  }
  return {under <= 1e-6 && over <= 1e-9, fmt("max shortfall %.3g (tol 1e-6), max excess %.3g (tol 1e-9)", under, over)};
}

Outcome domination() {
  double margin = -kInf;
  std::uint64_t seed = 0;
  for (const Config& c : grid(3, [](double, double) { return true; })) {
    const double f = sigma_finite(c.p, c.q, c.lambda, c.n);
    for (const auto& b : sample_ball(static_cast<Index>(c.lambda.size()), c.p, 10000, ++seed))
      margin = std::max(margin, best_n_term_error(c.lambda, b.xi, c.n, c.q) - f);
  }
  return {margin <= 1e-12, fmt("max sample minus formula %.3g (tol 1e-12)", margin)};
}

Outcome infinite_coherence() {
  bool ok = true;
  std::ostringstream os;
  const auto src = make_geometric(0.5, 0.5);
  for (auto [p, q] : {std::pair{2.0, 1.0}, {3.0, 1.0}, {3.0, 2.0}}) {
    const WidthResult full = sigma_exact({p, q, src}, 1, 1e-12);
    double prev = 0.0;
    bool monotone = true;
    for (Index m : {8, 12, 16, 20}) {
      std::vector<double> lam;
      for (Index k = 1; k <= m; ++k) lam.push_back(src->term(k));
      const double f = sigma_finite(p, q, lam, 1);
      monotone = monotone && f >= prev && f <= full.value.hi;
      prev = f;
    }
    const double gap = full.value.hi - prev;
    ok = ok && monotone && gap <= 1e-8;
    os << "(" << p << "," << q << ") gap " << gap << (monotone ? "" : " non-monotone") << "; ";
  }
  return {ok, os.str()};
}

Outcome scan_asymptotics() {
  bool ok = true;
  std::ostringstream os;
  const Index n = 10000;
  for (double s : {1.0, 2.0}) {
    const auto src = make_power_log(s, 0);
    const double up = static_cast<double>(find_nstar({1, 2, src}, n)) / n;
    const double up_pred = 1 + 1 / (2 * s + 2 - 1);
    const double low = static_cast<double>(find_nlowerstar({2, 1, src}, n)) / n;
    const double low_pred = 1 + 1 / (2 * s);
    ok = ok && std::abs(up / up_pred - 1) <= 0.05 && std::abs(low / low_pred - 1) <= 0.02;
    os << "s=" << s << ": n*/n " << up << " vs " << up_pred << ", n_*/n " << low << " vs " << low_pred << "; ";
  }
  return {ok, os.str()};
}

Outcome rearrangement() {
  bool ok = true;
  std::ostringstream os;
  const Index n = 100000;
  for (int d : {1, 2, 3})
    for (double s : {1.0, 2.0})
      for (double r : {2.0, kInf}) {
        RearrangementStream st(WeightFamily::mixed(s, r, d));
        std::vector<Point> emitted;
        std::vector<double> weights;
        for (Index i = 0; i < n; ++i) {
          auto e = st.next();
          emitted.push_back(std::move(e.point));
          weights.push_back(e.weight);
        }
        const double last = weights.back();
        std::sort(emitted.begin(), emitted.end());
        bool same = std::adjacent_find(emitted.begin(), emitted.end()) == emitted.end();
        // brute force: all points of weight <= last; those strictly lighter
        // must all be emitted, ties at `last` fill the remainder
        std::vector<std::pair<oracle::LD, Point>> brute;
        for (const auto& k : oracle::mixed_points_leq(s, r, d, last * (1 + 1e-12)))
          brute.emplace_back(oracle::mixed_weight(k, s, r), Point(k.begin(), k.end()));
        std::sort(brute.begin(), brute.end());
        Index below = 0;
        for (const auto& [w, k] : brute)
          if (w < last * (1 - 1e-12)) {
            ++below;
            same = same && std::binary_search(emitted.begin(), emitted.end(), k);
          }
        same = same && below <= n && static_cast<Index>(brute.size()) >= n;
        for (Index i = 0; i < n && same; ++i)
          same = std::abs(static_cast<double>(brute[static_cast<std::size_t>(i)].first) / weights[static_cast<std::size_t>(i)] - 1) < 1e-12;
        if (!same) os << "mismatch d=" << d << " s=" << s << " r=" << r << "; ";
        ok = ok && same;
      }
  if (ok) os << "12 families, " << n << " emissions each";
  return {ok, os.str()};
}

Outcome lattice_asymptotics() {
  bool ok = true;
  std::ostringstream os;
  for (double s : {1.0, 2.0}) {
    const auto src = rearranged_source(WeightFamily::mixed(s, kInf, 1));
    const double v = src->term(1000000) * std::pow(1e6, s);
    const double target = std::pow(2.0, s);
    ok = ok && std::abs(v / target - 1) <= 0.01;
    os << "d=1 s=" << s << ": " << v << " vs " << target << "; ";
  }
  for (double s : {1.0, 2.0}) {
    const auto src = rearranged_source(WeightFamily::mixed(s, kInf, 2));
    const RatioDiagnostics d = term_ratio(*src, {s, s, std::pow(4.0, s)}, geometric_grid(3, 6));
    bool shrinking = true;
    for (std::size_t i = 1; i < d.gap.size(); ++i) shrinking = shrinking && std::abs(d.gap[i]) < std::abs(d.gap[i - 1]);
    ok = ok && d.trend == "converging" && shrinking;
    os << "d=2 s=" << s << ": " << d.trend << " gaps";
    for (double g : d.gap) os << " " << g;
    os << "; ";
  }
  return {ok, os.str()};
}

Outcome constant_identities() {
  struct Row {
    ConstantTag tag;
    double p;
    double q;
    bool energy;
  };
  const std::vector<Row> rows{{ConstantTag::H_L2, 2, 2, false}, {ConstantTag::H_A, 2, 1, false},
                              {ConstantTag::A_L2, 1, 2, false}, {ConstantTag::A_A, 1, 1, false},
                              {ConstantTag::H_H1, 2, 2, true},  {ConstantTag::A_H1, 1, 2, true}};
  double worst = 0.0;
  for (int d = 1; d <= 5; ++d)
    for (int i = 0; i < 20; ++i) {
      const double s = 1.1 + 0.2 * i;
      for (const Row& r : rows) {
        const CertifiedValue c = specialized_constant(r.tag, s, d);
        CertifiedValue ref;
        AsymptoticProfile prof{};
        if (r.energy) {
          ref = energy_constant(s, d);
          prof = {s - 1, 0, 0};
        } else {
          ref = CertifiedValue::exact(mix_reference_constant(s, d));
          prof = {s, s * (d - 1), 0};
        }
        prof.c = ref.lo;
        worst = std::max(worst, oracle::rel_diff(c.lo, predicted_constant(r.p, r.q, prof)));
        prof.c = ref.hi;
        worst = std::max(worst, oracle::rel_diff(c.hi, predicted_constant(r.p, r.q, prof)));
      }
    }
  return {worst <= 1e-12, fmt("max relative deviation %.3g over 600 identities (tol 1e-12)", worst)};
}

Outcome energy_series() {
  const CertifiedValue v = energy_S(2.0);
  const double target = oracle::energy_S_at_2();
  const double err = std::max(std::abs(v.lo - target), std::abs(v.hi - target));
  return {err <= 1e-6, fmt("enclosure [%.15g, %.15g], max deviation %.3g (tol 1e-6)", v.lo, v.hi, err)};
}

Outcome model_ratio() {
  const WidthResult w = sigma_exact({2, 2, make_power_log(1, 0)}, 100000);
  const double ratio = w.value.mid() * 1e5;
  return {std::abs(ratio / (2.0 / 3.0) - 1) <= 0.05, fmt("ratio %.8g vs 2/3", ratio)};
}

Outcome invariant_suite() {
  oracle::Gen g(2024);
  std::vector<std::pair<const char*, invariants::Violations>> parts;
  parts.emplace_back("monotonicity", invariants::monotone_in_n(g, 200));
  parts.emplace_back("homogeneity", invariants::homogeneous(g, 200));
  parts.emplace_back("unimodality", invariants::unimodal_case_i(g, 100));
  parts.emplace_back("contiguity", invariants::contiguous_case_ii(g, 100));
  parts.emplace_back("count/nth duality", invariants::count_nth_duality(g, 300));
  bool ok = true;
  std::ostringstream os;
  for (const auto& [name, v] : parts) {
    ok = ok && v.empty();
    os << name << " " << v.size() << " violations";
    if (!v.empty()) os << " (" << v.front() << ")";
    os << "; ";
  }
  return {ok, os.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "finite-formula equivalence", 60, finite_formula},
      {2, "optimizer equivalence", 300, optimizer},
      {3, "domination", 120, domination},
      {4, "infinite-case coherence", 60, infinite_coherence},
      {5, "n*/n_* asymptotics", 60, scan_asymptotics},
      {6, "rearrangement exactness", 120, rearrangement},
      {7, "lattice term asymptotics", 60, lattice_asymptotics},
      {8, "constant identities", 10, constant_identities},
      {9, "energy series", 10, energy_series},
      {10, "model-sequence width asymptotics", 120, model_ratio},
      {11, "invariant suite", 300, invariant_suite},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s %2d %s: %s [%.1fs of %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.budget_seconds, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
