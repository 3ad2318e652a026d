#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nterm/sequence.hpp"
#include "nterm/tail_bounds.hpp"
#include "support/oracles.hpp"

using namespace nterm;

TEST_SUITE("numeric") {
  TEST_CASE("extended sum survives addends beyond the double range") {
    ExtendedSum s;
    s.add_log2(2000.0);
    s.add_log2(2000.0);
    CHECK(s.result().log2() == doctest::Approx(2001.0).epsilon(1e-14));
    CHECK_THROWS_AS(s.result().value(), OverflowError);

    ExtendedSum small;
    for (int i = 0; i < 10; ++i) small.add_log2(-3000.0);
    CHECK(small.result().log2() == doctest::Approx(-3000.0 + std::log2(10.0)).epsilon(1e-14));
  }

  TEST_CASE("extended sum matches linear accumulation in range") {
    ExtendedSum s;
    CompensatedSum c;
    for (int k = 1; k <= 1000; ++k) {
      s.add(1.0 / k);
      c.add(1.0 / k);
    }
    CHECK(s.result().value() == doctest::Approx(c.value()).epsilon(1e-15));
  }

  TEST_CASE("add_pow uses the supplied log when the base underflows") {
    ExtendedSum s;
    s.add_pow(0.0, -2.0, -1000.0);
    CHECK(s.log() == doctest::Approx(2000.0).epsilon(1e-14));
  }

  TEST_CASE("certified value helpers") {
    const CertifiedValue v{1.0, 2.0};
    CHECK(v.contains(1.5));
    CHECK_FALSE(v.contains(2.5));
    CHECK(v.mid() == 1.5);
    CHECK(v.scaled(-1.0).lo == -2.0);
    const CertifiedValue w = CertifiedValue::exact(3.0).widened();
    CHECK(w.lo < 3.0);
    CHECK(w.hi > 3.0);
  }

  TEST_CASE("exponent validation") {
    CHECK_NOTHROW(require_exponent(0.5, "p"));
    CHECK_NOTHROW(require_exponent(kInf, "p"));
    CHECK_THROWS_AS(require_exponent(0.0, "p"), DomainError);
    CHECK_THROWS_AS(require_exponent(std::nan(""), "p"), DomainError);
  }
}

TEST_SUITE("sequence") {
  TEST_CASE("term examples") {
    CHECK(make_geometric(0.5)->term(3) == 0.25);
    CHECK(make_power_log(1.0, 0.0)->term(10) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK_THROWS_AS(make_finite({3.0, 2.0, 1.0}, 0.0), DomainError);
    CHECK_THROWS_AS(make_finite({3.0, 0.0}, 0.0), DomainError);
    CHECK_THROWS_AS(make_finite({1.0, 2.0}, 1.0), DomainError);
    CHECK_THROWS_AS(make_geometric(0.5)->term(0), DomainError);
  }

  TEST_CASE("prefix power sums") {
    CHECK(make_geometric(1.0)->prefix_pow_sum(7, -2.0).value() == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(make_geometric(0.5)->prefix_pow_sum(3, -1.0).value() == doctest::Approx(7.0).epsilon(1e-15));
    const double m = 1e6;
    const double got = make_power_log(1.0, 0.0)->prefix_pow_sum(1000000, -1.0).value();
    CHECK(oracle::rel_diff(got, m * (m + 1) / 2) < 1e-14);
  }

  TEST_CASE("prefix sums stay finite when terms underflow") {
    const auto g = make_geometric(0.5);
    const double l = g->prefix_pow_sum(5000, -2.0).log();
    CHECK(std::isfinite(l));
    CHECK(l == doctest::Approx(2.0 * 4999.0 * std::log(2.0) + std::log(4.0 / 3.0)).epsilon(1e-12));
  }

  TEST_CASE("tail power sums") {
    CHECK(make_geometric(0.5, 0.5)->tail_pow_sum(2, 1.0).contains(0.25));
    const CertifiedValue basel = make_power_log(1.0, 0.0)->tail_pow_sum(1, 2.0, 1e-10);
    const double target = std::numbers::pi * std::numbers::pi / 6.0 - 1.0;
    CHECK(basel.contains(target));
    CHECK(basel.relative_width() <= 1e-10);
    CHECK_THROWS_AS(make_power_log(1.0, 0.0)->tail_pow_sum(1, 1.0), DivergenceError);
    CHECK_THROWS_AS(make_geometric(1.0)->tail_pow_sum(1, 1.0), DivergenceError);
  }

  TEST_CASE("power-log tails with a log factor against a long partial sum") {
    const auto src = make_power_log(1.5, 1.0);
    oracle::LD partial = 0;
    for (Index k = 2000000; k > 10; --k) partial += static_cast<oracle::LD>(src->term(k));
    const CertifiedValue t = src->tail_pow_sum(10, 1.0, 1e-10);
    const CertifiedValue beyond = src->tail_pow_sum(2000000, 1.0, 1e-8);
    CHECK(t.lo <= static_cast<double>(partial) + beyond.hi);
    CHECK(t.hi >= static_cast<double>(partial) + beyond.lo);
  }

  TEST_CASE("power-log peak clamp") {
    const PowerLogSequence seq(0.5, 3.0);
    CHECK(seq.peak_index() > 1);
    for (Index n = 1; n < seq.peak_index(); ++n) CHECK(seq.term(n) == seq.term(seq.peak_index()));
    CHECK(seq.term(seq.peak_index() + 1) <= seq.term(seq.peak_index()));
  }

  TEST_CASE("scaled sources") {
    const auto base = make_power_log(2.0, 0.0);
    const auto scaled = make_scaled(base, 3.0);
    CHECK(scaled->term(4) == doctest::Approx(3.0 / 16.0).epsilon(1e-15));
    CHECK(scaled->limit() == 0.0);
    CHECK_THROWS_AS(make_scaled(base, 0.0), DomainError);
  }

  TEST_CASE("power tail in one dimension") {
    const PowerTail1D inf_r(2.0, kInf, 1e-12);
    CHECK(inf_r.tail(1).contains(std::numbers::pi * std::numbers::pi / 6.0 - 1.0));
    const PowerTail1D two(2.0, 2.0, 1e-12);
    CHECK(two.tail(0).contains(oracle::energy_S_at_2()));
    CHECK(two.full().contains(1.0 + 2.0 * oracle::energy_S_at_2()));
    CHECK_THROWS_AS(PowerTail1D(1.0, 2.0, 1e-10), DivergenceError);
  }
}
