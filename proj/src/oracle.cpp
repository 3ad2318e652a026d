#include "nterm/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

namespace nterm {

namespace {

std::mt19937_64 make_rng(std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words;
  for (std::uint64_t v : parts) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

double lq_norm(std::vector<double>& v, double q) {
  if (v.empty()) return 0.0;
  const double top = *std::max_element(v.begin(), v.end());
  if (std::isinf(q) || top == 0.0) return top;
  std::sort(v.begin(), v.end());
  CompensatedSum s;
  for (double x : v) s.add(std::pow(x / top, q));
  return top * std::pow(s.value(), 1.0 / q);
}

void require_lambda(const std::vector<double>& lambda) {
  if (lambda.empty()) throw DomainError("lambda prefix must not be empty");
  for (double l : lambda)
    if (!(l > 0.0) || !std::isfinite(l)) throw DomainError("lambda values must be positive");
}

// Objective on x = |ξ|^p; scratch buffers avoid allocation in the inner loop.
class Objective {
 public:
  Objective(const std::vector<double>& lambda, Index n, double p, double q)
      : lambda_(lambda), n_(n), ip_(1.0 / p), q_(q), prod_(lambda.size()) {}

  double operator()(const std::vector<double>& x) {
    for (std::size_t k = 0; k < x.size(); ++k) prod_[k] = lambda_[k] * std::pow(std::max(x[k], 0.0), ip_);
    const auto drop = static_cast<std::ptrdiff_t>(n_);
    std::nth_element(prod_.begin(), prod_.begin() + drop, prod_.end(), std::greater<>());
    rest_.assign(prod_.begin() + drop, prod_.end());
    return lq_norm(rest_, q_);
  }

 private:
  const std::vector<double>& lambda_;
  Index n_;
  double ip_;
  double q_;
  std::vector<double> prod_;
  std::vector<double> rest_;
};

}  // namespace

double BallSample::norm_power() const {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : xi) m = std::max(m, std::abs(v));
    return m;
  }
  CompensatedSum s;
  for (double v : xi) s.add(std::pow(std::abs(v), p));
  return s.value();
}

double BallSample::feasibility_residual() const { return std::max(0.0, norm_power() - 1.0); }

double best_n_term_error(const std::vector<double>& lambda, const std::vector<double>& xi, Index n, double q) {
  require_exponent(q, "q");
  if (lambda.size() != xi.size()) throw DomainError("lambda and xi must have the same length");
  if (n < 0) throw DomainError("n must be >= 0");
  if (static_cast<std::size_t>(n) >= xi.size()) return 0.0;
  std::vector<double> prod(xi.size());
  for (std::size_t k = 0; k < xi.size(); ++k) prod[k] = std::abs(lambda[k] * xi[k]);
  const auto drop = static_cast<std::ptrdiff_t>(n);
  std::nth_element(prod.begin(), prod.begin() + drop, prod.end(), std::greater<>());
  std::vector<double> rest(prod.begin() + drop, prod.end());
  return lq_norm(rest, q);
}

BallSample extremal_vector(const std::vector<double>& lambda, Index m, double p) {
  require_lambda(lambda);
  require_exponent(p, "p");
  if (std::isinf(p)) throw DomainError("extremal vector needs p < inf");
  if (m < 1 || static_cast<std::size_t>(m) > lambda.size()) throw DomainError("m must lie in 1..M");
  // λ_k ξ_k = P^{-1/p} with P = Σ_{j<=m} λ_j^{-p}; computed relative to λ_m.
  const double ref = lambda[static_cast<std::size_t>(m - 1)];
  CompensatedSum s;
  for (Index k = 0; k < m; ++k) s.add(std::pow(ref / lambda[static_cast<std::size_t>(k)], p));
  const double common = ref * std::pow(s.value(), -1.0 / p);
  BallSample b{p, std::vector<double>(lambda.size(), 0.0)};
  for (Index k = 0; k < m; ++k) b.xi[static_cast<std::size_t>(k)] = common / lambda[static_cast<std::size_t>(k)];
  return b;
}

std::vector<BallSample> sample_ball(Index m, double p, Index count, std::uint64_t seed) {
  require_exponent(p, "p");
  if (m < 1) throw DomainError("M must be >= 1");
  if (count < 1) throw DomainError("count must be >= 1");
  auto rng = make_rng({seed, static_cast<std::uint64_t>(m), std::bit_cast<std::uint64_t>(p)});
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  const auto size = static_cast<std::size_t>(m);
  std::vector<BallSample> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<std::size_t> order(size);
  for (Index i = 0; i < count; ++i) {
    std::vector<double> mag(size, 0.0);
    const int style = static_cast<int>(i % 3);
    std::size_t support = size;
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (style == 1) {
      support = 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(size));
      support = std::min(support, size);
      std::shuffle(order.begin(), order.end(), rng);
    }
    for (std::size_t j = 0; j < support; ++j) {
      double v = std::isinf(p) ? unit(rng) : expo(rng);
      if (style == 2) v = v * v * v;
      mag[order[j]] = v;
    }
    BallSample b{p, std::vector<double>(size, 0.0)};
    if (std::isinf(p)) {
      const double top = *std::max_element(mag.begin(), mag.end());
      for (std::size_t k = 0; k < size; ++k) b.xi[k] = top > 0.0 ? mag[k] / top : 0.0;
      if (top == 0.0) b.xi[order[0]] = 1.0;
      for (std::size_t k = 0; k < size; ++k)
        if (mag[k] == top) b.xi[k] = 1.0;
    } else {
      double total = std::accumulate(mag.begin(), mag.end(), 0.0);
      if (total == 0.0) {
        mag[order[0]] = 1.0;
        total = 1.0;
      }
      for (std::size_t k = 0; k < size; ++k) b.xi[k] = std::pow(mag[k] / total, 1.0 / p);
      for (int guard = 0; guard < 8; ++guard) {
        const double np = b.norm_power();
        if (np <= 1.0) break;
        const double shrink = std::pow(np, -1.0 / p) * (1.0 - 4e-16 * (guard + 1));
        for (double& v : b.xi) v *= shrink;
      }
    }
    for (double& v : b.xi)
      if (coin(rng)) v = -v;
    out.push_back(std::move(b));
  }
  return out;
}

OptimizerResult maximize_small(double p, double q, const std::vector<double>& lambda, Index n, int restarts,
                               std::uint64_t seed) {
  require_exponent(p, "p");
  require_exponent(q, "q");
  require_lambda(lambda);
  const auto size = lambda.size();
  if (size > 16) throw DomainError("maximize_small supports M <= 16");
  if (n < 0 || static_cast<std::size_t>(n) >= size) throw DomainError("maximize_small needs 0 <= n < M");
  if (restarts < 1) throw DomainError("restarts must be >= 1");

  if (std::isinf(p)) {
    // the error is non-decreasing in every |ξ_k|, so the cube's corner of ones wins
    BallSample ones{p, std::vector<double>(size, 1.0)};
    return {best_n_term_error(lambda, ones.xi, n, q), ones};
  }

  Objective f(lambda, n, p, q);
  auto rng = make_rng({seed, static_cast<std::uint64_t>(size), std::bit_cast<std::uint64_t>(p),
                       std::bit_cast<std::uint64_t>(q), static_cast<std::uint64_t>(n)});
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  constexpr int kScoutSweeps = 12;
  constexpr int kMaxSweeps = 400;
  constexpr std::size_t kPolished = 6;
  std::vector<double> trial(size);
  // Maximizes f along x + t (y - x) for t in [t_lo, 1]; updates x on improvement.
  auto line_search = [&](std::vector<double>& x, double& fx, const std::vector<double>& y) {
    double t_lo = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
      const double dk = y[k] - x[k];
      if (dk > 0.0) t_lo = std::max(t_lo, -x[k] / dk);
    }
    t_lo = -t_lo;
    auto eval = [&](double t) {
      for (std::size_t k = 0; k < size; ++k) trial[k] = std::max(0.0, x[k] + t * (y[k] - x[k]));
      return f(trial);
    };
    constexpr int kGrid = 16;
    double best_t = 0.0;
    double best_f = fx;
    std::vector<double> ts(kGrid + 1);
    for (int i = 0; i <= kGrid; ++i) ts[static_cast<std::size_t>(i)] = t_lo + (1.0 - t_lo) * i / kGrid;
    int best_i = -1;
    for (int i = 0; i <= kGrid; ++i) {
      const double v = eval(ts[static_cast<std::size_t>(i)]);
      if (v > best_f) {
        best_f = v;
        best_t = ts[static_cast<std::size_t>(i)];
        best_i = i;
      }
    }
    double a = best_i > 0 ? ts[static_cast<std::size_t>(best_i - 1)] : t_lo;
    double b = best_i >= 0 && best_i < kGrid ? ts[static_cast<std::size_t>(best_i + 1)] : 1.0;
    if (best_i < 0) {
      // no grid point beat the current point: refine around t = 0
      const double h = (1.0 - t_lo) / kGrid;
      a = std::max(t_lo, -h);
      b = std::min(1.0, h);
    }
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    for (int it = 0; it < 40 && b - a > 1e-13; ++it) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - phi * (b - a);
        fc = eval(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + phi * (b - a);
        fd = eval(d);
      }
    }
    if (fc > best_f) {
      best_f = fc;
      best_t = c;
    }
    if (fd > best_f) {
      best_f = fd;
      best_t = d;
    }
    if (best_f > fx) {
      for (std::size_t k = 0; k < size; ++k) x[k] = std::max(0.0, x[k] + best_t * (y[k] - x[k]));
      const double total = std::accumulate(x.begin(), x.end(), 0.0);
      for (double& v : x) v /= total;
      fx = f(x);
      return true;
    }
    return false;
  };

  std::vector<double> weight_equal(size);  // λ_k^{-p}, the equal-product profile
  {
    const double ref = *std::min_element(lambda.begin(), lambda.end());
    for (std::size_t k = 0; k < size; ++k) weight_equal[k] = std::pow(ref / lambda[k], p);
  }
  std::vector<double> weight_tail(size, 1.0);
  if (q < p) {
    const double top = *std::max_element(lambda.begin(), lambda.end());
    for (std::size_t k = 0; k < size; ++k) weight_tail[k] = std::pow(lambda[k] / top, p * q / (p - q));
  }

  std::vector<double> y(size);
  std::vector<std::size_t> order(size);
  auto sweep = [&](std::vector<double>& x, double& fx) {
    for (std::size_t i = 0; i < size; ++i) {
      std::fill(y.begin(), y.end(), 0.0);
      y[i] = 1.0;
      line_search(x, fx, y);
    }
    // group moves over the j coordinates with the largest products
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return lambda[a] * std::pow(x[a], 1.0 / p) > lambda[b] * std::pow(x[b], 1.0 / p);
    });
    for (std::size_t j = 1; j <= size; ++j) {
      double mass = 0.0;
      double wsum = 0.0;
      for (std::size_t t = 0; t < j; ++t) {
        mass += x[order[t]];
        wsum += weight_equal[order[t]];
      }
      // blend toward equal products on the group
      std::fill(y.begin(), y.end(), 0.0);
      for (std::size_t t = 0; t < j; ++t) y[order[t]] = weight_equal[order[t]] / wsum;
      line_search(x, fx, y);
      // equalize inside the group, keeping its mass
      y = x;
      for (std::size_t t = 0; t < j; ++t) y[order[t]] = mass * weight_equal[order[t]] / wsum;
      line_search(x, fx, y);
      if (q < p && j < size) {
        // stationary profile λ^{pq/(p-q)} on the complement, keeping its mass
        double rest = 0.0;
        double tsum = 0.0;
        for (std::size_t t = j; t < size; ++t) {
          rest += x[order[t]];
          tsum += weight_tail[order[t]];
        }
        y = x;
        for (std::size_t t = j; t < size; ++t) y[order[t]] = rest * weight_tail[order[t]] / tsum;
        line_search(x, fx, y);
      }
    }
  };
  auto climb = [&](std::vector<double>& x, double& fx, int sweeps) {
    for (int k = 0; k < sweeps; ++k) {
      const double before = fx;
      sweep(x, fx);
      if (fx <= before * (1.0 + 1e-14)) return true;
    }
    return false;
  };

  struct Start {
    std::vector<double> x;
    double fx;
    bool done;
  };
  std::vector<Start> starts;
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> x(size);
    const bool sparse = r % 2 == 1;
    for (std::size_t k = 0; k < size; ++k) x[k] = (sparse && unit(rng) < 0.5) ? 0.0 : expo(rng);
    double total = std::accumulate(x.begin(), x.end(), 0.0);
    if (total == 0.0) {
      x[static_cast<std::size_t>(unit(rng) * static_cast<double>(size)) % size] = 1.0;
      total = 1.0;
    }
    for (double& v : x) v /= total;
    double fx = f(x);
    const bool done = climb(x, fx, kScoutSweeps);
    starts.push_back({std::move(x), fx, done});
  }
  std::stable_sort(starts.begin(), starts.end(), [](const Start& a, const Start& b) { return a.fx > b.fx; });
  const std::size_t polish = std::min(starts.size(), kPolished);
  for (std::size_t i = 0; i < polish; ++i)
    if (!starts[i].done) climb(starts[i].x, starts[i].fx, kMaxSweeps);

  OptimizerResult best;
  best.value = -1.0;
  for (const Start& st : starts) {
    if (st.fx > best.value) {
      best.value = st.fx;
      best.witness.p = p;
      best.witness.xi.assign(size, 0.0);
      for (std::size_t k = 0; k < size; ++k) best.witness.xi[k] = std::pow(st.x[k], 1.0 / p);
    }
  }
  // report the value the witness actually attains
  best.value = best_n_term_error(lambda, best.witness.xi, n, q);
  return best;
}

}  // namespace nterm
