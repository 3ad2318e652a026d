#include "nterm/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "nterm/tail_bounds.hpp"

namespace nterm {

namespace {

constexpr double kTieGap = 1e-12;
constexpr double kBoxBudget = 2e7;
constexpr Index kMaxReach = Index{1} << 52;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require_dimension(int d) {
  if (d < 1 || d > kMaxDimension)
    throw DomainError("dimension must lie in 1.." + std::to_string(kMaxDimension) + ", got " + std::to_string(d));
}

Index factorial(int k) {
  Index f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

CertifiedValue power(const CertifiedValue& v, int k) {
  CertifiedValue r = CertifiedValue::exact(1.0);
  for (int i = 0; i < k; ++i) r = r * v;
  return r;
}

bool point_less(const Point& x, const Point& y) {
  Index nx = 0;
  Index ny = 0;
  for (Index v : x) nx += v < 0 ? -v : v;
  for (Index v : y) ny += v < 0 ? -v : v;
  if (nx != ny) return nx < ny;
  return x < y;
}

}  // namespace

// ---------------------------------------------------------------- family

WeightFamily WeightFamily::mixed(double s, double r, int d) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("mixed weight needs s > 0");
  if (!(r > 0.0)) throw DomainError("mixed weight needs r in (0, inf]");
  require_dimension(d);
  WeightFamily f;
  f.kind_ = WeightKind::mixed;
  f.s_ = s;
  f.r_ = r;
  f.d_ = d;
  return f;
}

WeightFamily WeightFamily::energy(double s, int d) {
  if (!(s > 1.0) || !std::isfinite(s)) throw DomainError("energy weight needs s > 1");
  require_dimension(d);
  WeightFamily f;
  f.kind_ = WeightKind::energy;
  f.s_ = s;
  f.r_ = 2.0;
  f.d_ = d;
  return f;
}

WeightFamily WeightFamily::custom(int d, Rule rule, GrowthCertificate certificate, std::string label) {
  require_dimension(d);
  if (!rule) throw DomainError("custom weight needs an evaluation rule");
  WeightFamily f;
  f.kind_ = WeightKind::custom;
  f.d_ = d;
  f.rule_ = std::move(rule);
  f.cert_ = std::move(certificate);
  f.label_ = std::move(label);
  return f;
}

std::string WeightFamily::name() const {
  switch (kind_) {
    case WeightKind::mixed:
      return "mixed(s=" + fmt(s_) + ",r=" + (std::isinf(r_) ? std::string("inf") : fmt(r_)) +
             ",d=" + std::to_string(d_) + ")";
    case WeightKind::energy:
      return "energy(s=" + fmt(s_) + ",d=" + std::to_string(d_) + ")";
    case WeightKind::custom:
      return label_ + "(d=" + std::to_string(d_) + ")";
  }
  return "?";
}

double WeightFamily::factor(Index j) const {
  const double x = static_cast<double>(j);
  if (kind_ == WeightKind::energy) return std::pow(1.0 + x * x, 0.5 * s_);
  if (std::isinf(r_)) return std::pow(std::max(1.0, x), s_);
  return std::pow(1.0 + std::pow(x, r_), s_ / r_);
}

double WeightFamily::sorted_weight(const Index* a) const {
  double w = 1.0;
  for (int i = 0; i < d_; ++i) w *= factor(a[i]);
  if (kind_ == WeightKind::energy) {
    double sq = 1.0;
    for (int i = 0; i < d_; ++i) sq += static_cast<double>(a[i]) * static_cast<double>(a[i]);
    w /= std::sqrt(sq);
  }
  return w;
}

double WeightFamily::weight(std::span<const Index> k) const {
  if (static_cast<int>(k.size()) != d_)
    throw DomainError("point has dimension " + std::to_string(k.size()) + ", family has " + std::to_string(d_));
  if (kind_ == WeightKind::custom) {
    const double w = rule_(k);
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("custom weight returned a non-positive value");
    return w;
  }
  std::array<Index, kMaxDimension> a{};
  for (int i = 0; i < d_; ++i) a[static_cast<std::size_t>(i)] = k[static_cast<std::size_t>(i)] < 0 ? -k[static_cast<std::size_t>(i)] : k[static_cast<std::size_t>(i)];
  std::sort(a.begin(), a.begin() + d_, std::greater<>());
  return sorted_weight(a.data());
}

Index WeightFamily::axis_reach(double t) const {
  if (t < 1.0) return -1;
  double guess = 0.0;
  if (std::isinf(r_))
    guess = std::pow(t, 1.0 / s_);
  else
    guess = std::pow(std::max(0.0, std::pow(t, r_ / s_) - 1.0), 1.0 / r_);
  if (!(guess < static_cast<double>(kMaxReach)))
    throw ToleranceUnreachable("threshold " + fmt(t) + " reaches beyond the supported index range");
  Index j = static_cast<Index>(std::floor(guess));
  while (j > 0 && factor(j) > t) --j;
  while (factor(j + 1) <= t) ++j;
  return j;
}

template <class F>
void WeightFamily::for_each_sorted_leq(double t, F&& visit) const {
  std::array<Index, kMaxDimension> a{};
  auto rec = [&](auto&& self, int i, Index bound) -> void {
    for (Index v = 0; v <= bound; ++v) {
      a[static_cast<std::size_t>(i)] = v;
      const double w = sorted_weight(a.data());
      if (w > t) break;
      if (i == d_ - 1)
        visit(a, w);
      else
        self(self, i + 1, v);
    }
    a[static_cast<std::size_t>(i)] = 0;
  };
  rec(rec, 0, kMaxReach);
}

template <class F>
void WeightFamily::for_each_in_box(Index radius, F&& visit) const {
  const double side = 2.0 * static_cast<double>(radius) + 1.0;
  if (std::pow(side, d_) > kBoxBudget)
    throw ToleranceUnreachable("bounding box of radius " + std::to_string(radius) + " exceeds the enumeration budget");
  Point k(static_cast<std::size_t>(d_), -radius);
  for (;;) {
    visit(k);
    int i = d_ - 1;
    while (i >= 0 && k[static_cast<std::size_t>(i)] == radius) k[static_cast<std::size_t>(i--)] = -radius;
    if (i < 0) return;
    ++k[static_cast<std::size_t>(i)];
  }
}

namespace {

Index sorted_multiplicity(const Index* a, int d) {
  Index m = factorial(d);
  int run = 1;
  for (int i = 1; i <= d; ++i) {
    if (i < d && a[i] == a[i - 1]) {
      ++run;
    } else {
      m /= factorial(run);
      run = 1;
    }
  }
  for (int i = 0; i < d; ++i)
    if (a[i] != 0) m *= 2;
  return m;
}

}  // namespace

Index WeightFamily::count_leq(double t) const {
  if (!(t > 0.0)) throw DomainError("count threshold must be positive");
  Index count = 0;
  if (kind_ == WeightKind::custom) {
    if (!cert_.box_radius) throw UndecidableError("custom weight has no growth certificate; cannot bound the search box");
    for_each_in_box(cert_.box_radius(t), [&](const Point& k) {
      if (weight(k) <= t) ++count;
    });
    return count;
  }
  for_each_sorted_leq(t, [&](const std::array<Index, kMaxDimension>& a, double) {
    count += sorted_multiplicity(a.data(), d_);
  });
  return count;
}

double WeightFamily::nth_smallest_weight(Index n) const {
  if (n < 1) throw DomainError("rank must be >= 1");
  RearrangementStream stream(*this);
  Index seen = 0;
  for (;;) {
    const auto [w, c] = stream.next_run();
    seen += c;
    if (seen >= n) return w;
  }
}

Convergence WeightFamily::series_convergence(double alpha) const {
  switch (kind_) {
    case WeightKind::mixed:
      return s_ * alpha > 1.0 ? Convergence::converges : Convergence::diverges;
    case WeightKind::energy:
      return (s_ - 1.0) * alpha > 1.0 ? Convergence::converges : Convergence::diverges;
    case WeightKind::custom:
      return cert_.summable ? cert_.summable(alpha) : Convergence::unknown;
  }
  return Convergence::unknown;
}

CertifiedValue WeightFamily::tail_mass(double t, double alpha, double tol) const {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  switch (series_convergence(alpha)) {
    case Convergence::diverges:
      throw DivergenceError("Σ weight^-" + fmt(alpha) + " diverges for " + name());
    case Convergence::unknown:
      throw UndecidableError("convergence of Σ weight^-" + fmt(alpha) + " is unknown for " + name());
    case Convergence::converges:
      break;
  }
  if (kind_ == WeightKind::mixed) return mixed_tail(d_, t, alpha, tol);
  if (kind_ == WeightKind::energy && d_ == 1) return mixed(s_ - 1.0, 2.0, 1).tail_mass(t, alpha, tol);
  return box_tail(t, alpha, tol);
}

CertifiedValue WeightFamily::mixed_tail(int depth, double t, double alpha, double tol) const {
  const PowerTail1D g(s_ * alpha, r_, tol / 4.0);
  const CertifiedValue z = g.full();
  std::vector<CertifiedValue> z_pow(static_cast<std::size_t>(depth) + 1);
  for (int i = 0; i <= depth; ++i) z_pow[static_cast<std::size_t>(i)] = power(z, i);

  // Σ_{k ∈ ℤ^depth, ω(k) > t} ω(k)^{-α}
  auto rec = [&](auto&& self, int dep, double thr) -> CertifiedValue {
    if (thr < 1.0) return z_pow[static_cast<std::size_t>(dep)];
    const Index reach = axis_reach(thr);
    const CertifiedValue outer = g.tail(reach).scaled(2.0);
    if (dep == 1) return outer;
    CompensatedSum lo;
    CompensatedSum hi;
    const CertifiedValue centre = self(self, dep - 1, thr);
    lo.add(centre.lo);
    hi.add(centre.hi);
    for (Index j = 1; j <= reach; ++j) {
      const double gj = 2.0 * g.term(j);
      const CertifiedValue inner = self(self, dep - 1, thr / factor(j));
      lo.add(gj * inner.lo);
      hi.add(gj * inner.hi);
    }
    const CertifiedValue rest = outer * z_pow[static_cast<std::size_t>(dep - 1)];
    lo.add(rest.lo);
    hi.add(rest.hi);
    return CertifiedValue{lo.value(), hi.value()}.widened(16);
  };
  return rec(rec, depth, t);
}

CertifiedValue WeightFamily::box_tail(double t, double alpha, double tol) const {
  if (kind_ == WeightKind::custom) {
    if (!cert_.box_radius || !cert_.outside_mass)
      throw ToleranceUnreachable("custom weight has no certificate for tail sums");
    Index radius = std::max<Index>(4, cert_.box_radius(t));
    for (;;) {
      CompensatedSum inside;
      for_each_in_box(radius, [&](const Point& k) {
        const double w = weight(k);
        if (w > t) inside.add(std::pow(w, -alpha));
      });
      const std::optional<double> outside = cert_.outside_mass(radius, alpha);
      if (!outside) throw ToleranceUnreachable("custom certificate gives no bound outside radius " + std::to_string(radius));
      if (*outside <= 0.5 * tol * inside.value())
        return CertifiedValue{inside.value(), inside.value() + *outside}.widened(16);
      radius *= 2;
    }
  }
  // energy, d >= 2: ω̃(k) >= Π_i (1 + k_i²)^{(s-1)/2} bounds the mass outside a box.
  const PowerTail1D h((s_ - 1.0) * alpha, 2.0, tol / 4.0);
  const double z_hi = h.full().hi;
  // max_i |k_i| = m forces ω̃(k) >= (1 + m²)^{(s-1)/2}
  const double reach = std::sqrt(std::max(0.0, std::pow(std::max(t, 1.0), 2.0 / (s_ - 1.0)) - 1.0));
  Index radius = std::max<Index>(8, static_cast<Index>(std::ceil(2.0 * reach)));
  for (;;) {
    double tuples = 1.0;
    for (int i = 1; i <= d_; ++i) tuples = tuples * (static_cast<double>(radius) + i) / i;
    if (tuples > kBoxBudget)
      throw ToleranceUnreachable("energy tail needs more than " + fmt(kBoxBudget) + " box points at tolerance " + fmt(tol));
    CompensatedSum inside;
    std::array<Index, kMaxDimension> a{};
    auto rec = [&](auto&& self, int i, Index bound) -> void {
      for (Index v = 0; v <= bound; ++v) {
        a[static_cast<std::size_t>(i)] = v;
        if (i == d_ - 1) {
          const double w = sorted_weight(a.data());
          if (w > t) inside.add(static_cast<double>(sorted_multiplicity(a.data(), d_)) * std::pow(w, -alpha));
        } else {
          self(self, i + 1, v);
        }
      }
      a[static_cast<std::size_t>(i)] = 0;
    };
    rec(rec, 0, radius);
    // Σ outside the box <= Z^d - Z_R^d <= d Z^{d-1} (Z - Z_R)
    const double outside = static_cast<double>(d_) * std::pow(z_hi, d_ - 1) * 2.0 * h.tail(radius).hi;
    if (outside <= 0.5 * tol * inside.value())
      return CertifiedValue{inside.value(), inside.value() + outside}.widened(16);
    radius *= 2;
  }
}

// ---------------------------------------------------------------- stream

bool RearrangementStream::Heavier::operator()(const Node& x, const Node& y) const { return x.weight > y.weight; }

RearrangementStream::RearrangementStream(const WeightFamily& family)
    : RearrangementStream(std::make_shared<const WeightFamily>(family)) {}

RearrangementStream::RearrangementStream(std::shared_ptr<const WeightFamily> family)
    : fam_(std::move(family)), d_(fam_->dimension()) {
  if (fam_->monotone()) {
    Tuple origin{};
    heap_.push({fam_->sorted_weight(origin.data()), origin});
  }
}

Index RearrangementStream::multiplicity(const Tuple& a) const { return sorted_multiplicity(a.data(), d_); }

void RearrangementStream::push_children(const Tuple& a) {
  // Canonical tuples are sorted non-increasingly; the parent of a tuple
  // decrements its last positive entry, so each tuple is pushed once.
  int last = -1;
  for (int i = 0; i < d_; ++i)
    if (a[static_cast<std::size_t>(i)] > 0) last = i;
  auto push = [&](int i) {
    Tuple b = a;
    ++b[static_cast<std::size_t>(i)];
    heap_.push({fam_->sorted_weight(b.data()), b});
  };
  if (last >= 0 && (last == 0 || a[static_cast<std::size_t>(last - 1)] > a[static_cast<std::size_t>(last)])) push(last);
  if (last + 1 < d_) push(last + 1);
}

void RearrangementStream::expand(const Tuple& a, std::vector<Point>& out) const {
  Point base(a.begin(), a.begin() + d_);
  std::sort(base.begin(), base.end());
  do {
    std::vector<std::size_t> nonzero;
    for (std::size_t i = 0; i < base.size(); ++i)
      if (base[i] != 0) nonzero.push_back(i);
    const std::size_t patterns = std::size_t{1} << nonzero.size();
    for (std::size_t mask = 0; mask < patterns; ++mask) {
      Point k = base;
      for (std::size_t b = 0; b < nonzero.size(); ++b)
        if (mask & (std::size_t{1} << b)) k[nonzero[b]] = -k[nonzero[b]];
      out.push_back(std::move(k));
    }
  } while (std::next_permutation(base.begin(), base.end()));
}

void RearrangementStream::pop_batch(bool expand_points) {
  if (!fam_->monotone()) {
    fill_custom_batch(expand_points);
    return;
  }
  const double w = heap_.top().weight;
  std::vector<Point> points;
  Index count = 0;
  while (heap_.top().weight == w) {
    const Tuple a = heap_.top().a;
    heap_.pop();
    count += multiplicity(a);
    if (expand_points) expand(a, points);
    push_children(a);
  }
  pending_weight_ = w;
  pending_count_ = count;
  pending_.clear();
  if (expand_points) {
    std::sort(points.begin(), points.end(), point_less);
    pending_.assign(std::make_move_iterator(points.begin()), std::make_move_iterator(points.end()));
  }
}

void RearrangementStream::fill_custom_batch(bool expand_points) {
  const GrowthCertificate& cert = fam_->certificate();
  if (!cert.box_radius) throw UndecidableError("custom weight has no growth certificate; cannot enumerate it in order");
  while (shell_pos_ >= shell_.size()) {
    shell_.clear();
    shell_pos_ = 0;
    double lo = 0.0;
    double hi = 0.0;
    if (shell_lo_ < 0.0) {
      hi = fam_->weight(Point(static_cast<std::size_t>(d_), 0));
    } else {
      lo = shell_hi_;
      hi = 2.0 * shell_hi_;
    }
    shell_lo_ = lo;
    shell_hi_ = hi;
    Index radius = cert.box_radius(hi);
    const double side = 2.0 * static_cast<double>(radius) + 1.0;
    if (std::pow(side, d_) > kBoxBudget) throw ToleranceUnreachable("custom stream box exceeds the enumeration budget");
    Point k(static_cast<std::size_t>(d_), -radius);
    for (;;) {
      const double w = fam_->weight(k);
      if (w > lo && w <= hi) shell_.emplace_back(w, k);
      int i = d_ - 1;
      while (i >= 0 && k[static_cast<std::size_t>(i)] == radius) k[static_cast<std::size_t>(i--)] = -radius;
      if (i < 0) break;
      ++k[static_cast<std::size_t>(i)];
    }
    std::sort(shell_.begin(), shell_.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first < y.first;
      return point_less(x.second, y.second);
    });
  }
  const double w = shell_[shell_pos_].first;
  pending_.clear();
  pending_weight_ = w;
  pending_count_ = 0;
  while (shell_pos_ < shell_.size() && shell_[shell_pos_].first == w) {
    if (expand_points) pending_.push_back(shell_[shell_pos_].second);
    ++pending_count_;
    ++shell_pos_;
  }
}

RearrangementStream::Emission RearrangementStream::next() {
  if (pending_.empty()) pop_batch(true);
  Emission e{pending_weight_, std::move(pending_.front())};
  pending_.pop_front();
  ++emitted_;
  return e;
}

std::pair<double, Index> RearrangementStream::next_run() {
  if (!pending_.empty()) {
    const Index c = static_cast<Index>(pending_.size());
    pending_.clear();
    emitted_ += c;
    return {pending_weight_, c};
  }
  pop_batch(false);
  emitted_ += pending_count_;
  return {pending_weight_, pending_count_};
}

// ---------------------------------------------------------------- source

namespace {

class LatticeSequence final : public SequenceSource {
 public:
  explicit LatticeSequence(const WeightFamily& family)
      : fam_(std::make_shared<const WeightFamily>(family)), stream_(fam_) {}

  std::string name() const override { return "rearranged " + fam_->name(); }
  Convergence tail_convergence(double e) const override { return fam_->series_convergence(e); }

  ExtendedReal prefix_pow_sum(Index m, double e) const override {
    if (m < 1) throw DomainError("sequence index must be >= 1");
    std::lock_guard lock(mu_);
    ensure(m);
    ExtendedSum acc;
    Index done = 0;
    for (std::size_t i = 0; done < m; ++i) {
      const Index take = std::min(run_end_[i], m) - done;
      const double w = run_weight_[i];
      const double l2 = std::log2(static_cast<double>(take)) - e * std::log2(w);
      const double v = static_cast<double>(take) * std::pow(w, -e);
      if (std::isnormal(v) && std::abs(l2) < 600.0)
        acc.add(v);
      else
        acc.add_log2(l2);
      done += take;
    }
    return acc.result();
  }

 protected:
  double term_unchecked(Index n) const override { return 1.0 / weight_at(n); }
  double log_term_unchecked(Index n) const override { return -std::log(weight_at(n)); }

  CertifiedValue tail_unchecked(Index n, double e, double tol) const override {
    if (n == 0) return fam_->tail_mass(0.0, e, tol);
    CompensatedSum explicit_part;
    double hi = 0.0;
    double next = 0.0;
    {
      std::lock_guard lock(mu_);
      ensure(n);
      std::size_t i = run_index(n);
      hi = run_weight_[i];
      explicit_part.add(static_cast<double>(run_end_[i] - n) * std::pow(hi, -e));
      for (++i;; ++i) {
        ensure(run_end_[i - 1] + 1);
        next = run_weight_[i];
        if (next > hi * (1.0 + kTieGap)) break;
        const Index count = run_end_[i] - run_end_[i - 1];
        explicit_part.add(static_cast<double>(count) * std::pow(next, -e));
        hi = next;
      }
    }
    const CertifiedValue rest = fam_->tail_mass(std::sqrt(hi * next), e, tol / 2.0);
    return CertifiedValue{explicit_part.value() + rest.lo, explicit_part.value() + rest.hi}.widened();
  }

 private:
  void ensure(Index n) const {
    while (run_end_.empty() || run_end_.back() < n) {
      const auto [w, c] = stream_.next_run();
      run_weight_.push_back(w);
      run_end_.push_back((run_end_.empty() ? 0 : run_end_.back()) + c);
    }
  }
  std::size_t run_index(Index n) const {
    return static_cast<std::size_t>(std::lower_bound(run_end_.begin(), run_end_.end(), n) - run_end_.begin());
  }
  double weight_at(Index n) const {
    std::lock_guard lock(mu_);
    ensure(n);
    return run_weight_[run_index(n)];
  }

  std::shared_ptr<const WeightFamily> fam_;
  mutable std::mutex mu_;
  mutable RearrangementStream stream_;
  mutable std::vector<double> run_weight_;
  mutable std::vector<Index> run_end_;  // cumulative counts
};

}  // namespace

SourcePtr rearranged_source(const WeightFamily& family) { return std::make_shared<LatticeSequence>(family); }

FeasibilityResult embedding_feasible(const WeightFamily& family, double p, double q) {
  require_exponent(p, "p");
  require_exponent(q, "q");
  if (p <= q) return {true, 0.0, "p <= q"};
  const double alpha = std::isinf(p) ? q : p * q / (p - q);
  switch (family.kind()) {
    case WeightKind::mixed: {
      const double e = family.s() * alpha;
      return {e > 1.0, alpha,
              "one-dimensional series Σ(1+|j|^r)^{-(s/r)α} has exponent s·α = " + fmt(e) +
                  (e > 1.0 ? " > 1" : " <= 1")};
    }
    case WeightKind::energy: {
      const double e = (family.s() - 1.0) * alpha;
      return {e > 1.0, alpha,
              "axis series Σ(1+j²)^{-(s-1)α/2} has exponent (s-1)·α = " + fmt(e) + (e > 1.0 ? " > 1" : " <= 1")};
    }
    case WeightKind::custom: {
      const Convergence c = family.series_convergence(alpha);
      if (c == Convergence::unknown)
        throw UndecidableError("custom weight has no summability certificate for exponent " + fmt(alpha));
      return {c == Convergence::converges, alpha, "custom summability certificate"};
    }
  }
  return {false, alpha, ""};
}

}  // namespace nterm
