#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nterm/sequence.hpp"

namespace nterm {

using Point = std::vector<Index>;

inline constexpr int kMaxDimension = 16;

enum class WeightKind { mixed, energy, custom };

/// What a user-defined weight must provide beyond its values.
struct GrowthCertificate {
  /// R(T) such that weight(k) <= T implies max_i |k_i| <= R(T).
  std::function<Index(double)> box_radius;
  /// Upper bound for Σ_{max_i |k_i| > R} weight(k)^{-alpha}; nullopt if unknown.
  std::function<std::optional<double>(Index, double)> outside_mass;
  /// Convergence of Σ_k weight(k)^{-alpha}.
  std::function<Convergence(double)> summable;
};

/// A positive weight on ℤ^d tending to infinity.
///
///   mixed:  Π_i (1 + |k_i|^r)^{s/r}, or Π_i max(1, |k_i|)^s for r = ∞
///   energy: Π_i (1 + k_i²)^{s/2} / (1 + Σ_i k_i²)^{1/2}, s > 1
///   custom: a user rule plus an optional growth certificate
class WeightFamily {
 public:
  using Rule = std::function<double(std::span<const Index>)>;

  static WeightFamily mixed(double s, double r, int d);
  static WeightFamily energy(double s, int d);
  static WeightFamily custom(int d, Rule rule, GrowthCertificate certificate = {}, std::string label = "custom");

  WeightKind kind() const { return kind_; }
  double s() const { return s_; }
  double r() const { return r_; }
  int dimension() const { return d_; }
  std::string name() const;

  /// Invariant under sign flips; mixed and energy also under permutations.
  double weight(std::span<const Index> k) const;
  double weight(std::initializer_list<Index> k) const { return weight(std::span<const Index>(k.begin(), k.size())); }

  /// #{k : weight(k) <= T}.
  Index count_leq(double t) const;
  /// n-th element of the weights sorted non-decreasingly (n >= 1).
  double nth_smallest_weight(Index n) const;

  /// Convergence of Σ_k weight(k)^{-alpha}.
  Convergence series_convergence(double alpha) const;
  /// Enclosure of Σ_{weight(k) > T} weight(k)^{-alpha} with relative width <= tol.
  CertifiedValue tail_mass(double t, double alpha, double tol) const;

  // Internal helpers shared with the stream.
  bool monotone() const { return kind_ != WeightKind::custom; }
  /// Weight of a tuple already sorted non-increasingly with entries >= 0.
  double sorted_weight(const Index* a) const;
  const GrowthCertificate& certificate() const { return cert_; }

 private:
  WeightFamily() = default;

  double factor(Index j) const;
  Index axis_reach(double t) const;
  CertifiedValue mixed_tail(int depth, double t, double alpha, double tol) const;
  CertifiedValue box_tail(double t, double alpha, double tol) const;
  template <class F>
  void for_each_sorted_leq(double t, F&& visit) const;
  template <class F>
  void for_each_in_box(Index radius, F&& visit) const;

  WeightKind kind_ = WeightKind::mixed;
  double s_ = 0.0;
  double r_ = 0.0;
  int d_ = 1;
  Rule rule_;
  GrowthCertificate cert_;
  std::string label_;
};

/// Lattice points in order of non-decreasing weight; ties ordered by
/// (|k|_1, k lexicographic). Single consumer.
class RearrangementStream {
 public:
  struct Emission {
    double weight;
    Point point;
  };

  explicit RearrangementStream(std::shared_ptr<const WeightFamily> family);
  explicit RearrangementStream(const WeightFamily& family);

  Emission next();
  /// Consumes every remaining point of the current weight; returns (weight, count).
  std::pair<double, Index> next_run();
  Index emitted() const { return emitted_; }

 private:
  using Tuple = std::array<Index, kMaxDimension>;
  struct Node {
    double weight;
    Tuple a;
  };
  struct Heavier {
    bool operator()(const Node& x, const Node& y) const;
  };

  void pop_batch(bool expand);
  void push_children(const Tuple& a);
  void fill_custom_batch(bool expand);
  Index multiplicity(const Tuple& a) const;
  void expand(const Tuple& a, std::vector<Point>& out) const;

  std::shared_ptr<const WeightFamily> fam_;
  int d_;
  std::priority_queue<Node, std::vector<Node>, Heavier> heap_;
  std::deque<Point> pending_;
  double pending_weight_ = 0.0;
  Index pending_count_ = 0;
  Index emitted_ = 0;
  // custom families: points sorted by weight in successive threshold shells
  double shell_lo_ = -1.0;
  double shell_hi_ = 0.0;
  std::vector<std::pair<double, Point>> shell_;
  std::size_t shell_pos_ = 0;
};

/// λ_n = 1 / (n-th smallest weight).
SourcePtr rearranged_source(const WeightFamily& family);

struct FeasibilityResult {
  bool feasible;
  /// Exponent α = pq/(p-q) of the series that decides it (0 when p <= q).
  double exponent;
  std::string certificate;
};

/// Whether the identity from the weighted ℓ_p space into ℓ_q is bounded.
FeasibilityResult embedding_feasible(const WeightFamily& family, double p, double q);

}  // namespace nterm
