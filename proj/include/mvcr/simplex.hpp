#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mvcr {

using Count = std::uint32_t;

class SimplexPoint;

/// A point of the discrete simplex: k category counts summing to n.
///
/// Ordering is lexicographic on the count vector. Downstream tie-breaking
/// relies on this order, so it is part of the public contract.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<Count> counts);

  std::size_t k() const { return counts_.size(); }
  Count n() const { return n_; }
  const std::vector<Count>& counts() const { return counts_; }
  Count operator[](std::size_t i) const { return counts_[i]; }

  /// counts[i] / n. Throws std::domain_error when n == 0.
  double proportion(std::size_t i) const;
  SimplexPoint as_point() const;

  std::string to_string() const;

  friend bool operator==(const EmpiricalDistribution&, const EmpiricalDistribution&) = default;
  friend std::strong_ordering operator<=>(const EmpiricalDistribution& a,
                                          const EmpiricalDistribution& b) {
    return a.counts_ <=> b.counts_;
  }

 private:
  std::vector<Count> counts_;
  Count n_ = 0;
};

/// A point of the probability simplex. Construction rejects inputs whose sum
/// is off by more than kSumTolerance unless renormalization is requested.
class SimplexPoint {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit SimplexPoint(std::vector<double> probs, bool renormalize = false);

  static SimplexPoint uniform(std::size_t k);

  std::size_t k() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  std::string to_string() const;

  friend bool operator==(const SimplexPoint&, const SimplexPoint&) = default;

 private:
  std::vector<double> probs_;
};

/// binomial(n + k - 1, k - 1), the size of the discrete simplex.
/// Throws std::overflow_error naming the required capacity when the count
/// does not fit in 64 bits.
std::uint64_t simplex_size(std::size_t k, Count n);

/// Visits every count vector of length k summing to n in lexicographic order.
/// The span is only valid for the duration of the callback.
void for_each_composition(std::size_t k, Count n,
                          const std::function<void(std::span<const Count>)>& visit);

/// All of the discrete simplex, lexicographically ordered.
std::vector<EmpiricalDistribution> enumerate_simplex(std::size_t k, Count n);

/// log(m!) from a cached table for small m and lgamma beyond it.
double log_factorial(Count m);

/// Multinomial log-pmf evaluator with log p and log-factorials precomputed,
/// for the inner loops that score many outcomes against one parameter.
class MultinomialLogPmf {
 public:
  MultinomialLogPmf(const SimplexPoint& p, Count n);

  /// -infinity exactly when some count is positive on a zero-probability cell.
  double operator()(std::span<const Count> counts) const;

  std::size_t k() const { return log_p_.size(); }
  Count n() const { return n_; }
  double log_p(std::size_t i) const { return log_p_[i]; }
  double log_factorial(Count m) const { return log_fact_[m]; }

 private:
  std::vector<double> log_p_;
  std::vector<double> log_fact_;
  Count n_;
};

/// Natural-log multinomial probability of observing phat under p.
double log_pmf(const EmpiricalDistribution& phat, const SimplexPoint& p);

double kl_divergence(const SimplexPoint& p, const SimplexPoint& q);
/// KL(phat / n, q); for n == 0 the divergence is taken as 0.
double kl_divergence(const EmpiricalDistribution& phat, const SimplexPoint& q);
double kl_bernoulli(double a, double b);

/// The interval {b in [0,1] : kl_bernoulli(a, b) <= radius}, endpoints by
/// bisection to within `tolerance`. The result always contains a.
std::pair<double, double> kl_bernoulli_ball(double a, double radius, double tolerance = 1e-12);

/// The discrete simplex of resolution M mapped into the open simplex.
///
/// Cell c (counts summing to M) maps to p_i = (c_i + 1/k) / (M + 1), which
/// places every point strictly inside the simplex at the centre of its
/// lattice cell. The point count is binomial(M + k - 1, k - 1).
class SimplexGrid {
 public:
  SimplexGrid(std::size_t k, Count resolution);

  std::size_t k() const { return k_; }
  Count resolution() const { return resolution_; }
  std::uint64_t size() const;

  double coordinate(Count cell) const;
  SimplexPoint point(std::span<const Count> cell) const;

  void for_each(const std::function<void(const SimplexPoint&)>& visit) const;

  /// Visits the cells whose coordinates fall inside [lower, upper], give or
  /// take 1e-9, in lexicographic order. No SimplexPoint is built.
  void for_each_cell_in_box(std::span<const double> lower, std::span<const double> upper,
                            const std::function<void(std::span<const Count>)>& visit) const;

  /// Visits only points whose coordinates satisfy lower[i] <= p_i <= upper[i].
  void for_each_in_box(std::span<const double> lower, std::span<const double> upper,
                       const std::function<void(const SimplexPoint&)>& visit) const;

  std::vector<SimplexPoint> points() const;

 private:
  std::size_t k_;
  Count resolution_;
};

}  // namespace mvcr
