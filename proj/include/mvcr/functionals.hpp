#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvcr/regions.hpp"
#include "mvcr/simplex.hpp"

namespace mvcr {

/// f(p) = sum_i values[i] * p_i.
class LinearFunctional {
 public:
  explicit LinearFunctional(std::vector<double> values);

  /// values = (0, 1, ..., k - 1).
  static LinearFunctional mean(std::size_t k);

  std::size_t k() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double min_value() const { return min_; }
  double max_value() const { return max_; }
  /// max_{i,j} |v_i - v_j|: the most f can change per unit of mass moved.
  double spread() const { return max_ - min_; }

  double operator()(const SimplexPoint& p) const;
  double operator()(const EmpiricalDistribution& phat) const;

 private:
  std::vector<double> values_;
  double min_;
  double max_;
};

struct IntervalResult {
  double lower;
  double upper;
  std::string method;
  std::optional<Count> grid_resolution;
  double conservative_padding = 0.0;
  /// Grid points (or Monte Carlo proposals) found inside the region.
  std::uint64_t member_points = 0;
  /// Monte Carlo proposals drawn, when the scan was sampled instead of gridded.
  std::optional<std::uint64_t> mc_draws;

  double width() const { return upper - lower; }
};

/// Thrown when no scanned point lands inside the region.
class EmptyRegionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class IntervalSide { Both, LowerOnly, UpperOnly };

struct ScanOptions {
  /// Dense grids larger than this switch to Monte Carlo sampling.
  std::uint64_t max_grid_points = 4'000'000;
  std::uint64_t mc_draws = 200'000;
  std::uint64_t seed = 0;
  IntervalSide side = IntervalSide::Both;
};

/// max(10 n, 150): the resolution used when the caller does not pick one.
Count default_grid_resolution(Count n);

/// Range of f over the grid points of SimplexGrid(k, M) inside C(phat),
/// widened by spread * (k - 1) / M on each side and clamped to f's range.
///
/// Only points inside region_bounding_box are examined. For the level-set
/// construction candidates are visited in order of f so the scan stops at the
/// first member from each end.
IntervalResult functional_interval(const EmpiricalDistribution& phat, const LinearFunctional& f,
                                   const RegionSpec& spec, Count grid_resolution,
                                   const ScanOptions& options = {});

/// Range of f over the grid points inside the Pearson chi-square region
/// {p : statistic(phat, p) <= critical value at delta}, clipped to the
/// level-set bounding box. An approximation of the level-set interval.
IntervalResult chi2_functional_interval(const EmpiricalDistribution& phat, const LinearFunctional& f,
                                        double delta, Count grid_resolution);

IntervalResult hoeffding_interval(double mean_hat, Count n, double delta, double range_lo, double range_hi);

/// Sub-Gaussian interval with the true variance as the proxy.
IntervalResult oracle_chernoff_interval(double mean_hat, double variance_true, Count n, double delta,
                                        double range_lo, double range_hi);

/// Empirical Bernstein interval:
/// mean +- [sqrt(2 V log(3/delta) / n) + 3 (b - a) log(3/delta) / n],
/// V the unbiased sample variance.
IntervalResult empirical_bernstein_interval(std::span<const double> samples, double delta, double range_lo,
                                            double range_hi);
/// Same, with the sample described by category counts and values.
IntervalResult empirical_bernstein_interval(const EmpiricalDistribution& phat, const LinearFunctional& f,
                                            double delta);

/// {m : kl_bernoulli(mean_hat, m) <= log(2/delta) / n}.
IntervalResult kl_bernoulli_interval(double mean_hat, Count n, double delta);

/// Mixture measure on the 3-simplex whose mean p_1 + 2 p_2 is uniform on [0, 2].
class InducedMeasureSampler {
 public:
  explicit InducedMeasureSampler(std::uint64_t seed) : rng_(seed) {}

  /// The deterministic map from u in [-1, 1] to the simplex.
  static SimplexPoint point_for(double u);

  SimplexPoint operator()();

 private:
  std::mt19937_64 rng_;
};

}  // namespace mvcr
