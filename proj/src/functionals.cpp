#include "mvcr/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace mvcr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_delta(double delta, const char* what) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument(std::string(what) + ": delta must lie in (0, 1)");
  }
}

void check_range(double lo, double hi, const char* what) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo <= hi)) {
    throw std::invalid_argument(std::string(what) + ": invalid range");
  }
}

IntervalResult symmetric(double center, double radius, double lo, double hi, std::string method) {
  IntervalResult r;
  r.lower = std::clamp(center - radius, lo, hi);
  r.upper = std::clamp(center + radius, lo, hi);
  r.method = std::move(method);
  return r;
}

std::string empty_region_message(const EmpiricalDistribution& phat, const RegionSpec& spec, Count m,
                                 std::uint64_t candidates) {
  std::ostringstream msg;
  msg << "no grid point at resolution M=" << m << " lies in the " << to_string(spec.kind) << " region of phat="
      << phat.to_string() << " at delta=" << spec.delta << " (" << candidates
      << " candidates inside the bounding box); use a finer grid";
  return msg.str();
}

}  // namespace

LinearFunctional::LinearFunctional(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("LinearFunctional: at least one value is required");
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("LinearFunctional: values must be finite");
  }
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  min_ = *lo;
  max_ = *hi;
}

LinearFunctional LinearFunctional::mean(std::size_t k) {
  std::vector<double> v(k);
  for (std::size_t i = 0; i < k; ++i) v[i] = double(i);
  return LinearFunctional(std::move(v));
}

double LinearFunctional::operator()(const SimplexPoint& p) const {
  if (p.k() != k()) throw std::invalid_argument("LinearFunctional: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < k(); ++i) s += values_[i] * p[i];
  return s;
}

double LinearFunctional::operator()(const EmpiricalDistribution& phat) const {
  if (phat.k() != k()) throw std::invalid_argument("LinearFunctional: dimension mismatch");
  if (phat.n() == 0) throw std::domain_error("LinearFunctional: empty sample");
  double s = 0.0;
  for (std::size_t i = 0; i < k(); ++i) s += values_[i] * double(phat[i]);
  return s / double(phat.n());
}

Count default_grid_resolution(Count n) { return std::max<Count>(10 * n, 150); }

IntervalResult functional_interval(const EmpiricalDistribution& phat, const LinearFunctional& f,
                                   const RegionSpec& spec, Count grid_resolution, const ScanOptions& options) {
  if (f.k() != phat.k() || spec.k != phat.k()) {
    throw std::invalid_argument("functional_interval: dimension mismatch");
  }
  if (grid_resolution == 0) throw std::invalid_argument("functional_interval: grid resolution must be positive");
  const std::size_t k = phat.k();
  const RegionBox box = region_bounding_box(phat, spec);
  const SimplexGrid grid(k, grid_resolution);

  std::uint64_t grid_points = 0;
  bool use_grid = true;
  try {
    grid_points = grid.size();
    use_grid = grid_points <= options.max_grid_points;
  } catch (const std::overflow_error&) {
    use_grid = false;
  }

  IntervalResult result;
  result.lower = f.min_value();
  result.upper = f.max_value();
  double found_lo = kInf;
  double found_hi = -kInf;

  if (!use_grid) {
    // Dirichlet(1, ..., 1) proposals, kept only when they land in the box.
    std::mt19937_64 rng(options.seed);
    std::gamma_distribution<double> gamma(1.0, 1.0);
    std::vector<double> draw(k);
    for (std::uint64_t d = 0; d < options.mc_draws; ++d) {
      double sum = 0.0;
      for (double& x : draw) sum += (x = gamma(rng));
      bool inside = true;
      for (std::size_t i = 0; i < k; ++i) {
        draw[i] /= sum;
        inside = inside && draw[i] >= box.lower[i] && draw[i] <= box.upper[i];
      }
      if (!inside) continue;
      const SimplexPoint p(draw, /*renormalize=*/true);
      if (!region_membership(p, phat, spec)) continue;
      const double v = f(p);
      found_lo = std::min(found_lo, v);
      found_hi = std::max(found_hi, v);
      ++result.member_points;
    }
    if (result.member_points == 0) {
      throw EmptyRegionError("no Monte Carlo proposal out of " + std::to_string(options.mc_draws) +
                             " landed in the region of phat=" + phat.to_string());
    }
    result.method = std::string(to_string(spec.kind)) + "-mc";
    result.mc_draws = options.mc_draws;
  } else {
    std::vector<std::pair<double, SimplexPoint>> candidates;
    grid.for_each_in_box(box.lower, box.upper, [&](const SimplexPoint& p) { candidates.emplace_back(f(p), p); });

    if (spec.kind == Construction::LevelSet) {
      // Exact membership is the expensive part: walk candidates in order of f
      // and stop at the first member from each end.
      std::sort(candidates.begin(), candidates.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (options.side != IntervalSide::UpperOnly) {
        for (const auto& [v, p] : candidates) {
          if (region_membership(p, phat, spec)) {
            found_lo = v;
            ++result.member_points;
            break;
          }
        }
      }
      if (options.side != IntervalSide::LowerOnly) {
        for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
          if (region_membership(it->second, phat, spec)) {
            found_hi = it->first;
            ++result.member_points;
            break;
          }
        }
      }
    } else {
      for (const auto& [v, p] : candidates) {
        if (!region_membership(p, phat, spec)) continue;
        found_lo = std::min(found_lo, v);
        found_hi = std::max(found_hi, v);
        ++result.member_points;
      }
    }
    if (result.member_points == 0) {
      throw EmptyRegionError(empty_region_message(phat, spec, grid_resolution, candidates.size()));
    }
    result.method = std::string(to_string(spec.kind)) + "-grid";
    result.grid_resolution = grid_resolution;
    result.conservative_padding = f.spread() * double(k - 1) / double(grid_resolution);
  }

  const double pad = result.conservative_padding;
  if (options.side != IntervalSide::UpperOnly) result.lower = std::max(f.min_value(), found_lo - pad);
  if (options.side != IntervalSide::LowerOnly) result.upper = std::min(f.max_value(), found_hi + pad);
  return result;
}

IntervalResult chi2_functional_interval(const EmpiricalDistribution& phat, const LinearFunctional& f, double delta,
                                        Count grid_resolution) {
  check_delta(delta, "chi2_functional_interval");
  if (f.k() != phat.k()) throw std::invalid_argument("chi2_functional_interval: dimension mismatch");
  if (phat.n() == 0) throw std::domain_error("chi2_functional_interval: empty sample");
  const std::size_t k = phat.k();
  const RegionSpec spec(delta, Construction::LevelSet, phat.n(), k);
  const RegionBox box = region_bounding_box(phat, spec);
  const SimplexGrid grid(k, grid_resolution);
  const double critical = chi2_critical_value(k, delta);
  const double n = phat.n();

  std::vector<double> coord(grid_resolution + 1);
  for (Count c = 0; c <= grid_resolution; ++c) coord[c] = grid.coordinate(c);

  double lo = kInf, hi = -kInf;
  std::uint64_t members = 0;
  grid.for_each_cell_in_box(box.lower, box.upper, [&](std::span<const Count> cell) {
    double stat = 0.0;
    double value = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double expected = n * coord[cell[i]];
      const double diff = double(phat[i]) - expected;
      stat += diff * diff / expected;
      value += f.values()[i] * coord[cell[i]];
    }
    if (stat > critical) return;
    lo = std::min(lo, value);
    hi = std::max(hi, value);
    ++members;
  });
  if (members == 0) {
    throw EmptyRegionError("no grid point lies in the chi-square region of phat=" + phat.to_string());
  }
  IntervalResult r;
  r.conservative_padding = f.spread() * double(k - 1) / double(grid_resolution);
  r.lower = std::max(f.min_value(), lo - r.conservative_padding);
  r.upper = std::min(f.max_value(), hi + r.conservative_padding);
  r.method = "chi2-grid";
  r.grid_resolution = grid_resolution;
  r.member_points = members;
  return r;
}

IntervalResult hoeffding_interval(double mean_hat, Count n, double delta, double range_lo, double range_hi) {
  check_delta(delta, "hoeffding_interval");
  check_range(range_lo, range_hi, "hoeffding_interval");
  if (n == 0) throw std::invalid_argument("hoeffding_interval: n must be positive");
  const double radius = (range_hi - range_lo) * std::sqrt(std::log(2.0 / delta) / (2.0 * double(n)));
  return symmetric(mean_hat, radius, range_lo, range_hi, "hoeffding");
}

IntervalResult oracle_chernoff_interval(double mean_hat, double variance_true, Count n, double delta,
                                        double range_lo, double range_hi) {
  check_delta(delta, "oracle_chernoff_interval");
  check_range(range_lo, range_hi, "oracle_chernoff_interval");
  if (n == 0) throw std::invalid_argument("oracle_chernoff_interval: n must be positive");
  if (!(variance_true >= 0.0)) throw std::invalid_argument("oracle_chernoff_interval: variance must be >= 0");
  const double radius = std::sqrt(2.0 * variance_true * std::log(2.0 / delta) / double(n));
  return symmetric(mean_hat, radius, range_lo, range_hi, "oracle-chernoff");
}

namespace {

IntervalResult bernstein_from_moments(double mean, double variance, double n, double delta, double lo, double hi) {
  const double log_term = std::log(3.0 / delta);
  const double radius = std::sqrt(2.0 * variance * log_term / n) + 3.0 * (hi - lo) * log_term / n;
  return symmetric(mean, radius, lo, hi, "empirical-bernstein");
}

}  // namespace

IntervalResult empirical_bernstein_interval(std::span<const double> samples, double delta, double range_lo,
                                            double range_hi) {
  check_delta(delta, "empirical_bernstein_interval");
  check_range(range_lo, range_hi, "empirical_bernstein_interval");
  if (samples.size() < 2) throw std::invalid_argument("empirical_bernstein_interval: needs at least 2 samples");
  double mean = 0.0;
  for (double x : samples) {
    if (!(x >= range_lo && x <= range_hi)) {
      throw std::invalid_argument("empirical_bernstein_interval: sample outside the declared range");
    }
    mean += x;
  }
  const double n = double(samples.size());
  mean /= n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  return bernstein_from_moments(mean, ss / (n - 1.0), n, delta, range_lo, range_hi);
}

IntervalResult empirical_bernstein_interval(const EmpiricalDistribution& phat, const LinearFunctional& f,
                                            double delta) {
  check_delta(delta, "empirical_bernstein_interval");
  if (phat.n() < 2) throw std::invalid_argument("empirical_bernstein_interval: needs at least 2 samples");
  const double mean = f(phat);
  double ss = 0.0;
  for (std::size_t i = 0; i < f.k(); ++i) {
    const double d = f.values()[i] - mean;
    ss += double(phat[i]) * d * d;
  }
  const double n = phat.n();
  return bernstein_from_moments(mean, ss / (n - 1.0), n, delta, f.min_value(), f.max_value());
}

IntervalResult kl_bernoulli_interval(double mean_hat, Count n, double delta) {
  check_delta(delta, "kl_bernoulli_interval");
  if (n == 0) throw std::invalid_argument("kl_bernoulli_interval: n must be positive");
  if (!(mean_hat >= 0.0 && mean_hat <= 1.0)) {
    throw std::invalid_argument("kl_bernoulli_interval: mean must lie in [0, 1]");
  }
  const auto [lo, hi] = kl_bernoulli_ball(mean_hat, std::log(2.0 / delta) / double(n), 1e-12);
  IntervalResult r;
  r.lower = lo;
  r.upper = hi;
  r.method = "kl-bernoulli";
  return r;
}

SimplexPoint InducedMeasureSampler::point_for(double u) {
  if (!(u >= -1.0 && u <= 1.0)) throw std::invalid_argument("InducedMeasureSampler: u must lie in [-1, 1]");
  if (u >= 0.0) return SimplexPoint({u, 1.0 - u, 0.0});
  return SimplexPoint({0.0, 1.0 + u, -u});
}

SimplexPoint InducedMeasureSampler::operator()() {
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  return point_for(uniform(rng_));
}

}  // namespace mvcr
