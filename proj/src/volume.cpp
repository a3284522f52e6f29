#include "mvcr/volume.hpp"

#include <random>
#include <stdexcept>
#include <string>

#include "mvcr/summation.hpp"

namespace mvcr {

namespace {

void check_resolution(Count m, const char* what) {
  if (m < 50) throw std::invalid_argument(std::string(what) + ": grid resolution must be at least 50");
}

}  // namespace

double region_volume(const EmpiricalDistribution& phat, const RegionSpec& spec, Count grid_resolution) {
  check_resolution(grid_resolution, "region_volume");
  if (phat.k() != spec.k || phat.n() != spec.n) {
    throw std::invalid_argument("region_volume: phat does not match RegionSpec");
  }
  if (phat.n() == 0) return 1.0;
  const SimplexGrid grid(spec.k, grid_resolution);
  const RegionBox box = region_bounding_box(phat, spec);
  std::uint64_t inside = 0;
  grid.for_each_in_box(box.lower, box.upper, [&](const SimplexPoint& p) {
    if (region_membership(p, phat, spec)) ++inside;
  });
  return double(inside) / double(grid.size());
}

VolumeReport average_volume(const RegionSpec& spec, Count grid_resolution) {
  check_resolution(grid_resolution, "average_volume");
  VolumeReport report;
  report.construction = spec.kind;
  report.grid_resolution = grid_resolution;
  KahanSum total;
  for (const auto& phat : enumerate_simplex(spec.k, spec.n)) {
    const double v = region_volume(phat, spec, grid_resolution);
    report.per_phat.emplace(phat, v);
    total.add(v);
  }
  report.total = total.value();
  return report;
}

double covering_size_integral(Count n, std::size_t k, double delta, Count grid_resolution) {
  check_resolution(grid_resolution, "covering_size_integral");
  const SimplexGrid grid(k, grid_resolution);
  KahanSum sum;
  grid.for_each([&](const SimplexPoint& p) { sum.add(double(covering_collection(p, n, delta).size())); });
  return sum.value() / double(grid.size());
}

std::vector<double> uniform_prior_volumes(const RegionSpec& spec, Count grid_resolution, std::uint64_t draws,
                                          std::uint64_t seed) {
  check_resolution(grid_resolution, "uniform_prior_volumes");
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::map<EmpiricalDistribution, double> cache;
  std::vector<double> out;
  out.reserve(draws);
  std::vector<double> p(spec.k);
  for (std::uint64_t d = 0; d < draws; ++d) {
    double sum = 0.0;
    for (double& x : p) sum += (x = gamma(rng));
    // Multinomial draw as a chain of conditional binomials.
    std::vector<Count> counts(spec.k, 0);
    Count remaining = spec.n;
    double mass_left = 1.0;
    for (std::size_t i = 0; i + 1 < spec.k && remaining > 0; ++i) {
      const double pi = p[i] / sum;
      const double prob = mass_left > 0.0 ? std::min(1.0, pi / mass_left) : 1.0;
      std::binomial_distribution<Count> binom(remaining, prob);
      counts[i] = binom(rng);
      remaining -= counts[i];
      mass_left -= pi;
    }
    counts[spec.k - 1] += remaining;
    EmpiricalDistribution phat(std::move(counts));
    auto it = cache.find(phat);
    if (it == cache.end()) it = cache.emplace(phat, region_volume(phat, spec, grid_resolution)).first;
    out.push_back(it->second);
  }
  return out;
}

}  // namespace mvcr
