#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "mvcr/regions.hpp"
#include "mvcr/simplex.hpp"

namespace mvcr {

/// Region volumes as fractions of the simplex, one per outcome of the
/// discrete simplex.
struct VolumeReport {
  std::map<EmpiricalDistribution, double> per_phat;
  double total = 0.0;
  Construction construction = Construction::LevelSet;
  Count grid_resolution = 0;
  std::optional<std::uint64_t> mc_draws;
  std::optional<std::uint64_t> seed;
};

/// Fraction of SimplexGrid(k, M) points inside C(phat). Requires M >= 50.
double region_volume(const EmpiricalDistribution& phat, const RegionSpec& spec, Count grid_resolution);

/// region_volume summed over every outcome of Delta_{k,n}.
VolumeReport average_volume(const RegionSpec& spec, Count grid_resolution);

/// Grid average of |S**(p)|. Equal to average_volume(...).total when both
/// are counted on the same grid, since each side counts the same
/// (outcome, grid point) incidences.
double covering_size_integral(Count n, std::size_t k, double delta, Count grid_resolution);

/// Region volumes for phat drawn from Multinomial(n, p) with p uniform on the
/// simplex; one entry per draw. Volumes are cached per distinct outcome, so
/// two calls with the same seed see the same outcome sequence.
std::vector<double> uniform_prior_volumes(const RegionSpec& spec, Count grid_resolution, std::uint64_t draws,
                                          std::uint64_t seed);

}  // namespace mvcr
