#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvcr/functionals.hpp"
#include "mvcr/simplex.hpp"

namespace mvcr {

/// A categorical arm: a pmf over k categories and the payoff of each category.
struct Arm {
  SimplexPoint pmf;
  LinearFunctional values;

  Arm(SimplexPoint pmf, LinearFunctional values);
  double mean() const { return values(pmf); }
};

/// The five 3-category rating arms, with 1/2/3 stars paying 0, 1/2 and 1.
std::vector<Arm> star_rating_arms();

enum class BoundMethod { LevelSet, KlBernoulli, Hoeffding };

std::string_view to_string(BoundMethod method);
std::optional<BoundMethod> parse_bound_method(std::string_view name);

struct ConfidenceBounds {
  double lower;
  double upper;
};

/// Confidence bounds on an arm's mean payoff. LUCB only ever looks at the
/// endpoints this returns.
class BoundProvider {
 public:
  virtual ~BoundProvider() = default;

  /// Bounds that drive the sampling rule.
  virtual ConfidenceBounds bounds(const EmpiricalDistribution& counts, const LinearFunctional& values,
                                  double delta) const = 0;

  /// True when bounds() is an approximation and a stop must be confirmed with
  /// confirmed_lower / confirmed_upper.
  virtual bool approximate() const { return false; }
  virtual double confirmed_lower(const EmpiricalDistribution& counts, const LinearFunctional& values,
                                 double delta) const {
    return bounds(counts, values, delta).lower;
  }
  virtual double confirmed_upper(const EmpiricalDistribution& counts, const LinearFunctional& values,
                                 double delta) const {
    return bounds(counts, values, delta).upper;
  }
};

struct LucbConfig {
  double delta = 0.05;
  double tolerance = 0.0;
  BoundMethod method = BoundMethod::LevelSet;
  std::uint64_t seed = 0;
  std::uint64_t max_samples = 1'000'000;
  /// Grid resolution for level-set (and chi-square) interval scans.
  Count grid_resolution = 300;
  /// Drive sampling with chi-square approximate regions and only run the
  /// exact level-set computation to confirm a stop.
  bool chi2_prefilter = true;
};

std::unique_ptr<BoundProvider> make_bound_provider(const LucbConfig& config);

struct BanditRun {
  std::uint64_t seed = 0;
  std::uint64_t stopping_time = 0;
  std::size_t identified_arm = 0;
  std::vector<std::uint64_t> per_arm_counts;
  BoundMethod method = BoundMethod::LevelSet;
  /// The sample cap was hit before the stopping rule fired.
  bool capped = false;
  std::uint64_t rounds = 0;
  /// Stops proposed by approximate bounds that went to exact confirmation.
  std::uint64_t exact_checks = 0;
  std::string delta_schedule = "delta/(K*t*(t+1))";

  friend bool operator==(const BanditRun&, const BanditRun&) = default;
};

/// LUCB best-arm identification. Round t uses delta / (K t (t + 1)) per arm,
/// samples the empirical leader and the highest-UCB challenger, and stops once
/// LCB(leader) >= UCB(every other arm) - tolerance.
BanditRun lucb_run(std::span<const Arm> arms, const LucbConfig& config);
BanditRun lucb_run(std::span<const Arm> arms, const LucbConfig& config, const BoundProvider& provider);

}  // namespace mvcr
