#include "mvcr/bandit.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace mvcr {

namespace {

class HoeffdingBounds final : public BoundProvider {
 public:
  ConfidenceBounds bounds(const EmpiricalDistribution& counts, const LinearFunctional& values,
                          double delta) const override {
    const auto r = hoeffding_interval(values(counts), counts.n(), delta, values.min_value(), values.max_value());
    return {r.lower, r.upper};
  }
};

class KlBernoulliBounds final : public BoundProvider {
 public:
  ConfidenceBounds bounds(const EmpiricalDistribution& counts, const LinearFunctional& values,
                          double delta) const override {
    const double lo = values.min_value();
    const double spread = values.spread();
    if (spread == 0.0) return {lo, lo};
    const double unit_mean = std::clamp((values(counts) - lo) / spread, 0.0, 1.0);
    const auto r = kl_bernoulli_interval(unit_mean, counts.n(), delta);
    return {lo + spread * r.lower, lo + spread * r.upper};
  }
};

class LevelSetBounds final : public BoundProvider {
 public:
  LevelSetBounds(Count resolution, bool chi2) : resolution_(resolution), chi2_(chi2) {}

  ConfidenceBounds bounds(const EmpiricalDistribution& counts, const LinearFunctional& values,
                          double delta) const override {
    const auto r = chi2_ ? chi2_functional_interval(counts, values, delta, resolution_)
                         : functional_interval(counts, values, spec(counts, delta), resolution_);
    return {r.lower, r.upper};
  }

  bool approximate() const override { return chi2_; }

  double confirmed_lower(const EmpiricalDistribution& counts, const LinearFunctional& values,
                         double delta) const override {
    ScanOptions options;
    options.side = IntervalSide::LowerOnly;
    return functional_interval(counts, values, spec(counts, delta), resolution_, options).lower;
  }

  double confirmed_upper(const EmpiricalDistribution& counts, const LinearFunctional& values,
                         double delta) const override {
    ScanOptions options;
    options.side = IntervalSide::UpperOnly;
    return functional_interval(counts, values, spec(counts, delta), resolution_, options).upper;
  }

 private:
  static RegionSpec spec(const EmpiricalDistribution& counts, double delta) {
    return RegionSpec(delta, Construction::LevelSet, counts.n(), counts.k());
  }

  Count resolution_;
  bool chi2_;
};

}  // namespace

Arm::Arm(SimplexPoint pmf_, LinearFunctional values_) : pmf(std::move(pmf_)), values(std::move(values_)) {
  if (pmf.k() != values.k()) throw std::invalid_argument("Arm: pmf and payoff dimensions differ");
}

std::vector<Arm> star_rating_arms() {
  const LinearFunctional stars({0.0, 0.5, 1.0});
  return {
      Arm(SimplexPoint({0.1, 0.6, 0.3}), stars), Arm(SimplexPoint({0.3, 0.6, 0.1}), stars),
      Arm(SimplexPoint({0.4, 0.5, 0.1}), stars), Arm(SimplexPoint({0.6, 0.3, 0.1}), stars),
      Arm(SimplexPoint({0.7, 0.2, 0.1}), stars),
  };
}

std::string_view to_string(BoundMethod method) {
  switch (method) {
    case BoundMethod::LevelSet: return "levelset";
    case BoundMethod::KlBernoulli: return "kl-bernoulli";
    case BoundMethod::Hoeffding: return "hoeffding";
  }
  return "unknown";
}

std::optional<BoundMethod> parse_bound_method(std::string_view name) {
  if (name == "levelset") return BoundMethod::LevelSet;
  if (name == "kl-bernoulli") return BoundMethod::KlBernoulli;
  if (name == "hoeffding") return BoundMethod::Hoeffding;
  return std::nullopt;
}

std::unique_ptr<BoundProvider> make_bound_provider(const LucbConfig& config) {
  switch (config.method) {
    case BoundMethod::Hoeffding: return std::make_unique<HoeffdingBounds>();
    case BoundMethod::KlBernoulli: return std::make_unique<KlBernoulliBounds>();
    case BoundMethod::LevelSet: return std::make_unique<LevelSetBounds>(config.grid_resolution, config.chi2_prefilter);
  }
  throw std::invalid_argument("make_bound_provider: unknown method");
}

BanditRun lucb_run(std::span<const Arm> arms, const LucbConfig& config) {
  const auto provider = make_bound_provider(config);
  return lucb_run(arms, config, *provider);
}

BanditRun lucb_run(std::span<const Arm> arms, const LucbConfig& config, const BoundProvider& provider) {
  if (arms.size() < 2) throw std::invalid_argument("lucb_run: needs at least two arms");
  if (!(config.delta > 0.0 && config.delta < 1.0)) throw std::invalid_argument("lucb_run: delta must lie in (0, 1)");
  if (!(config.tolerance >= 0.0)) throw std::invalid_argument("lucb_run: tolerance must be nonnegative");
  const std::size_t num_arms = arms.size();
  if (config.max_samples < num_arms) throw std::invalid_argument("lucb_run: sample cap below the number of arms");

  std::mt19937_64 rng(config.seed);
  std::vector<std::discrete_distribution<std::size_t>> draw;
  std::vector<std::vector<Count>> counts;
  for (const Arm& arm : arms) {
    draw.emplace_back(arm.pmf.probs().begin(), arm.pmf.probs().end());
    counts.emplace_back(arm.pmf.k(), 0);
  }

  BanditRun run;
  run.seed = config.seed;
  run.method = config.method;
  run.per_arm_counts.assign(num_arms, 0);
  auto pull = [&](std::size_t a) {
    ++counts[a][draw[a](rng)];
    ++run.per_arm_counts[a];
    ++run.stopping_time;
  };
  for (std::size_t a = 0; a < num_arms; ++a) pull(a);

  std::vector<ConfidenceBounds> bounds(num_arms);
  std::vector<double> means(num_arms);
  for (std::uint64_t t = 1;; ++t) {
    run.rounds = t;
    const double round_delta = config.delta / (double(num_arms) * double(t) * double(t + 1));
    std::vector<EmpiricalDistribution> observed;
    observed.reserve(num_arms);
    for (std::size_t a = 0; a < num_arms; ++a) {
      observed.emplace_back(counts[a]);
      bounds[a] = provider.bounds(observed[a], arms[a].values, round_delta);
      means[a] = arms[a].values(observed[a]);
    }
    const std::size_t best = std::size_t(std::max_element(means.begin(), means.end()) - means.begin());
    std::size_t challenger = best == 0 ? 1 : 0;
    for (std::size_t a = 0; a < num_arms; ++a) {
      if (a != best && bounds[a].upper > bounds[challenger].upper) challenger = a;
    }
    run.identified_arm = best;

    if (bounds[best].lower >= bounds[challenger].upper - config.tolerance) {
      if (!provider.approximate()) return run;
      ++run.exact_checks;
      const double lower = provider.confirmed_lower(observed[best], arms[best].values, round_delta);
      bool separated = true;
      for (std::size_t a = 0; a < num_arms && separated; ++a) {
        if (a == best) continue;
        separated = lower >= provider.confirmed_upper(observed[a], arms[a].values, round_delta) - config.tolerance;
      }
      if (separated) return run;
    }

    if (run.stopping_time + 2 > config.max_samples) {
      run.capped = true;
      return run;
    }
    pull(best);
    pull(challenger);
  }
}

}  // namespace mvcr
