#include <doctest.h>

#include <cmath>

#include "mvcr/bandit.hpp"

using namespace mvcr;

namespace {

/// Hoeffding bounds computed here rather than by the library provider.
class TableHoeffding final : public BoundProvider {
 public:
  ConfidenceBounds bounds(const EmpiricalDistribution& counts, const LinearFunctional& values,
                          double delta) const override {
    const double mean = values(counts);
    const double radius = values.spread() * std::sqrt(std::log(2.0 / delta) / (2.0 * counts.n()));
    return {std::max(values.min_value(), mean - radius), std::min(values.max_value(), mean + radius)};
  }
};

std::vector<Arm> deterministic_arms() {
  const LinearFunctional payoff({1.0, 0.0});
  return {Arm(SimplexPoint({0.0, 1.0}), payoff), Arm(SimplexPoint({1.0, 0.0}), payoff)};
}

}  // namespace

TEST_CASE("rating arms") {
  const auto arms = star_rating_arms();
  REQUIRE(arms.size() == 5);
  const std::vector<double> means{0.6, 0.4, 0.35, 0.25, 0.2};
  for (std::size_t a = 0; a < 5; ++a) CHECK(arms[a].mean() == doctest::Approx(means[a]));
}

TEST_CASE("deterministic arms with disjoint supports") {
  const auto arms = deterministic_arms();
  for (BoundMethod method : {BoundMethod::LevelSet, BoundMethod::KlBernoulli, BoundMethod::Hoeffding}) {
    LucbConfig config;
    config.method = method;
    config.grid_resolution = 100;
    const BanditRun run = lucb_run(arms, config);
    CHECK_FALSE(run.capped);
    CHECK(run.identified_arm == 1);
    CHECK(run.stopping_time >= 2);
    CHECK(run.stopping_time < 200);
    CHECK(run.per_arm_counts[0] + run.per_arm_counts[1] == run.stopping_time);
  }
}

TEST_CASE("identical seeds give identical runs") {
  const auto arms = star_rating_arms();
  for (BoundMethod method : {BoundMethod::KlBernoulli, BoundMethod::Hoeffding}) {
    LucbConfig config;
    config.method = method;
    config.seed = 77;
    const BanditRun a = lucb_run(arms, config);
    const BanditRun b = lucb_run(arms, config);
    CHECK(a == b);
    CHECK(a.stopping_time >= arms.size());
    CHECK(a.identified_arm < arms.size());
    std::uint64_t total = 0;
    for (auto c : a.per_arm_counts) total += c;
    CHECK(total == a.stopping_time);
    config.seed = 78;
    CHECK_FALSE(lucb_run(arms, config) == a);
  }
}

TEST_CASE("sampling depends only on interval endpoints") {
  const auto arms = star_rating_arms();
  LucbConfig config;
  config.method = BoundMethod::Hoeffding;
  config.seed = 5;
  const BanditRun builtin = lucb_run(arms, config);
  const BanditRun table = lucb_run(arms, config, TableHoeffding{});
  CHECK(builtin.stopping_time == table.stopping_time);
  CHECK(builtin.per_arm_counts == table.per_arm_counts);
  CHECK(builtin.identified_arm == table.identified_arm);
}

TEST_CASE("level-set LUCB on the rating arms") {
  const auto arms = star_rating_arms();
  for (std::uint64_t seed : {1u, 2u}) {
    LucbConfig config;
    config.method = BoundMethod::LevelSet;
    config.seed = seed;
    const BanditRun run = lucb_run(arms, config);
    CHECK_FALSE(run.capped);
    CHECK(run.identified_arm == 0);
    CHECK(run.exact_checks >= 1);
  }
}

TEST_CASE("sample cap is reported") {
  LucbConfig config;
  config.method = BoundMethod::Hoeffding;
  config.max_samples = 50;
  const BanditRun run = lucb_run(star_rating_arms(), config);
  CHECK(run.capped);
  CHECK(run.stopping_time <= 50);
}

TEST_CASE("invalid bandit inputs") {
  const auto arms = star_rating_arms();
  LucbConfig config;
  CHECK_THROWS(lucb_run(std::span<const Arm>(arms.data(), 1), config));
  config.delta = 1.0;
  CHECK_THROWS(lucb_run(arms, config));
  CHECK_THROWS(Arm(SimplexPoint({0.5, 0.5}), LinearFunctional({0.0, 0.5, 1.0})));
  CHECK(parse_bound_method("kl-bernoulli") == BoundMethod::KlBernoulli);
  CHECK_FALSE(parse_bound_method("ucb1").has_value());
}
