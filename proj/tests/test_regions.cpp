#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>

#include "mvcr/regions.hpp"
#include "oracles.hpp"

using namespace mvcr;

namespace {

const SimplexPoint kUniform3({1.0 / 3, 1.0 / 3, 1.0 / 3});

std::vector<double> outcome_masses(const SimplexPoint& p, Count n) {
  std::vector<double> masses;
  for (const auto& c : oracle::compositions(p.k(), n)) {
    masses.push_back(oracle::multinomial_probability(c, std::vector<double>(p.probs().begin(), p.probs().end())));
  }
  return masses;
}

std::vector<double> as_vector(const SimplexPoint& p) { return {p.probs().begin(), p.probs().end()}; }

}  // namespace

TEST_CASE("covering collection of the uniform point in Delta(3, 5)") {
  const auto s = covering_collection(kUniform3, 5, 0.7);
  REQUIRE(s.size() == 3);
  const std::set<EmpiricalDistribution> members(s.members().begin(), s.members().end());
  const std::set<EmpiricalDistribution> expected{EmpiricalDistribution({1, 2, 2}), EmpiricalDistribution({2, 1, 2}),
                                                 EmpiricalDistribution({2, 2, 1})};
  CHECK(members == expected);
  CHECK(s.total_mass() == doctest::Approx(90.0 / 243.0));
  CHECK(s.total_mass() >= 0.3);
}

TEST_CASE("covering collection of a vertex") {
  const auto s = covering_collection(SimplexPoint({1.0, 0.0, 0.0}), 5, 0.3);
  REQUIRE(s.size() == 1);
  CHECK(s.members()[0] == EmpiricalDistribution({5, 0, 0}));
  CHECK(s.total_mass() == 1.0);
}

TEST_CASE("covering collection has minimal cardinality (exhaustive subsets of Delta(3, 6))") {
  const SimplexPoint p({0.7, 0.2, 0.1});
  const auto s = covering_collection(p, 6, 0.3);
  CHECK(s.size() == oracle::min_subset_cardinality(outcome_masses(p, 6), 0.7));
}

TEST_CASE("covering collection invariants") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + trial % 3;
    const Count n = Count(1 + trial % 9);
    const double delta = 0.05 + 0.9 * double(trial % 7) / 7.0;
    const SimplexPoint p = oracle::random_point(k, rng);
    const auto s = covering_collection(p, n, delta);
    REQUIRE(s.size() >= 1);
    CHECK(s.total_mass() >= 1.0 - delta);
    const double without_last = s.size() > 1 ? s.cumulative()[s.size() - 2] : 0.0;
    CHECK(without_last < 1.0 - delta);
    for (std::size_t i = 1; i < s.size(); ++i) {
      const double a = std::log(s.probabilities()[i - 1]);
      const double b = std::log(s.probabilities()[i]);
      CHECK(a >= b - kTieLogTolerance);
      if (std::abs(a - b) <= kTieLogTolerance) CHECK(s.members()[i - 1] < s.members()[i]);
    }
  }
}

TEST_CASE("minimal cardinality against the exhaustive subset oracle") {
  std::mt19937_64 rng(2024);
  const std::vector<std::pair<std::size_t, Count>> shapes{{2, 4}, {2, 6}, {3, 4}};
  for (auto [k, n] : shapes) {
    for (double delta : {0.1, 0.3}) {
      for (int trial = 0; trial < 50; ++trial) {
        const SimplexPoint p = oracle::random_point(k, rng);
        CHECK(covering_collection(p, n, delta).size() ==
              oracle::min_subset_cardinality(outcome_masses(p, n), 1.0 - delta));
      }
    }
  }
}

TEST_CASE("member_of_covering examples") {
  CHECK(member_of_covering(EmpiricalDistribution({1, 2, 2}), kUniform3, 0.7));
  CHECK_FALSE(member_of_covering(EmpiricalDistribution({5, 0, 0}), kUniform3, 0.7));
  for (double delta : {0.01, 0.5, 0.99}) {
    CHECK(member_of_covering(EmpiricalDistribution({5, 0, 0}), SimplexPoint({1.0, 0.0, 0.0}), delta));
  }
  CHECK_THROWS(member_of_covering(EmpiricalDistribution({5, 0}), kUniform3, 0.7));
}

TEST_CASE("member_of_covering matches the brute-force rank mass") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.02, 0.98);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t k = 3 + trial % 2;
    const Count n = k == 3 ? 7 : 5;
    const SimplexPoint p = oracle::random_point(k, rng);
    const double delta = unit(rng);
    for (const auto& phat : enumerate_simplex(k, n)) {
      const auto r = oracle::rank_mass(phat.counts(), as_vector(p));
      const double g = r.before + r.tied_before;
      if (std::abs(g - (1.0 - delta)) < 1e-9) continue;
      CHECK(member_of_covering(phat, p, delta) == (g < 1.0 - delta));
    }
  }
}

TEST_CASE("member_of_covering agrees with the materialised collection") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + trial % 4;
    const Count n = Count(trial % 11);
    const double delta = 0.02 + 0.96 * double(trial % 13) / 13.0;
    const SimplexPoint p = oracle::random_point(k, rng);
    const auto s = covering_collection(p, n, delta);
    for (const auto& phat : enumerate_simplex(k, n)) {
      CHECK(member_of_covering(phat, p, delta) == s.contains(phat));
    }
  }
}

TEST_CASE("region_membership examples") {
  const EmpiricalDistribution phat5({1, 2, 2});
  CHECK(region_membership(kUniform3, phat5, RegionSpec(0.7, Construction::LevelSet, 5, 3)));

  const EmpiricalDistribution phat({6, 6, 3});
  const SimplexPoint mle({0.4, 0.4, 0.2});
  CHECK(region_membership(mle, phat, RegionSpec(0.7, Construction::Sanov, 15, 3)));
  CHECK(region_membership(mle, phat, RegionSpec(0.7, Construction::Polytope, 15, 3)));

  const SimplexPoint far({0.99, 0.005, 0.005});
  const double threshold = std::log(6.0 / 0.7) / 15.0;
  CHECK(kl_bernoulli(0.4, 0.99) > threshold);
  CHECK_FALSE(region_membership(far, phat, RegionSpec(0.7, Construction::Polytope, 15, 3)));

  CHECK_THROWS(region_membership(kUniform3, phat5, RegionSpec(0.7, Construction::LevelSet, 6, 3)));
  CHECK_THROWS(RegionSpec(0.0, Construction::LevelSet, 5, 3));
  CHECK_THROWS(RegionSpec(1.0, Construction::LevelSet, 5, 3));
}

TEST_CASE("single-coordinate violation excludes a point from the polytope") {
  const EmpiricalDistribution phat({6, 6, 3});
  const double t = polytope_threshold(3, 15, 0.7);
  // Move mass from coordinate 0 to coordinate 2 until coordinate 0 violates.
  double p0 = 0.4;
  while (kl_bernoulli(0.4, p0) <= t) p0 -= 0.001;
  const SimplexPoint p({p0, 0.4, 0.6 - p0});
  CHECK(kl_bernoulli(0.4, 0.4) <= t);
  CHECK(kl_bernoulli(0.2, 0.6 - p0) <= t);
  CHECK_FALSE(polytope_membership(p, phat, 0.7));
}

TEST_CASE("exact p-value") {
  CHECK(p_value(EmpiricalDistribution({5, 0, 0}), SimplexPoint({1.0, 0.0, 0.0})) == 1.0);
  CHECK(p_value(EmpiricalDistribution({0, 5, 0}), SimplexPoint({1.0, 0.0, 0.0})) == 0.0);

  // Outcomes of Delta(3, 5) under the uniform point no more probable than (1, 2, 2).
  const std::vector<oracle::Rational> third(3, oracle::Rational(1, 3));
  const auto target = oracle::multinomial_probability({1, 2, 2}, third);
  oracle::Rational tail = 0;
  for (const auto& c : oracle::compositions(3, 5)) {
    const auto v = oracle::multinomial_probability(c, third);
    if (v <= target) tail += v;
  }
  CHECK(oracle::to_double(tail) == doctest::Approx(1.0));
  CHECK(p_value(EmpiricalDistribution({1, 2, 2}), kUniform3) == doctest::Approx(oracle::to_double(tail)));

  oracle::Rational corner_tail = 0;
  const auto corner = oracle::multinomial_probability({5, 0, 0}, third);
  for (const auto& c : oracle::compositions(3, 5)) {
    const auto v = oracle::multinomial_probability(c, third);
    if (v <= corner) corner_tail += v;
  }
  const double corner_p = p_value(EmpiricalDistribution({5, 0, 0}), kUniform3);
  CHECK(corner_p == doctest::Approx(oracle::to_double(corner_tail)).epsilon(1e-12));
  CHECK(level_set_membership_via_pvalue(kUniform3, EmpiricalDistribution({5, 0, 0}), 0.3) == (corner_p > 0.3));
  CHECK(level_set_membership_via_pvalue(SimplexPoint({1.0, 0.0, 0.0}), EmpiricalDistribution({5, 0, 0}), 0.3));
}

TEST_CASE("p-value and covering membership differ only inside a boundary tie class") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  int disagreements = 0;
  auto sweep = [&](const SimplexPoint& p, double delta) {
    for (const auto& phat : enumerate_simplex(3, 5)) {
      if (member_of_covering(phat, p, delta) == level_set_membership_via_pvalue(p, phat, delta)) continue;
      ++disagreements;
      const auto r = oracle::rank_mass(phat.counts(), as_vector(p));
      CHECK(r.before < 1.0 - delta + 1e-9);
      CHECK(r.before + r.tied_total > 1.0 - delta - 1e-9);
    }
  };
  for (int trial = 0; trial < 50; ++trial) sweep(oracle::random_point(3, rng), unit(rng));
  // The uniform point has large tie classes, so disagreements do occur there.
  for (double delta : {0.5, 0.7, 0.8}) sweep(kUniform3, delta);
  CHECK(disagreements > 0);
}

TEST_CASE("outer bound") {
  const EmpiricalDistribution phat({5, 5, 5});
  CHECK_FALSE(outer_bound_reject(phat, SimplexPoint({1.0 / 3, 1.0 / 3, 1.0 / 3}), 0.3));
  CHECK(outer_bound_reject(phat, SimplexPoint({1e-6, 1e-6, 1.0 - 2e-6}), 0.3));
}

TEST_CASE("outer bound soundness on Delta(3, 6)") {
  std::mt19937_64 rng(6);
  int rejections = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const SimplexPoint p = oracle::random_point(3, rng);
    for (double delta : {0.05, 0.3}) {
      for (const auto& phat : enumerate_simplex(3, 6)) {
        if (!outer_bound_reject(phat, p, delta)) continue;
        ++rejections;
        CHECK(p_value(phat, p) <= delta);
      }
    }
  }
  CHECK(rejections > 0);
}

TEST_CASE("cardinality bound rejection is sound") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const SimplexPoint p = oracle::random_point(3, rng);
    const double delta = 0.05 + 0.9 * (trial % 10) / 10.0;
    for (const auto& phat : enumerate_simplex(3, 6)) {
      if (cardinality_bound_reject(phat, p, delta)) CHECK_FALSE(member_of_covering(phat, p, delta));
    }
  }
}

TEST_CASE("type-class sandwich on Delta(3, 8)") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const SimplexPoint p = oracle::random_point(3, rng);
    const auto pv = as_vector(p);
    for (const auto& phat : enumerate_simplex(3, 8)) {
      const double prob = oracle::multinomial_probability(phat.counts(), pv);
      const double kl = kl_divergence(phat, p);
      CHECK(prob <= std::exp(-8.0 * kl) * (1 + 1e-12));
      CHECK(std::pow(9.0, -3.0) * std::exp(-8.0 * kl) <= prob * (1 + 1e-12));
    }
  }
}

TEST_CASE("chi-square prefilter") {
  CHECK(pearson_statistic(EmpiricalDistribution({6, 6, 3}), kUniform3) == doctest::Approx(1.2));
  CHECK(chi2_prefilter(EmpiricalDistribution({5, 5, 5}), kUniform3).value() == doctest::Approx(1.0));
  CHECK_FALSE(chi2_prefilter(EmpiricalDistribution({5, 5, 5}), SimplexPoint({0.5, 0.5, 0.0})).has_value());
  CHECK(chi2_prefilter(EmpiricalDistribution({6, 6, 3}), kUniform3).value() == doctest::Approx(std::exp(-0.6)));

  double previous = 2.0;
  for (Count c : {5, 6, 8, 10, 13}) {
    const Count rest = (15 - c) / 2;
    const EmpiricalDistribution phat({c, rest, 15 - c - rest});
    const double v = chi2_prefilter(phat, kUniform3).value();
    CHECK(v < previous);
    previous = v;
  }

  boost::math::chi_squared dist(2.0);
  CHECK(chi2_critical_value(3, 0.05) == doctest::Approx(5.991464547107979));
  CHECK(chi2_critical_value(3, 0.3) == doctest::Approx(boost::math::quantile(boost::math::complement(dist, 0.3))));
}

TEST_CASE("enabling the chi-square prefilter leaves answers unchanged away from the boundary") {
  const SimplexGrid grid(3, 30);
  for (double delta : {0.01, 0.05}) {
    for (const auto& phat : enumerate_simplex(3, 10)) {
      RegionSpec exact(delta, Construction::LevelSet, 10, 3);
      RegionSpec fast = exact;
      fast.chi2_prefilter = true;
      grid.for_each([&](const SimplexPoint& p) {
        CHECK(region_membership(p, phat, exact) == region_membership(p, phat, fast));
      });
    }
  }
}

TEST_CASE("baseline thresholds") {
  CHECK(sanov_threshold(3, 15, 0.7) == doctest::Approx(2.0 * std::log(4.0 / 0.7) / 15.0));
  CHECK(sanov_threshold(3, 15, 0.7, SanovThreshold::Generic) ==
        doctest::Approx((3.0 * std::log(16.0) - std::log(0.7)) / 15.0));
  CHECK(polytope_threshold(3, 15, 0.7) == doctest::Approx(std::log(6.0 / 0.7) / 15.0));
  CHECK_FALSE(sanov_refined_valid(3, 15));
  CHECK(sanov_refined_valid(3, 1000));
  const EmpiricalDistribution phat({6, 6, 3});
  CHECK(sanov_membership(SimplexPoint({0.4, 0.4, 0.2}), phat, 0.7));
  CHECK_FALSE(sanov_membership(SimplexPoint({0.98, 0.01, 0.01}), phat, 0.7));
}

TEST_CASE("bounding box contains every region") {
  std::mt19937_64 rng(4);
  const SimplexGrid grid(3, 40);
  for (Construction kind : {Construction::LevelSet, Construction::Sanov, Construction::Polytope}) {
    for (const auto& phat : enumerate_simplex(3, 8)) {
      const RegionSpec spec(0.2, kind, 8, 3);
      const RegionBox box = region_bounding_box(phat, spec);
      grid.for_each([&](const SimplexPoint& p) {
        if (!region_membership(p, phat, spec)) return;
        for (std::size_t i = 0; i < 3; ++i) {
          CHECK(p[i] >= box.lower[i]);
          CHECK(p[i] <= box.upper[i]);
        }
      });
    }
  }
}

TEST_CASE("construction names round trip") {
  for (Construction kind : {Construction::LevelSet, Construction::Sanov, Construction::Polytope}) {
    CHECK(parse_construction(to_string(kind)) == kind);
  }
  CHECK_FALSE(parse_construction("wald").has_value());
}
