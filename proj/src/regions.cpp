#include "mvcr/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "mvcr/summation.hpp"

namespace mvcr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_delta(double delta, const char* what) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument(std::string(what) + ": delta must lie in (0, 1)");
  }
}

void check_same_k(const EmpiricalDistribution& phat, const SimplexPoint& p, const char* what) {
  if (phat.k() != p.k()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(phat.k()) +
                                " vs " + std::to_string(p.k()) + ")");
  }
}

double log_simplex_size(std::size_t k, Count n) {
  return std::lgamma(double(n) + double(k)) - std::lgamma(double(n) + 1.0) - std::lgamma(double(k));
}

bool lex_less(std::span<const Count> a, std::span<const Count> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

std::string_view to_string(Construction kind) {
  switch (kind) {
    case Construction::LevelSet: return "levelset";
    case Construction::Sanov: return "sanov";
    case Construction::Polytope: return "polytope";
  }
  return "unknown";
}

std::optional<Construction> parse_construction(std::string_view name) {
  if (name == "levelset") return Construction::LevelSet;
  if (name == "sanov") return Construction::Sanov;
  if (name == "polytope") return Construction::Polytope;
  return std::nullopt;
}

RegionSpec::RegionSpec(double delta_, Construction kind_, Count n_, std::size_t k_)
    : delta(delta_), kind(kind_), n(n_), k(k_) {
  check_delta(delta, "RegionSpec");
  if (k == 0) throw std::invalid_argument("RegionSpec: k must be positive");
}

// Covering collections

bool CoveringCollection::contains(const EmpiricalDistribution& phat) const {
  return std::find(members_.begin(), members_.end(), phat) != members_.end();
}

CoveringCollection covering_collection(const SimplexPoint& p, Count n, double delta) {
  check_delta(delta, "covering_collection");
  const MultinomialLogPmf log_prob(p, n);

  std::vector<EmpiricalDistribution> outcomes = enumerate_simplex(p.k(), n);
  std::vector<double> logs(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) logs[i] = log_prob(outcomes[i].counts());

  // Enumeration order is lexicographic, so a stable sort on probability keeps
  // lexicographic order among exactly equal values.
  std::vector<std::size_t> order(outcomes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return logs[a] > logs[b]; });

  // Regroup near-equal runs into tie classes and restore lexicographic order
  // inside each class.
  for (std::size_t head = 0; head < order.size();) {
    const double anchor = logs[order[head]];
    std::size_t end = head + 1;
    while (end < order.size()) {
      const double v = logs[order[end]];
      if (!(v == anchor || anchor - v <= kTieLogTolerance)) break;
      ++end;
    }
    std::sort(order.begin() + head, order.begin() + end);
    head = end;
  }

  CoveringCollection out(p, delta);
  const double target = 1.0 - delta;
  KahanSum mass;
  for (std::size_t idx : order) {
    const double prob = std::exp(logs[idx]);
    mass.add(prob);
    out.members_.push_back(outcomes[idx]);
    out.probabilities_.push_back(prob);
    out.cumulative_.push_back(mass.value());
    if (mass.value() >= target) break;
  }
  return out;
}

bool member_of_covering(const EmpiricalDistribution& phat, const SimplexPoint& p, double delta) {
  check_same_k(phat, p, "member_of_covering");
  check_delta(delta, "member_of_covering");
  const std::size_t k = phat.k();
  const Count n = phat.n();
  if (k == 1) return true;

  const MultinomialLogPmf log_prob(p, n);
  const double q = log_prob(phat.counts());
  if (q == -kInf) return false;  // everything with positive probability ranks first

  const double target = 1.0 - delta;
  const double floor_log = q - kTieLogTolerance;
  const std::span<const Count> observed = phat.counts();

  // Outcomes are walked as rows: a prefix over the first k - 2 categories and
  // the split j / (m - j) of the remaining m samples over the last two. Along
  // a row the probability is a scaled binomial in j, hence unimodal, so the
  // outcomes at least as probable as phat form one run around the row mode.
  const std::size_t a = k - 2;
  const std::size_t b = k - 1;
  const double pa = p[a];
  const double pb = p[b];
  const double log_pa = log_prob.log_p(a);
  const double log_pb = log_prob.log_p(b);

  std::vector<Count> c(k, 0);
  KahanSum mass;

  auto row_value = [&](double prefix_log, Count m, Count j) {
    double v = prefix_log;
    const Count r = m - j;
    if (j) {
      if (log_pa == -kInf) return -kInf;
      v += double(j) * log_pa - log_prob.log_factorial(j);
    }
    if (r) {
      if (log_pb == -kInf) return -kInf;
      v += double(r) * log_pb - log_prob.log_factorial(r);
    }
    return v;
  };

  // Returns true once the rank mass reaches the target.
  auto walk_row = [&](double prefix_log, Count m) {
    if (pa + pb == 0.0 && m != 0) return false;
    Count mode = 0;
    if (pa + pb > 0.0) {
      const double guess = std::floor((double(m) + 1.0) * pa / (pa + pb));
      mode = static_cast<Count>(std::clamp(guess, 0.0, double(m)));
    }
    double best = row_value(prefix_log, m, mode);
    for (Count cand : {mode == 0 ? mode : mode - 1, mode == m ? mode : mode + 1}) {
      const double v = row_value(prefix_log, m, cand);
      if (v > best) {
        best = v;
        mode = cand;
      }
    }
    if (best < floor_log) return false;

    auto take = [&](Count j, double v) {
      c[a] = j;
      c[b] = m - j;
      if (v > q + kTieLogTolerance || lex_less(c, observed)) mass.add(std::exp(v));
    };
    for (std::int64_t j = mode; j >= 0; --j) {
      const double v = row_value(prefix_log, m, static_cast<Count>(j));
      if (v < floor_log) break;
      take(static_cast<Count>(j), v);
    }
    for (Count j = mode + 1; j <= m; ++j) {
      const double v = row_value(prefix_log, m, j);
      if (v < floor_log) break;
      take(j, v);
    }
    return mass.value() >= target;
  };

  auto recurse = [&](auto&& self, std::size_t i, Count remaining, double prefix_log) -> bool {
    if (i == a) return walk_row(prefix_log, remaining);
    for (Count ci = 0; ci <= remaining; ++ci) {
      double v = prefix_log;
      if (ci) {
        if (log_prob.log_p(i) == -kInf) break;
        v += double(ci) * log_prob.log_p(i) - log_prob.log_factorial(ci);
      }
      c[i] = ci;
      if (self(self, i + 1, remaining - ci, v)) return true;
    }
    c[i] = 0;
    return false;
  };

  if (recurse(recurse, 0, n, log_prob.log_factorial(n))) return false;
  return mass.value() < target;
}

bool region_membership(const SimplexPoint& p, const EmpiricalDistribution& phat, const RegionSpec& spec) {
  if (p.k() != spec.k || phat.k() != spec.k) {
    throw std::invalid_argument("region_membership: dimension mismatch with RegionSpec (k=" +
                                std::to_string(spec.k) + ")");
  }
  if (phat.n() != spec.n) {
    throw std::invalid_argument("region_membership: phat has n=" + std::to_string(phat.n()) +
                                ", RegionSpec has n=" + std::to_string(spec.n));
  }
  switch (spec.kind) {
    case Construction::Sanov: return sanov_membership(p, phat, spec.delta, spec.sanov);
    case Construction::Polytope: return polytope_membership(p, phat, spec.delta);
    case Construction::LevelSet: break;
  }
  if (phat.n() == 0) return true;
  if (outer_bound_reject(phat, p, spec.delta)) return false;
  if (cardinality_bound_reject(phat, p, spec.delta)) return false;
  if (spec.chi2_prefilter && 10.0 * spec.delta < 1.0) {
    // Only the interior shortcut is taken; anything inside the band
    // [delta / 10, 10 delta] or below it goes to the exact computation.
    const auto approx = chi2_prefilter(phat, p);
    if (approx && *approx > 10.0 * spec.delta) return true;
  }
  return member_of_covering(phat, p, spec.delta);
}

// p-values and bounds

double p_value(const EmpiricalDistribution& phat, const SimplexPoint& p) {
  check_same_k(phat, p, "p_value");
  const MultinomialLogPmf log_prob(p, phat.n());
  const double q = log_prob(phat.counts());
  if (q == -kInf) return 0.0;
  KahanSum mass;
  for_each_composition(phat.k(), phat.n(), [&](std::span<const Count> c) {
    const double v = log_prob(c);
    if (v <= q + kTieLogTolerance) mass.add(std::exp(v));
  });
  return std::clamp(mass.value(), 0.0, 1.0);
}

bool level_set_membership_via_pvalue(const SimplexPoint& p, const EmpiricalDistribution& phat, double delta) {
  check_delta(delta, "level_set_membership_via_pvalue");
  return p_value(phat, p) > delta;
}

bool outer_bound_reject(const EmpiricalDistribution& phat, const SimplexPoint& p, double delta) {
  check_same_k(phat, p, "outer_bound_reject");
  if (phat.n() == 0) return false;
  const double kl = kl_divergence(phat, p);
  if (kl == kInf) return true;
  const double n = phat.n();
  return 2.0 * double(phat.k()) * std::log(n + 1.0) - n * kl <= std::log(delta);
}

bool cardinality_bound_reject(const EmpiricalDistribution& phat, const SimplexPoint& p, double delta) {
  check_same_k(phat, p, "cardinality_bound_reject");
  if (phat.n() == 0) return false;
  const double lp = log_pmf(phat, p);
  if (lp == -kInf) return true;
  return log_simplex_size(phat.k(), phat.n()) + lp + kTieLogTolerance <= std::log(delta);
}

double pearson_statistic(const EmpiricalDistribution& phat, const SimplexPoint& p) {
  check_same_k(phat, p, "pearson_statistic");
  const double n = phat.n();
  double stat = 0.0;
  for (std::size_t i = 0; i < p.k(); ++i) {
    if (p[i] <= 0.0) throw std::domain_error("pearson_statistic: requires every p_i > 0");
    const double expected = n * p[i];
    const double diff = double(phat[i]) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

std::optional<double> chi2_prefilter(const EmpiricalDistribution& phat, const SimplexPoint& p) {
  check_same_k(phat, p, "chi2_prefilter");
  for (double x : p.probs()) {
    if (x <= 0.0) return std::nullopt;
  }
  if (phat.k() == 1 || phat.n() == 0) return 1.0;
  const double stat = pearson_statistic(phat, p);
  return boost::math::gamma_q(0.5 * double(phat.k() - 1), 0.5 * stat);
}

double chi2_critical_value(std::size_t k, double alpha) {
  check_delta(alpha, "chi2_critical_value");
  if (k <= 1) return 0.0;
  const boost::math::chi_squared_distribution<double> dist(double(k - 1));
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

// Baseline regions

double sanov_threshold(std::size_t k, Count n, double delta, SanovThreshold kind) {
  check_delta(delta, "sanov_threshold");
  if (n == 0) return kInf;
  const double dn = n;
  if (kind == SanovThreshold::Generic) {
    return (double(k) * std::log(dn + 1.0) - std::log(delta)) / dn;
  }
  if (k <= 1) return 0.0;
  const double km1 = double(k - 1);
  return km1 * std::log(2.0 * km1 / delta) / dn;
}

bool sanov_refined_valid(std::size_t k, Count n) {
  constexpr double kE = 2.718281828459045;
  constexpr double kPi = 3.141592653589793;
  return double(k) <= kE * std::cbrt(double(n) / (8.0 * kPi));
}

bool sanov_membership(const SimplexPoint& p, const EmpiricalDistribution& phat, double delta, SanovThreshold kind) {
  check_same_k(phat, p, "sanov_membership");
  const double threshold = sanov_threshold(phat.k(), phat.n(), delta, kind);
  if (phat.n() == 0) return true;
  return kl_divergence(phat, p) <= threshold;
}

double polytope_threshold(std::size_t k, Count n, double delta) {
  check_delta(delta, "polytope_threshold");
  if (n == 0) return kInf;
  return std::log(2.0 * double(k) / delta) / double(n);
}

bool polytope_membership(const SimplexPoint& p, const EmpiricalDistribution& phat, double delta) {
  check_same_k(phat, p, "polytope_membership");
  const double threshold = polytope_threshold(phat.k(), phat.n(), delta);
  if (phat.n() == 0) return true;
  for (std::size_t i = 0; i < p.k(); ++i) {
    if (kl_bernoulli(phat.proportion(i), p[i]) > threshold) return false;
  }
  return true;
}

RegionBox region_bounding_box(const EmpiricalDistribution& phat, const RegionSpec& spec) {
  const std::size_t k = phat.k();
  RegionBox box{std::vector<double>(k, 0.0), std::vector<double>(k, 1.0)};
  if (phat.n() == 0 || k == 1) return box;
  // KL(phat, p) dominates the two-cell KL of every coordinate, so a KL ball
  // of radius r lies inside the per-coordinate Bernoulli-KL balls.
  double radius = 0.0;
  switch (spec.kind) {
    case Construction::LevelSet:
      radius = (log_simplex_size(k, phat.n()) + kTieLogTolerance - std::log(spec.delta)) / double(phat.n());
      break;
    case Construction::Sanov: radius = sanov_threshold(k, phat.n(), spec.delta, spec.sanov); break;
    case Construction::Polytope: radius = polytope_threshold(k, phat.n(), spec.delta); break;
  }
  radius = radius * (1.0 + 1e-9) + 1e-12;
  for (std::size_t i = 0; i < k; ++i) {
    const auto [lo, hi] = kl_bernoulli_ball(phat.proportion(i), radius);
    box.lower[i] = lo;
    box.upper[i] = hi;
  }
  return box;
}

}  // namespace mvcr
