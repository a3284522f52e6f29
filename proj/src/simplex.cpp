#include "mvcr/simplex.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mvcr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Count kLogFactorialTableSize = 1u << 16;

const std::vector<double>& log_factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kLogFactorialTableSize);
    for (Count m = 0; m < kLogFactorialTableSize; ++m) {
      t[m] = std::lgamma(static_cast<double>(m) + 1.0);
    }
    return t;
  }();
  return table;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void check_same_k(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

// EmpiricalDistribution

EmpiricalDistribution::EmpiricalDistribution(std::vector<Count> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) {
    throw std::invalid_argument("EmpiricalDistribution: at least one category is required");
  }
  std::uint64_t total = 0;
  for (Count c : counts_) total += c;
  if (total > std::numeric_limits<Count>::max()) {
    throw std::overflow_error("EmpiricalDistribution: total count exceeds 32-bit range");
  }
  n_ = static_cast<Count>(total);
}

double EmpiricalDistribution::proportion(std::size_t i) const {
  if (n_ == 0) throw std::domain_error("EmpiricalDistribution: proportions undefined for n = 0");
  return static_cast<double>(counts_.at(i)) / static_cast<double>(n_);
}

SimplexPoint EmpiricalDistribution::as_point() const {
  if (n_ == 0) throw std::domain_error("EmpiricalDistribution: proportions undefined for n = 0");
  std::vector<double> probs(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    probs[i] = static_cast<double>(counts_[i]) / static_cast<double>(n_);
  }
  return SimplexPoint(std::move(probs));
}

std::string EmpiricalDistribution::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(counts_[i]);
  }
  return s + ")";
}

// SimplexPoint

SimplexPoint::SimplexPoint(std::vector<double> probs, bool renormalize) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("SimplexPoint: at least one category is required");
  double sum = 0.0;
  for (double x : probs_) {
    if (!std::isfinite(x) || x < 0.0) {
      throw std::invalid_argument("SimplexPoint: entries must be finite and nonnegative, got " +
                                  format_double(x));
    }
    sum += x;
  }
  if (renormalize) {
    if (sum <= 0.0) throw std::invalid_argument("SimplexPoint: cannot renormalize a zero vector");
    for (double& x : probs_) x /= sum;
  } else if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("SimplexPoint: entries sum to " + format_double(sum) + ", not 1");
  }
}

SimplexPoint SimplexPoint::uniform(std::size_t k) {
  if (k == 0) throw std::invalid_argument("SimplexPoint::uniform: k must be positive");
  return SimplexPoint(std::vector<double>(k, 1.0 / static_cast<double>(k)), /*renormalize=*/true);
}

std::string SimplexPoint::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (i) s += ',';
    s += format_double(probs_[i]);
  }
  return s + ")";
}

// Enumeration

std::uint64_t simplex_size(std::size_t k, Count n) {
  if (k == 0) throw std::invalid_argument("simplex_size: k must be positive");
  // binomial(n + r, r) with r = k - 1, built as a running product of exact
  // intermediate binomials binomial(n + i, i).
  unsigned __int128 value = 1;
  const std::uint64_t r = k - 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    value = value * (static_cast<unsigned __int128>(n) + i) / i;
    if (value > std::numeric_limits<std::uint64_t>::max()) {
      const double log10_size =
          (std::lgamma(double(n) + double(r) + 1.0) - std::lgamma(double(n) + 1.0) -
           std::lgamma(double(r) + 1.0)) /
          std::log(10.0);
      std::ostringstream msg;
      msg << "discrete simplex with k=" << k << ", n=" << n << " has about 1e" << log10_size
          << " elements; a 64-bit count cannot hold it";
      throw std::overflow_error(msg.str());
    }
  }
  return static_cast<std::uint64_t>(value);
}

void for_each_composition(std::size_t k, Count n,
                          const std::function<void(std::span<const Count>)>& visit) {
  if (k == 0) throw std::invalid_argument("for_each_composition: k must be positive");
  std::vector<Count> c(k, 0);
  c[k - 1] = n;
  while (true) {
    visit(c);
    // Rightmost position with mass strictly to its right gets incremented and
    // everything after it is packed into the last slot.
    std::size_t last_nonzero = k;
    for (std::size_t j = k; j-- > 1;) {
      if (c[j] != 0) {
        last_nonzero = j;
        break;
      }
    }
    if (last_nonzero == k) return;
    const std::size_t i = last_nonzero - 1;
    const Count suffix = c[last_nonzero];
    c[i] += 1;
    c[last_nonzero] = 0;
    c[k - 1] = suffix - 1;
  }
}

std::vector<EmpiricalDistribution> enumerate_simplex(std::size_t k, Count n) {
  const std::uint64_t size = simplex_size(k, n);
  std::vector<EmpiricalDistribution> out;
  out.reserve(size);
  for_each_composition(k, n, [&](std::span<const Count> c) {
    out.emplace_back(std::vector<Count>(c.begin(), c.end()));
  });
  return out;
}

// Probabilities

double log_factorial(Count m) {
  if (m < kLogFactorialTableSize) return log_factorial_table()[m];
  return std::lgamma(static_cast<double>(m) + 1.0);
}

MultinomialLogPmf::MultinomialLogPmf(const SimplexPoint& p, Count n) : log_p_(p.k()), log_fact_(n + 1), n_(n) {
  for (std::size_t i = 0; i < p.k(); ++i) log_p_[i] = p[i] > 0.0 ? std::log(p[i]) : -kInf;
  for (Count m = 0; m <= n; ++m) log_fact_[m] = mvcr::log_factorial(m);
}

double MultinomialLogPmf::operator()(std::span<const Count> counts) const {
  assert(counts.size() == log_p_.size());
  double value = log_fact_[n_];
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const Count c = counts[i];
    if (c == 0) continue;
    if (log_p_[i] == -kInf) return -kInf;
    value += static_cast<double>(c) * log_p_[i] - log_fact_[c];
  }
  return value;
}

double log_pmf(const EmpiricalDistribution& phat, const SimplexPoint& p) {
  check_same_k(phat.k(), p.k(), "log_pmf");
  double value = log_factorial(phat.n());
  for (std::size_t i = 0; i < phat.k(); ++i) {
    const Count c = phat[i];
    if (c == 0) continue;
    if (p[i] == 0.0) return -kInf;
    value += static_cast<double>(c) * std::log(p[i]) - log_factorial(c);
  }
  return value;
}

double kl_divergence(const SimplexPoint& p, const SimplexPoint& q) {
  check_same_k(p.k(), q.k(), "kl_divergence");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.k(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInf;
    sum += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(sum, 0.0);
}

double kl_divergence(const EmpiricalDistribution& phat, const SimplexPoint& q) {
  check_same_k(phat.k(), q.k(), "kl_divergence");
  if (phat.n() == 0) return 0.0;
  return kl_divergence(phat.as_point(), q);
}

double kl_bernoulli(double a, double b) {
  if (!(a >= 0.0 && a <= 1.0) || !(b >= 0.0 && b <= 1.0)) {
    throw std::domain_error("kl_bernoulli: arguments must lie in [0, 1], got " + format_double(a) +
                            ", " + format_double(b));
  }
  double sum = 0.0;
  if (a > 0.0) {
    if (b == 0.0) return kInf;
    sum += a * std::log(a / b);
  }
  if (a < 1.0) {
    if (b == 1.0) return kInf;
    sum += (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
  }
  return std::max(sum, 0.0);
}

std::pair<double, double> kl_bernoulli_ball(double a, double radius, double tolerance) {
  if (!(radius >= 0.0)) throw std::domain_error("kl_bernoulli_ball: radius must be nonnegative");
  // Lower end: kl(a, .) decreases on [0, a]; keep `lo` on the excluded side
  // so the returned interval is never narrower than the true set.
  double lower = 0.0;
  if (kl_bernoulli(a, 0.0) > radius) {
    double lo = 0.0, hi = a;
    while (hi - lo > tolerance) {
      const double mid = 0.5 * (lo + hi);
      (kl_bernoulli(a, mid) > radius ? lo : hi) = mid;
    }
    lower = lo;
  }
  double upper = 1.0;
  if (kl_bernoulli(a, 1.0) > radius) {
    double lo = a, hi = 1.0;
    while (hi - lo > tolerance) {
      const double mid = 0.5 * (lo + hi);
      (kl_bernoulli(a, mid) > radius ? hi : lo) = mid;
    }
    upper = hi;
  }
  return {lower, upper};
}

// SimplexGrid

SimplexGrid::SimplexGrid(std::size_t k, Count resolution) : k_(k), resolution_(resolution) {
  if (k == 0) throw std::invalid_argument("SimplexGrid: k must be positive");
}

std::uint64_t SimplexGrid::size() const { return simplex_size(k_, resolution_); }

double SimplexGrid::coordinate(Count cell) const {
  return (static_cast<double>(cell) + 1.0 / static_cast<double>(k_)) /
         (static_cast<double>(resolution_) + 1.0);
}

SimplexPoint SimplexGrid::point(std::span<const Count> cell) const {
  std::vector<double> probs(k_);
  for (std::size_t i = 0; i < k_; ++i) probs[i] = coordinate(cell[i]);
  return SimplexPoint(std::move(probs));
}

void SimplexGrid::for_each(const std::function<void(const SimplexPoint&)>& visit) const {
  for_each_composition(k_, resolution_, [&](std::span<const Count> cell) { visit(point(cell)); });
}

void SimplexGrid::for_each_cell_in_box(std::span<const double> lower, std::span<const double> upper,
                                       const std::function<void(std::span<const Count>)>& visit) const {
  if (lower.size() != k_ || upper.size() != k_) {
    throw std::invalid_argument("SimplexGrid: box dimension mismatch");
  }
  const double scale = static_cast<double>(resolution_) + 1.0;
  const double offset = 1.0 / static_cast<double>(k_);
  std::vector<std::int64_t> lo(k_), hi(k_);
  for (std::size_t i = 0; i < k_; ++i) {
    lo[i] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(lower[i] * scale - offset - 1e-9)));
    hi[i] = std::min<std::int64_t>(resolution_,
                                   static_cast<std::int64_t>(std::floor(upper[i] * scale - offset + 1e-9)));
    if (lo[i] > hi[i]) return;
  }
  // Suffix sums bound how much mass the remaining coordinates can absorb.
  std::vector<std::int64_t> lo_suffix(k_ + 1, 0), hi_suffix(k_ + 1, 0);
  for (std::size_t i = k_; i-- > 0;) {
    lo_suffix[i] = lo_suffix[i + 1] + lo[i];
    hi_suffix[i] = hi_suffix[i + 1] + hi[i];
  }
  std::vector<Count> cell(k_, 0);
  auto recurse = [&](auto&& self, std::size_t i, std::int64_t remaining) -> void {
    if (i + 1 == k_) {
      if (remaining < lo[i] || remaining > hi[i]) return;
      cell[i] = static_cast<Count>(remaining);
      visit(cell);
      return;
    }
    const std::int64_t first = std::max(lo[i], remaining - hi_suffix[i + 1]);
    const std::int64_t last = std::min(hi[i], remaining - lo_suffix[i + 1]);
    for (std::int64_t c = first; c <= last; ++c) {
      cell[i] = static_cast<Count>(c);
      self(self, i + 1, remaining - c);
    }
  };
  recurse(recurse, 0, resolution_);
}

void SimplexGrid::for_each_in_box(std::span<const double> lower, std::span<const double> upper,
                                  const std::function<void(const SimplexPoint&)>& visit) const {
  for_each_cell_in_box(lower, upper, [&](std::span<const Count> cell) {
    SimplexPoint p = point(cell);
    for (std::size_t i = 0; i < k_; ++i) {
      if (p[i] < lower[i] || p[i] > upper[i]) return;
    }
    visit(p);
  });
}

std::vector<SimplexPoint> SimplexGrid::points() const {
  std::vector<SimplexPoint> out;
  out.reserve(size());
  for_each([&](const SimplexPoint& p) { out.push_back(p); });
  return out;
}

}  // namespace mvcr
