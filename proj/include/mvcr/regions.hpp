#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "mvcr/simplex.hpp"

namespace mvcr {

/// Two outcomes are treated as equiprobable when their log-probabilities are
/// within this distance.
inline constexpr double kTieLogTolerance = 1e-9;

enum class Construction { LevelSet, Sanov, Polytope };

std::string_view to_string(Construction kind);
std::optional<Construction> parse_construction(std::string_view name);

/// Which KL radius the Sanov region uses. Refined is the (k-1)log(2(k-1)/delta)/n
/// concentration radius, only proven for k <= e (n / 8 pi)^(1/3); Generic is
/// the method-of-types radius log((n+1)^k / delta) / n, valid everywhere.
enum class SanovThreshold { Refined, Generic };

struct RegionSpec {
  double delta;
  Construction kind;
  Count n;
  std::size_t k;
  SanovThreshold sanov = SanovThreshold::Refined;
  /// Accept points whose chi-square p-value is far above delta without the
  /// exact computation. Approximate; off unless asked for.
  bool chi2_prefilter = false;

  RegionSpec(double delta, Construction kind, Count n, std::size_t k);
};

/// The minimal-cardinality covering collection S**(p): outcomes sorted by
/// probability under p (descending, lexicographic within a tie class), cut at
/// the first prefix whose mass reaches 1 - delta.
class CoveringCollection {
 public:
  const std::vector<EmpiricalDistribution>& members() const { return members_; }
  /// Probability of each member under p, aligned with members().
  const std::vector<double>& probabilities() const { return probabilities_; }
  /// Running sums of probabilities().
  const std::vector<double>& cumulative() const { return cumulative_; }
  double total_mass() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  const SimplexPoint& p() const { return p_; }
  double delta() const { return delta_; }
  std::size_t size() const { return members_.size(); }

  bool contains(const EmpiricalDistribution& phat) const;

 private:
  friend CoveringCollection covering_collection(const SimplexPoint&, Count, double);
  CoveringCollection(SimplexPoint p, double delta) : p_(std::move(p)), delta_(delta) {}

  std::vector<EmpiricalDistribution> members_;
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
  SimplexPoint p_;
  double delta_;
};

CoveringCollection covering_collection(const SimplexPoint& p, Count n, double delta);

/// phat in S**(p), decided from the rank mass of phat without materialising
/// the ordering: phat is a member iff the mass of outcomes ranked strictly
/// before it is below 1 - delta.
bool member_of_covering(const EmpiricalDistribution& phat, const SimplexPoint& p, double delta);

/// p in C(phat) for the construction named by spec.
bool region_membership(const SimplexPoint& p, const EmpiricalDistribution& phat, const RegionSpec& spec);

/// Exact p-value: total probability of outcomes no more probable than phat.
double p_value(const EmpiricalDistribution& phat, const SimplexPoint& p);

bool level_set_membership_via_pvalue(const SimplexPoint& p, const EmpiricalDistribution& phat, double delta);

/// True when (n+1)^(2k) exp(-n KL(phat, p)) <= delta, which implies the
/// p-value is at most delta and p lies outside the level-set region.
bool outer_bound_reject(const EmpiricalDistribution& phat, const SimplexPoint& p, double delta);

/// True when |Delta_{k,n}| * P_p(phat) <= delta. Every outcome ranked at or
/// after phat is at most as probable as phat, so their mass (which must exceed
/// delta for membership) is bounded by this product.
bool cardinality_bound_reject(const EmpiricalDistribution& phat, const SimplexPoint& p, double delta);

/// Pearson chi-square approximate p-value with k - 1 degrees of freedom.
/// Empty when some p_i is zero.
std::optional<double> chi2_prefilter(const EmpiricalDistribution& phat, const SimplexPoint& p);

/// Pearson statistic sum_i (c_i - n p_i)^2 / (n p_i); requires p_i > 0.
double pearson_statistic(const EmpiricalDistribution& phat, const SimplexPoint& p);

/// Upper-tail critical value of the chi-square distribution with k - 1
/// degrees of freedom at tail mass alpha.
double chi2_critical_value(std::size_t k, double alpha);

double sanov_threshold(std::size_t k, Count n, double delta, SanovThreshold kind = SanovThreshold::Refined);
/// k <= e (n / 8 pi)^(1/3): the range where the refined radius is proven.
bool sanov_refined_valid(std::size_t k, Count n);
bool sanov_membership(const SimplexPoint& p, const EmpiricalDistribution& phat, double delta,
                      SanovThreshold kind = SanovThreshold::Refined);

double polytope_threshold(std::size_t k, Count n, double delta);
bool polytope_membership(const SimplexPoint& p, const EmpiricalDistribution& phat, double delta);

/// Coordinate box guaranteed to contain the region C(phat).
struct RegionBox {
  std::vector<double> lower;
  std::vector<double> upper;
};

RegionBox region_bounding_box(const EmpiricalDistribution& phat, const RegionSpec& spec);

}  // namespace mvcr
