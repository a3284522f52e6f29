#include "mvcr/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvcr/bandit.hpp"
#include "mvcr/functionals.hpp"
#include "mvcr/regions.hpp"
#include "mvcr/simplex.hpp"
#include "mvcr/volume.hpp"

namespace mvcr::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;
constexpr std::uint64_t kMaxListedOutcomes = 20'000'000;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::optional<std::size_t> k;
  std::optional<Count> n;
  std::optional<double> delta;
  std::vector<Count> phat;
  std::vector<std::string> p;
  std::vector<std::string> constructions;
  std::string sanov_threshold = "refined";
  std::optional<Count> grid;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
  std::string out;
  std::vector<Count> n_list;
  std::uint64_t trials = 10;
  double tolerance = 0.0;
  std::vector<std::string> methods;
  std::uint64_t max_samples = 1'000'000;
  std::uint64_t prior_draws = 0;
};

struct OutputFile {
  std::filesystem::path path;
  std::string contents;
};

struct Result {
  std::string text;
  std::vector<OutputFile> files;
  int code = kOk;
  std::string diagnostic;
};

using Job = std::function<Result()>;

std::string number(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

double parse_probability(const std::string& text) {
  auto parse_real = [&](std::string_view s) {
    double value = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || end != s.data() + s.size()) throw UsageError("cannot parse probability '" + text + "'");
    return value;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_real(text);
  const double den = parse_real(std::string_view(text).substr(slash + 1));
  if (den == 0.0) throw UsageError("zero denominator in '" + text + "'");
  return parse_real(std::string_view(text).substr(0, slash)) / den;
}

SimplexPoint parse_point(const std::vector<std::string>& entries) {
  if (entries.empty()) throw UsageError("--p is required");
  std::vector<double> probs;
  for (const auto& e : entries) probs.push_back(parse_probability(e));
  try {
    return SimplexPoint(std::move(probs));
  } catch (const std::exception& e) {
    throw UsageError(std::string("--p: ") + e.what());
  }
}

double require_delta(const Options& o) {
  if (!o.delta) throw UsageError("--delta is required");
  if (!(*o.delta > 0.0 && *o.delta < 1.0)) throw UsageError("--delta must lie in (0, 1)");
  return *o.delta;
}

void check_k(const Options& o, std::size_t k) {
  if (o.k && *o.k != k) throw UsageError("--k does not match the length of the given vector");
}

EmpiricalDistribution require_phat(const Options& o) {
  if (o.phat.empty()) throw UsageError("--phat is required");
  EmpiricalDistribution phat(o.phat);
  check_k(o, phat.k());
  if (o.n && *o.n != phat.n()) throw UsageError("--n does not match the sum of --phat");
  return phat;
}

std::vector<Construction> constructions(const Options& o, bool all_by_default) {
  std::vector<Construction> kinds;
  for (const auto& name : o.constructions) {
    const auto kind = parse_construction(name);
    if (!kind) throw UsageError("unknown construction '" + name + "'");
    if (std::find(kinds.begin(), kinds.end(), *kind) == kinds.end()) kinds.push_back(*kind);
  }
  if (kinds.empty()) {
    if (all_by_default) return {Construction::LevelSet, Construction::Sanov, Construction::Polytope};
    kinds.push_back(Construction::LevelSet);
  }
  return kinds;
}

SanovThreshold sanov_threshold_kind(const Options& o) {
  return o.sanov_threshold == "generic" ? SanovThreshold::Generic : SanovThreshold::Refined;
}

RegionSpec make_spec(const Options& o, double delta, Construction kind, Count n, std::size_t k) {
  RegionSpec spec(delta, kind, n, k);
  spec.sanov = sanov_threshold_kind(o);
  return spec;
}

std::string format_of(const Options& o, const char* fallback) { return o.format.value_or(fallback); }

Json counts_json(const EmpiricalDistribution& e) { return Json(e.counts()); }

Json point_json(const SimplexPoint& p) { return Json(std::vector<double>(p.probs().begin(), p.probs().end())); }

Json header(const char* command) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  return j;
}

/// Places the rendered output on stdout or into --out.
Result emit(const Options& o, std::string contents) {
  Result r;
  if (o.out.empty()) {
    r.text = std::move(contents);
  } else {
    r.files.push_back({o.out, std::move(contents)});
  }
  return r;
}

std::string csv_counts_header(std::size_t k) {
  std::string h;
  for (std::size_t i = 0; i < k; ++i) h += (i ? ",c" : "c") + std::to_string(i + 1);
  return h;
}

std::string csv_counts(const EmpiricalDistribution& e) {
  std::string s;
  for (std::size_t i = 0; i < e.k(); ++i) s += (i ? "," : "") + std::to_string(e[i]);
  return s;
}

// ---------------------------------------------------------------- region

struct BoundaryDump {
  std::vector<std::vector<char>> member;  // member[i][j] for the cell (i, j, M - i - j)
  std::vector<std::array<SimplexPoint, 2>> segments;
};

BoundaryDump trace_region(const EmpiricalDistribution& phat, const RegionSpec& spec, const SimplexGrid& grid) {
  const Count m = grid.resolution();
  BoundaryDump dump;
  dump.member.resize(m + 1);
  auto point = [&](Count i, Count j) {
    const std::array<Count, 3> cell{i, j, m - i - j};
    return grid.point(cell);
  };
  for (Count i = 0; i <= m; ++i) {
    dump.member[i].resize(m - i + 1);
    for (Count j = 0; i + j <= m; ++j) dump.member[i][j] = region_membership(point(i, j), phat, spec);
  }

  auto midpoint = [&](std::array<Count, 2> a, std::array<Count, 2> b) {
    const SimplexPoint pa = point(a[0], a[1]);
    const SimplexPoint pb = point(b[0], b[1]);
    std::vector<double> mid(3);
    for (std::size_t t = 0; t < 3; ++t) mid[t] = 0.5 * (pa[t] + pb[t]);
    return SimplexPoint(std::move(mid), true);
  };
  auto triangle = [&](std::array<std::array<Count, 2>, 3> v) {
    std::vector<SimplexPoint> crossings;
    for (int e = 0; e < 3; ++e) {
      const auto& a = v[e];
      const auto& b = v[(e + 1) % 3];
      if (dump.member[a[0]][a[1]] != dump.member[b[0]][b[1]]) crossings.push_back(midpoint(a, b));
    }
    if (crossings.size() == 2) dump.segments.push_back({crossings[0], crossings[1]});
  };
  for (Count i = 0; i < m; ++i) {
    for (Count j = 0; i + j < m; ++j) {
      triangle({{{i, j}, {i + 1, j}, {i, j + 1}}});
      if (i + j + 2 <= m) triangle({{{i + 1, j}, {i, j + 1}, {i + 1, j + 1}}});
    }
  }
  return dump;
}

Job plan_region(const Options& o) {
  const EmpiricalDistribution phat = require_phat(o);
  const double delta = require_delta(o);
  const std::string format = format_of(o, o.p.empty() ? "json" : "text");

  if (!o.p.empty()) {
    const SimplexPoint p = parse_point(o.p);
    if (p.k() != phat.k()) throw UsageError("--p and --phat have different lengths");
    const auto kinds = constructions(o, false);
    std::vector<RegionSpec> specs;
    for (Construction kind : kinds) specs.push_back(make_spec(o, delta, kind, phat.n(), phat.k()));
    if (format != "text" && format != "csv" && format != "json") throw UsageError("unknown format " + format);
    return [=, &o] {
      std::ostringstream text;
      Json j = header("region");
      j["mode"] = "membership";
      j["phat"] = counts_json(phat);
      j["p"] = point_json(p);
      j["delta"] = delta;
      j["results"] = Json::array();
      if (format == "csv") text << "construction,member\n";
      for (const RegionSpec& spec : specs) {
        const bool member = region_membership(p, phat, spec);
        const std::string name(to_string(spec.kind));
        if (format == "text") text << (specs.size() > 1 ? name + " " : "") << (member ? "true" : "false") << "\n";
        if (format == "csv") text << name << "," << (member ? "true" : "false") << "\n";
        j["results"].push_back({{"construction", name}, {"member", member}});
      }
      return emit(o, format == "json" ? j.dump(2) + "\n" : text.str());
    };
  }

  if (phat.k() != 3) throw UsageError("boundary dumps need k = 3 (ternary coordinates); pass --p for a membership query");
  if (o.out.empty()) throw UsageError("boundary dumps write one file per construction; --out DIR is required");
  if (format != "csv" && format != "json") throw UsageError("boundary dumps support csv or json");
  const Count m = o.grid.value_or(200);
  if (m < 2) throw UsageError("--grid must be at least 2");
  std::vector<RegionSpec> specs;
  for (Construction kind : constructions(o, true)) specs.push_back(make_spec(o, delta, kind, phat.n(), 3));
  const std::filesystem::path dir = o.out;
  return [=] {
    Result r;
    const SimplexGrid grid(3, m);
    for (const RegionSpec& spec : specs) {
      const BoundaryDump dump = trace_region(phat, spec, grid);
      const std::string name(to_string(spec.kind));
      std::ostringstream text;
      if (format == "csv") {
        text << "p1,p2,p3,member\n";
        for (Count i = 0; i <= m; ++i) {
          for (Count j = 0; i + j <= m; ++j) {
            const std::array<Count, 3> cell{i, j, m - i - j};
            const SimplexPoint q = grid.point(cell);
            text << number(q[0]) << "," << number(q[1]) << "," << number(q[2]) << ","
                 << (dump.member[i][j] ? 1 : 0) << "\n";
          }
        }
      } else {
        Json j = header("region");
        j["mode"] = "boundary";
        j["construction"] = name;
        j["phat"] = counts_json(phat);
        j["n"] = phat.n();
        j["delta"] = delta;
        j["grid_resolution"] = m;
        if (spec.kind == Construction::Sanov) {
          j["sanov_threshold"] = spec.sanov == SanovThreshold::Refined ? "refined" : "generic";
          j["sanov_refined_valid"] = sanov_refined_valid(3, phat.n());
        }
        Json members = Json::array();
        for (Count i = 0; i <= m; ++i) {
          for (Count jj = 0; i + jj <= m; ++jj) {
            if (!dump.member[i][jj]) continue;
            const std::array<Count, 3> cell{i, jj, m - i - jj};
            members.push_back(point_json(grid.point(cell)));
          }
        }
        j["member_points"] = std::move(members);
        Json segments = Json::array();
        for (const auto& s : dump.segments) segments.push_back({point_json(s[0]), point_json(s[1])});
        j["boundary_segments"] = std::move(segments);
        text << j.dump() << "\n";
      }
      r.files.push_back({dir / ("region_" + name + "." + format), text.str()});
    }
    return r;
  };
}

// -------------------------------------------------------------- covering

Job plan_covering(const Options& o) {
  const SimplexPoint p = parse_point(o.p);
  check_k(o, p.k());
  if (!o.n) throw UsageError("--n is required");
  const Count n = *o.n;
  const double delta = require_delta(o);
  const std::string format = format_of(o, "csv");
  if (format != "csv" && format != "json") throw UsageError("unknown format " + format);
  if (simplex_size(p.k(), n) > kMaxListedOutcomes) throw UsageError("the discrete simplex is too large to list");
  return [=, &o] {
    const CoveringCollection s = covering_collection(p, n, delta);
    std::ostringstream text;
    if (format == "csv") {
      text << "rank," << csv_counts_header(p.k()) << ",probability,cumulative\n";
      for (std::size_t r = 0; r < s.size(); ++r) {
        text << r + 1 << "," << csv_counts(s.members()[r]) << "," << number(s.probabilities()[r]) << ","
             << number(s.cumulative()[r]) << "\n";
      }
      return emit(o, text.str());
    }
    Json j = header("covering");
    j["p"] = point_json(p);
    j["n"] = n;
    j["delta"] = delta;
    j["size"] = s.size();
    j["total_mass"] = s.total_mass();
    Json members = Json::array();
    for (std::size_t r = 0; r < s.size(); ++r) {
      members.push_back({{"counts", counts_json(s.members()[r])},
                         {"probability", s.probabilities()[r]},
                         {"cumulative", s.cumulative()[r]}});
    }
    j["members"] = std::move(members);
    return emit(o, j.dump(2) + "\n");
  };
}

// ---------------------------------------------------------------- pvalue

Job plan_pvalue(const Options& o) {
  const EmpiricalDistribution phat = require_phat(o);
  const SimplexPoint p = parse_point(o.p);
  if (p.k() != phat.k()) throw UsageError("--p and --phat have different lengths");
  const std::string format = format_of(o, "csv");
  if (format != "csv" && format != "json") throw UsageError("unknown format " + format);
  if (simplex_size(phat.k(), phat.n()) > kMaxListedOutcomes * 50) throw UsageError("the discrete simplex is too large");
  return [=, &o] {
    const double value = p_value(phat, p);
    if (format == "csv") return emit(o, "p_value\n" + number(value) + "\n");
    Json j = header("pvalue");
    j["phat"] = counts_json(phat);
    j["p"] = point_json(p);
    j["p_value"] = value;
    return emit(o, j.dump(2) + "\n");
  };
}

// ---------------------------------------------------------------- widths

Job plan_widths(const Options& o) {
  const double delta = o.delta.value_or(0.7);
  if (!(delta > 0.0 && delta < 1.0)) throw UsageError("--delta must lie in (0, 1)");
  std::vector<Count> ns = o.n_list.empty() ? std::vector<Count>{10, 20, 30, 40, 50} : o.n_list;
  for (Count n : ns) {
    if (n < 2) throw UsageError("every entry of --n-list must be at least 2");
  }
  if (o.grid && *o.grid < 1) throw UsageError("--grid must be positive");
  const std::string format = format_of(o, "csv");
  if (format != "csv" && format != "json") throw UsageError("unknown format " + format);
  const std::optional<Count> grid = o.grid;
  return [=, &o] {
    const LinearFunctional f({0.0, 0.5, 1.0});
    const SimplexPoint pattern({0.1, 0.1, 0.8});
    double second_moment = 0.0;
    for (std::size_t i = 0; i < 3; ++i) second_moment += pattern[i] * f.values()[i] * f.values()[i];
    const double oracle_variance = second_moment - f(pattern) * f(pattern);

    std::ostringstream text;
    text << "n,method,lower,upper,width,note\n";
    Json rows = Json::array();
    auto add = [&](Count n, const IntervalResult& r) {
      text << n << "," << r.method << "," << number(r.lower) << "," << number(r.upper) << "," << number(r.width())
           << ",\n";
      Json row{{"n", n}, {"method", r.method}, {"lower", r.lower}, {"upper", r.upper}, {"width", r.width()}};
      if (r.grid_resolution) row["grid_resolution"] = *r.grid_resolution;
      rows.push_back(std::move(row));
    };
    for (Count n : ns) {
      const Count a = Count(std::lround(n / 10.0));
      const EmpiricalDistribution phat({a, a, n - 2 * a});
      if (n % 10 != 0) {
        const std::string note = "n not divisible by 10; counts adjusted to " + phat.to_string();
        text << n << ",warning,,,," << note << "\n";
        rows.push_back({{"n", n}, {"method", "warning"}, {"note", note}});
      }
      const double mean = f(phat);
      RegionSpec spec(delta, Construction::LevelSet, n, 3);
      add(n, functional_interval(phat, f, spec, grid.value_or(default_grid_resolution(n))));
      add(n, hoeffding_interval(mean, n, delta, 0.0, 1.0));
      add(n, oracle_chernoff_interval(mean, oracle_variance, n, delta, 0.0, 1.0));
      add(n, empirical_bernstein_interval(phat, f, delta));
      add(n, kl_bernoulli_interval(mean, n, delta));
    }
    if (format == "csv") return emit(o, text.str());
    Json j = header("widths");
    j["delta"] = delta;
    j["values"] = {0.0, 0.5, 1.0};
    j["rows"] = std::move(rows);
    return emit(o, j.dump(2) + "\n");
  };
}

// ---------------------------------------------------------------- volume

Job plan_volume(const Options& o) {
  if (!o.k) throw UsageError("--k is required");
  if (!o.n) throw UsageError("--n is required");
  const std::size_t k = *o.k;
  const Count n = *o.n;
  if (k < 1) throw UsageError("--k must be positive");
  const double delta = require_delta(o);
  const auto kinds = constructions(o, false);
  if (kinds.size() != 1) throw UsageError("volume takes a single --construction");
  const RegionSpec spec = make_spec(o, delta, kinds.front(), n, k);
  const Count m = o.grid.value_or(300);
  if (m < 50) throw UsageError("--grid must be at least 50 for volume estimates");
  if (o.prior_draws > 0 && !o.seed) throw UsageError("--prior-draws needs an explicit --seed");
  if (simplex_size(k, n) > kMaxListedOutcomes) throw UsageError("the discrete simplex is too large");
  const std::string format = format_of(o, "csv");
  if (format != "csv" && format != "json") throw UsageError("unknown format " + format);
  const std::uint64_t draws = o.prior_draws;
  const std::uint64_t seed = o.seed.value_or(0);
  return [=, &o] {
    const VolumeReport report = average_volume(spec, m);
    std::optional<double> prior_mean;
    if (draws > 0) {
      const auto volumes = uniform_prior_volumes(spec, m, draws, seed);
      double sum = 0.0;
      for (double v : volumes) sum += v;
      prior_mean = sum / double(volumes.size());
    }
    if (format == "csv") {
      std::ostringstream text;
      text << "kind," << csv_counts_header(k) << ",volume\n";
      for (const auto& [phat, v] : report.per_phat) text << "phat," << csv_counts(phat) << "," << number(v) << "\n";
      const std::string blanks(k, ',');
      text << "total" << blanks << "," << number(report.total) << "\n";
      if (prior_mean) text << "prior_mean" << blanks << "," << number(*prior_mean) << "\n";
      return emit(o, text.str());
    }
    Json j = header("volume");
    j["construction"] = std::string(to_string(spec.kind));
    j["k"] = k;
    j["n"] = n;
    j["delta"] = delta;
    j["grid_resolution"] = m;
    Json per = Json::array();
    for (const auto& [phat, v] : report.per_phat) per.push_back({{"phat", counts_json(phat)}, {"volume", v}});
    j["per_phat"] = std::move(per);
    j["total"] = report.total;
    if (prior_mean) {
      j["prior_draws"] = draws;
      j["seed"] = seed;
      j["prior_mean_volume"] = *prior_mean;
    }
    return emit(o, j.dump(2) + "\n");
  };
}

// ---------------------------------------------------------------- bandit

double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * double(values.size() - 1);
  const std::size_t lo = std::size_t(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - double(lo)) * (values[hi] - values[lo]);
}

Job plan_bandit(const Options& o) {
  if (!o.seed) throw UsageError("bandit runs are seeded; --seed is required");
  if (o.trials < 1) throw UsageError("--trials must be at least 1");
  const double delta = o.delta.value_or(0.05);
  if (!(delta > 0.0 && delta < 1.0)) throw UsageError("--delta must lie in (0, 1)");
  if (!(o.tolerance >= 0.0)) throw UsageError("--tolerance must be nonnegative");
  std::vector<BoundMethod> methods;
  for (const auto& name : o.methods) {
    const auto m = parse_bound_method(name);
    if (!m) throw UsageError("unknown bandit method '" + name + "'");
    methods.push_back(*m);
  }
  if (methods.empty()) methods = {BoundMethod::LevelSet, BoundMethod::KlBernoulli, BoundMethod::Hoeffding};
  const Count m = o.grid.value_or(300);
  if (m < 10) throw UsageError("--grid must be at least 10");
  if (o.max_samples < 5) throw UsageError("--max-samples must cover one pull per arm");
  const std::string format = format_of(o, "csv");
  if (format != "csv" && format != "json") throw UsageError("unknown format " + format);
  const std::uint64_t seed = *o.seed;
  return [=, &o] {
    const auto arms = star_rating_arms();
    std::ostringstream text;
    text << "row,method,trial,seed,stopping_time,identified_arm,capped,q1,median,q3\n";
    Json trials = Json::array();
    Json summary = Json::array();
    bool any_capped = false;
    for (BoundMethod method : methods) {
      const std::string name(to_string(method));
      std::vector<double> times;
      for (std::uint64_t t = 0; t < o.trials; ++t) {
        LucbConfig config;
        config.delta = delta;
        config.tolerance = o.tolerance;
        config.method = method;
        config.seed = seed + t;
        config.max_samples = o.max_samples;
        config.grid_resolution = m;
        const BanditRun run = lucb_run(arms, config);
        any_capped = any_capped || run.capped;
        times.push_back(double(run.stopping_time));
        text << "trial," << name << "," << t + 1 << "," << run.seed << "," << run.stopping_time << ","
             << run.identified_arm + 1 << "," << (run.capped ? "true" : "false") << ",,,\n";
        trials.push_back({{"method", name},
                          {"trial", t + 1},
                          {"seed", run.seed},
                          {"stopping_time", run.stopping_time},
                          {"identified_arm", run.identified_arm + 1},
                          {"per_arm_counts", run.per_arm_counts},
                          {"capped", run.capped}});
      }
      const double q1 = quantile(times, 0.25), med = quantile(times, 0.5), q3 = quantile(times, 0.75);
      text << "summary," << name << ",,,,,," << number(q1) << "," << number(med) << "," << number(q3) << "\n";
      summary.push_back({{"method", name}, {"q1", q1}, {"median", med}, {"q3", q3}});
    }
    Result r;
    if (format == "csv") {
      r = emit(o, text.str());
    } else {
      Json j = header("bandit");
      j["delta"] = delta;
      j["tolerance"] = o.tolerance;
      j["delta_schedule"] = BanditRun{}.delta_schedule;
      j["arms_are_one_indexed"] = true;
      j["trials"] = std::move(trials);
      j["summary"] = std::move(summary);
      r = emit(o, j.dump(2) + "\n");
    }
    if (any_capped) {
      r.code = kComputationFailed;
      r.diagnostic = "at least one run hit the sample cap before stopping";
    }
    return r;
  };
}

// ------------------------------------------------------------------ app

void add_format(CLI::App* sub, Options& o) {
  sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json", "text"}));
  sub->add_option("--out", o.out, "Output path (directory for region boundary dumps)");
}

void add_delta(CLI::App* sub, Options& o) { sub->add_option("--delta", o.delta, "Error level in (0, 1)"); }

void add_phat(CLI::App* sub, Options& o) {
  sub->add_option("--phat", o.phat, "Observed counts c1,c2,...")->delimiter(',');
}

void add_p(CLI::App* sub, Options& o) {
  sub->add_option("--p", o.p, "Probabilities p1,p2,... (decimals or fractions like 1/3)")->delimiter(',');
}

void add_construction(CLI::App* sub, Options& o) {
  sub->add_option("--construction", o.constructions, "levelset, sanov or polytope")
      ->delimiter(',')
      ->check(CLI::IsMember({"levelset", "sanov", "polytope"}));
  sub->add_option("--sanov-threshold", o.sanov_threshold, "Sanov radius: refined or generic")
      ->check(CLI::IsMember({"refined", "generic"}));
}

bool write_files(const std::vector<OutputFile>& files, std::ostream& err) {
  for (const auto& f : files) {
    std::error_code ec;
    if (f.path.has_parent_path()) std::filesystem::create_directories(f.path.parent_path(), ec);
    std::ofstream stream(f.path, std::ios::binary);
    stream << f.contents;
    if (!stream) {
      err << "error: cannot write " << f.path.string() << "\n";
      return false;
    }
  }
  return true;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimal-volume multinomial confidence regions", "mvcr"};
  app.require_subcommand(1);
  Options o;
  std::function<Job(const Options&)> plan;

  auto* region = app.add_subcommand("region", "Membership query, or k = 3 region dumps per construction");
  add_phat(region, o);
  add_p(region, o);
  add_delta(region, o);
  add_construction(region, o);
  region->add_option("--k", o.k, "Number of categories");
  region->add_option("--n", o.n, "Sample count");
  region->add_option("--grid", o.grid, "Grid resolution M for dumps (default 200)");
  add_format(region, o);
  region->callback([&] { plan = plan_region; });

  auto* covering = app.add_subcommand("covering", "List the covering collection S**(p)");
  add_p(covering, o);
  covering->add_option("--k", o.k, "Number of categories");
  covering->add_option("--n", o.n, "Sample count");
  add_delta(covering, o);
  add_format(covering, o);
  covering->callback([&] { plan = plan_covering; });

  auto* pvalue = app.add_subcommand("pvalue", "Exact p-value of an outcome");
  add_phat(pvalue, o);
  add_p(pvalue, o);
  pvalue->add_option("--k", o.k, "Number of categories");
  pvalue->add_option("--n", o.n, "Sample count");
  add_format(pvalue, o);
  pvalue->callback([&] { plan = plan_pvalue; });

  auto* widths = app.add_subcommand("widths", "Mean-interval widths against n for phat = (n/10, n/10, 8n/10)");
  widths->add_option("--n-list", o.n_list, "Sample sizes (default 10,20,30,40,50)")->delimiter(',');
  add_delta(widths, o);
  widths->add_option("--grid", o.grid, "Fixed grid resolution (default max(10n, 150))");
  add_format(widths, o);
  widths->callback([&] { plan = plan_widths; });

  auto* volume = app.add_subcommand("volume", "Region volumes summed over the discrete simplex");
  volume->add_option("--k", o.k, "Number of categories");
  volume->add_option("--n", o.n, "Sample count");
  add_delta(volume, o);
  add_construction(volume, o);
  volume->add_option("--grid", o.grid, "Grid resolution M >= 50 (default 300)");
  volume->add_option("--prior-draws", o.prior_draws, "Also average volumes under a uniform prior on p");
  volume->add_option("--seed", o.seed, "Seed for --prior-draws");
  add_format(volume, o);
  volume->callback([&] { plan = plan_volume; });

  auto* bandit = app.add_subcommand("bandit", "LUCB stopping times on the five-arm rating instance");
  bandit->add_option("--seed", o.seed, "Base seed; trial t uses seed + t - 1");
  bandit->add_option("--trials", o.trials, "Trials per method (default 10)");
  add_delta(bandit, o);
  bandit->add_option("--tolerance", o.tolerance, "LUCB tolerance (default 0)");
  bandit->add_option("--method", o.methods, "levelset, kl-bernoulli, hoeffding (default all)")->delimiter(',');
  bandit->add_option("--grid", o.grid, "Grid resolution for level-set intervals (default 300)");
  bandit->add_option("--max-samples", o.max_samples, "Sample cap per run (default 1e6)");
  add_format(bandit, o);
  bandit->callback([&] { plan = plan_bandit; });

  if (argc <= 1) {
    err << app.help();
    return kUsageError;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  Job job;
  try {
    job = plan(o);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  Result result;
  try {
    result = job();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kComputationFailed;
  }
  if (!write_files(result.files, err)) return kComputationFailed;
  out << result.text;
  if (!result.diagnostic.empty()) err << "error: " << result.diagnostic << "\n";
  return result.code;
}

}  // namespace mvcr::cli
