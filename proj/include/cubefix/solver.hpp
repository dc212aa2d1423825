#pragma once

// Candidate elimination solver on the grid [0, n]^k, its unit-cube and
// strong-approximation entry points, and the Picard iteration baseline.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cubefix/balanced.hpp"
#include "cubefix/errors.hpp"
#include "cubefix/geometry.hpp"
#include "cubefix/instances.hpp"
#include "cubefix/oracle.hpp"

namespace cubefix {

enum class Outcome { FixedPointFound, ViolationFound, Failure };

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::FixedPointFound:
      return "fixed-point-found";
    case Outcome::ViolationFound:
      return "violation-found";
    case Outcome::Failure:
      return "failure";
  }
  return "failure";
}

/// ceil(log2(N)) + 1 with N = (floor(n/2) + 1)^k, in exact integer arithmetic.
inline std::size_t query_bound(std::int64_t n, std::size_t k) {
  const std::uint64_t count = even_count(n, k);
  return static_cast<std::size_t>(std::bit_width(count - 1)) + 1;
}

/// Members x of T lying in some P_i(a + offset * s, s_i) with s_i != 0.
/// The apex may leave the grid. The solver always uses offset 2.
inline CandidateSet eliminate(const CandidateSet& t, const GridPoint& a, const SignVector& s,
                              int apex_offset = 2) {
  const std::size_t k = t.dimension();
  detail::require(a.size() == k && s.size() == k, "eliminate: dimension mismatch");
  detail::require(!is_zero(s), "eliminate: sign vector must be non-zero");
  std::vector<std::int64_t> apex(k);
  for (std::size_t i = 0; i < k; ++i) apex[i] = std::int64_t{a[i]} + std::int64_t{apex_offset} * s[i];
  CandidateSet out(k, t.side());
  out.round = t.round + 1;
  for (std::size_t idx = 0; idx < t.size(); ++idx) {
    auto x = t[idx];
    std::int64_t dist = 0;
    std::int64_t best = std::numeric_limits<std::int64_t>::min();
    for (std::size_t i = 0; i < k; ++i) {
      const std::int64_t d = std::int64_t{x[i]} - apex[i];
      dist = std::max(dist, d < 0 ? -d : d);
      if (s[i] != 0) best = std::max(best, s[i] * d);
    }
    if (best == dist) out.push_back(x);
  }
  return out;
}

/// One solver round, emitted as a JSON line.
struct RoundRecord {
  std::size_t t = 0;
  GridPoint a;
  SignVector s;
  double residual = 0.0;
  std::size_t cand_size = 0;
  std::size_t queries_so_far = 0;

  nlohmann::json to_json() const {
    return {{"t", t},
            {"a_t", a},
            {"s", s},
            {"residual", residual},
            {"cand_size", cand_size},
            {"queries_so_far", queries_so_far}};
  }
};

struct InvariantReport {
  bool halving_ok = true;
  bool containment_ok = true;
  std::size_t halving_checks = 0;
  std::size_t containment_checks = 0;
  std::string witness;

  bool ok() const { return halving_ok && containment_ok; }
};

struct SolveOptions {
  /// Tolerance passed to sign_vector.
  double sign_tolerance = 0.0;
  std::uint64_t candidate_cap = 10'000'000;
  /// Distance of the elimination apex from the query, in multiples of s.
  int apex_offset = 2;
  bool check_invariants = true;
  /// Throw InternalInvariantFailure on a halving or containment violation
  /// instead of ending the run with a failure outcome.
  bool strict_invariants = false;
  /// Use the reference lexicographic scan for balanced points.
  bool reference_search = false;
  std::function<void(const RoundRecord&)> on_round;
  /// Called after every query with (query, answer); returning true stops the run.
  std::function<bool(const RealPoint&, const RealPoint&)> after_query;
};

struct SolveResult {
  Outcome outcome = Outcome::Failure;
  RealPoint answer;
  std::size_t queries = 0;
  std::size_t rounds = 0;
  /// ||g(a) - a|| at the last query, in grid units.
  double residual = 0.0;
  std::int64_t n = 0;
  std::size_t bound = 0;
  std::vector<RoundRecord> log;
  InvariantReport invariants;
  std::string message;

  nlohmann::json to_json() const {
    nlohmann::json rounds_json = nlohmann::json::array();
    for (const auto& r : log) rounds_json.push_back(r.to_json());
    return {{"outcome", to_string(outcome)},
            {"answer", answer},
            {"queries", queries},
            {"rounds", rounds},
            {"residual", residual},
            {"n", n},
            {"query_bound", bound},
            {"halving_ok", invariants.halving_ok},
            {"containment_ok", invariants.containment_ok},
            {"message", message},
            {"log", rounds_json}};
  }
};

namespace detail {

/// Even grid points within distance 1 - 1e-9 of `fix`; these must survive
/// every elimination round.
inline std::vector<GridPoint> even_points_around(const RealPoint& fix, std::int64_t n) {
  constexpr double kInner = 1.0 - 1e-9;
  const std::size_t k = fix.size();
  std::vector<std::vector<Coord>> axes(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto lo = static_cast<std::int64_t>(std::ceil(fix[i] - kInner));
    auto hi = static_cast<std::int64_t>(std::floor(fix[i] + kInner));
    lo = std::max<std::int64_t>(lo, 0);
    hi = std::min<std::int64_t>(hi, n);
    for (std::int64_t v = lo; v <= hi; ++v)
      if (v % 2 == 0) axes[i].push_back(static_cast<Coord>(v));
  }
  std::vector<GridPoint> out;
  GridPoint cur(k);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == k) {
      out.push_back(cur);
      return;
    }
    for (Coord v : axes[i]) {
      cur[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

inline std::string point_str(const std::vector<Coord>& p) { return nlohmann::json(p).dump(); }

}  // namespace detail

/// Candidate elimination on g: [0, n]^k -> [0, n]^k, with n = g.side().
/// Succeeds when some query a has ||g(a) - a|| <= 16 / gamma.
inline SolveResult solve(ContractionOracle& g, double gamma, const SolveOptions& opts = {}) {
  detail::require(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
  const double side = g.side();
  const auto n = static_cast<std::int64_t>(std::llround(side));
  detail::require(static_cast<double>(n) == side && n >= 1, "solve expects an integer grid side");
  const std::size_t k = g.dimension();
  const double threshold = 16.0 / gamma;

  SolveResult res;
  res.n = n;
  res.bound = query_bound(n, k);
  CandidateSet cand = CandidateSet::full(n, k, opts.candidate_cap);

  std::vector<GridPoint> around_fix;
  if (opts.check_invariants) {
    if (auto fix = g.known_fixed_point(1.0)) around_fix = detail::even_points_around(*fix, n);
  }
  auto fail_invariant = [&](const std::string& what) {
    res.invariants.witness = what;
    if (opts.strict_invariants) throw InternalInvariantFailure(what);
    res.outcome = Outcome::Failure;
    res.message = what;
  };
  auto check_containment = [&](const CandidateSet& c) {
    for (const auto& p : around_fix) {
      ++res.invariants.containment_checks;
      if (!c.contains(p)) {
        res.invariants.containment_ok = false;
        fail_invariant("containment violated at round " + std::to_string(c.round) + ": point " +
                       detail::point_str(p) + " near the fixed point was eliminated");
        return false;
      }
    }
    return true;
  };
  if (!check_containment(cand)) return res;

  const std::size_t start_queries = g.queries();
  while (true) {
    const GridPoint a = opts.reference_search ? find_balanced_point_scan(cand).value_or(GridPoint{})
                                              : find_balanced_point(cand);
    if (a.empty())
      throw InternalInvariantFailure("no balanced point exists for a candidate set of size " +
                                     std::to_string(cand.size()));
    const RealPoint query = to_real(a);
    const RealPoint answer = g(query);
    res.queries = g.queries() - start_queries;
    res.rounds = res.queries;
    res.answer = query;
    res.residual = linf_dist(answer, query);
    const SignVector s = sign_vector(query, answer, opts.sign_tolerance);

    RoundRecord rec{cand.round + 1, a, s, res.residual, cand.size(), res.queries};
    const bool stop = opts.after_query && opts.after_query(query, answer);
    if (!stop && res.residual > threshold && !is_zero(s)) {
      CandidateSet next = eliminate(cand, a, s, opts.apex_offset);
      rec.cand_size = next.size();
      res.log.push_back(rec);
      if (opts.on_round) opts.on_round(rec);
      if (opts.check_invariants) {
        ++res.invariants.halving_checks;
        if (2 * next.size() > cand.size()) {
          res.invariants.halving_ok = false;
          fail_invariant("halving violated at round " + std::to_string(next.round) + ": " +
                         std::to_string(cand.size()) + " -> " + std::to_string(next.size()) +
                         " after querying " + detail::point_str(a));
          return res;
        }
        if (!next.empty() && !check_containment(next)) return res;
      }
      if (next.empty()) {
        res.outcome = Outcome::ViolationFound;
        res.message = "candidate set emptied; the map is not a contraction";
        return res;
      }
      cand = std::move(next);
      continue;
    }
    res.log.push_back(rec);
    if (opts.on_round) opts.on_round(rec);
    if (stop) {
      res.outcome = Outcome::ViolationFound;
      res.message = "stopped by query hook";
    } else if (res.residual <= threshold) {
      res.outcome = Outcome::FixedPointFound;
    } else {
      res.outcome = Outcome::ViolationFound;
      res.message = "zero sign vector with residual above 16/gamma";
    }
    return res;
  }
}

/// Result of a solve on [0,1]^k.
struct UnitCubeResult {
  SolveResult grid;
  /// a / n for the returned grid point a.
  RealPoint x;
  /// ||f(x) - x|| measured on the original oracle.
  double residual = 0.0;
  double eps_used = 0.0;
  double gamma_used = 0.0;
  bool shrunk = false;

  Outcome outcome() const { return grid.outcome; }

  nlohmann::json to_json() const {
    auto j = grid.to_json();
    j["x"] = x;
    j["residual_f"] = residual;
    j["eps_used"] = eps_used;
    j["gamma_used"] = gamma_used;
    j["shrunk"] = shrunk;
    return j;
  }
};

/// Grid side the unit-cube solve will use for these parameters.
inline std::int64_t planned_grid_side(double eps, double gamma, bool nonexpansive_only) {
  if (nonexpansive_only || gamma < eps / 2.0) return grid_side(eps / 2.0, eps / 2.0);
  return grid_side(gamma, eps);
}

/// eps-fixed point of f on [0,1]^k. Non-expansive oracles and gamma < eps/2
/// go through the (1 - eps/2) shrink first.
inline UnitCubeResult solve_unit_cube(ContractionOracle& f, double eps, double gamma,
                                      const SolveOptions& opts = {},
                                      bool nonexpansive_only = false) {
  detail::require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
  detail::require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
  detail::require(f.side() == 1.0, "solve_unit_cube expects an oracle on [0,1]^k");
  UnitCubeResult out;
  out.shrunk = nonexpansive_only || gamma < eps / 2.0;
  out.eps_used = out.shrunk ? eps / 2.0 : eps;
  out.gamma_used = out.shrunk ? eps / 2.0 : gamma;

  std::optional<ContractionOracle> shrunk;
  ContractionOracle* target = &f;
  if (out.shrunk) {
    shrunk.emplace(reduce_nonexpansive(f, eps));
    target = &*shrunk;
  }
  GridOracle grid = rescale_to_grid(*target, out.gamma_used, out.eps_used);
  const std::size_t before = f.queries();
  out.grid = solve(grid.oracle, out.gamma_used, opts);
  if (f.queries() > before) {
    const auto& last = f.transcript().back();
    out.x = last.query;
    out.residual = linf_dist(last.answer, last.query);
  }
  return out;
}

/// Point within distance eps of Fix(f), via a weak (eps * gamma)-fixed point.
inline UnitCubeResult solve_strong(ContractionOracle& f, double eps, double gamma,
                                   const SolveOptions& opts = {}) {
  const Parameters p = strong_to_weak(eps, gamma);
  return solve_unit_cube(f, p.eps, p.gamma, opts);
}

/// Value iteration x <- f(x) until ||f(x) - x|| <= eps or the budget runs out.
inline SolveResult picard_baseline(ContractionOracle& f, double eps, RealPoint start,
                                   std::size_t max_queries) {
  detail::require(f.contains(start), "picard start must lie in the oracle domain");
  detail::require(eps > 0.0, "eps must be positive");
  SolveResult res;
  const std::size_t before = f.queries();
  RealPoint x = std::move(start);
  double best = std::numeric_limits<double>::infinity();
  RealPoint best_x = x;
  while (f.queries() - before < max_queries) {
    RealPoint y = f(x);
    const double r = linf_dist(y, x);
    res.queries = f.queries() - before;
    res.rounds = res.queries;
    if (r < best) {
      best = r;
      best_x = x;
    }
    if (r <= eps) {
      res.outcome = Outcome::FixedPointFound;
      res.answer = x;
      res.residual = r;
      return res;
    }
    x = std::move(y);
  }
  res.outcome = Outcome::Failure;
  res.answer = best_x;
  res.residual = best;
  res.message = "query budget exhausted";
  return res;
}

}  // namespace cubefix
