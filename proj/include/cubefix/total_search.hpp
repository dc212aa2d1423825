#pragma once

// Total search: return an eps-fixed point or a pair of queries proving the
// oracle is not a (1 - gamma)-contraction.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cubefix/errors.hpp"
#include "cubefix/geometry.hpp"
#include "cubefix/oracle.hpp"
#include "cubefix/solver.hpp"

namespace cubefix {

/// Two transcript entries with ||a1 - a2|| > (1 - gamma) ||q1 - q2||.
struct ViolationCertificate {
  std::size_t t1 = 0;
  std::size_t t2 = 0;
  RealPoint q1, q2, a1, a2;
  /// ||a1 - a2||
  double lhs = 0.0;
  /// (1 - gamma) ||q1 - q2||
  double rhs = 0.0;

  bool holds(double margin = 0.0) const { return lhs > rhs + margin; }

  nlohmann::json to_json() const {
    return {{"t1", t1}, {"t2", t2}, {"q1", q1},   {"q2", q2},
            {"a1", a1}, {"a2", a2}, {"lhs", lhs}, {"rhs", rhs}};
  }

  static ViolationCertificate from_json(const nlohmann::json& j) {
    ViolationCertificate c;
    c.t1 = j.at("t1").get<std::size_t>();
    c.t2 = j.at("t2").get<std::size_t>();
    c.q1 = j.at("q1").get<RealPoint>();
    c.q2 = j.at("q2").get<RealPoint>();
    c.a1 = j.at("a1").get<RealPoint>();
    c.a2 = j.at("a2").get<RealPoint>();
    c.lhs = j.at("lhs").get<double>();
    c.rhs = j.at("rhs").get<double>();
    return c;
  }
};

/// Tests the pair (t1, t2); `margin` demands lhs > rhs + margin.
inline std::optional<ViolationCertificate> check_pair(const QueryTranscript& tr, std::size_t t1,
                                                      std::size_t t2, double gamma,
                                                      double margin = 0.0) {
  const auto& e1 = tr.at(t1);
  const auto& e2 = tr.at(t2);
  ViolationCertificate c{t1, t2, e1.query, e2.query, e1.answer, e2.answer, 0.0, 0.0};
  c.lhs = linf_dist(e1.answer, e2.answer);
  c.rhs = (1.0 - gamma) * linf_dist(e1.query, e2.query);
  if (c.holds(margin)) return c;
  return std::nullopt;
}

/// Checks the last entry of `tr` against every earlier one.
inline std::optional<ViolationCertificate> scan_last_entry(const QueryTranscript& tr, double gamma,
                                                           double margin = 0.0) {
  if (tr.size() < 2) return std::nullopt;
  const std::size_t t2 = tr.size() - 1;
  for (std::size_t t1 = 0; t1 < t2; ++t1)
    if (auto c = check_pair(tr, t1, t2, gamma, margin)) return c;
  return std::nullopt;
}

/// First violating pair in the order t2 = 1, 2, ..., and t1 < t2 ascending.
inline std::optional<ViolationCertificate> scan_violations(const QueryTranscript& tr, double gamma,
                                                           double margin = 0.0) {
  detail::require(margin >= 0.0, "violation margin must be non-negative");
  for (std::size_t t2 = 1; t2 < tr.size(); ++t2)
    for (std::size_t t1 = 0; t1 < t2; ++t1)
      if (auto c = check_pair(tr, t1, t2, gamma, margin)) return c;
  return std::nullopt;
}

/// A (1 - gamma)-contraction on [0,1]^k agreeing with every entry of a
/// violation-free transcript:
///   f(x)_i = min(1, min_t ((1 - gamma) ||x - q^t|| + a^t_i)).
inline ContractionOracle extend_consistent(const QueryTranscript& tr, double gamma, std::size_t k) {
  detail::require(!tr.empty(), "extend_consistent needs a non-empty transcript");
  detail::require(gamma >= 0.0 && gamma <= 1.0, "gamma must lie in [0, 1]");
  for (const auto& e : tr)
    detail::require(e.query.size() == k && e.answer.size() == k, "transcript dimension mismatch");
  if (auto c = scan_violations(tr, gamma))
    throw UsageError("transcript violates the contraction inequality at entries " +
                     std::to_string(c->t1) + " and " + std::to_string(c->t2));
  const double lip = 1.0 - gamma;
  ContractionOracle f(
      k, 1.0, lip,
      [tr, lip, k](const RealPoint& x) {
        RealPoint y(k, 1.0);
        for (const auto& e : tr) {
          const double d = lip * linf_dist(x, e.query);
          for (std::size_t i = 0; i < k; ++i) y[i] = std::min(y[i], d + e.answer[i]);
        }
        return y;
      },
      "extension");
  return f;
}

struct TotalResult {
  Outcome outcome = Outcome::Failure;
  std::optional<RealPoint> fixed_point;
  std::optional<ViolationCertificate> certificate;
  UnitCubeResult solve;
  std::size_t queries = 0;

  nlohmann::json to_json() const {
    nlohmann::json j{{"outcome", to_string(outcome)}, {"queries", queries}};
    if (fixed_point) {
      j["fixed_point"] = *fixed_point;
      j["residual"] = solve.residual;
    }
    if (certificate) j["certificate"] = certificate->to_json();
    j["query_bound"] = solve.grid.bound;
    j["n"] = solve.grid.n;
    return j;
  }
};

/// Runs the unit-cube solver and scans each new query against earlier ones
/// on f's own transcript.
inline TotalResult solve_total(ContractionOracle& f, double eps, double gamma,
                               SolveOptions opts = {}, bool nonexpansive_only = false,
                               double margin = 0.0) {
  TotalResult out;
  const std::size_t first = f.queries();
  std::optional<ViolationCertificate> found;
  auto user_hook = opts.after_query;
  opts.after_query = [&](const RealPoint& q, const RealPoint& a) {
    if (user_hook && user_hook(q, a)) return true;
    QueryTranscript own(f.transcript().begin() + static_cast<std::ptrdiff_t>(first),
                        f.transcript().end());
    found = scan_last_entry(own, gamma, margin);
    return found.has_value();
  };
  out.solve = solve_unit_cube(f, eps, gamma, opts, nonexpansive_only);
  out.queries = f.queries() - first;
  if (found) {
    out.outcome = Outcome::ViolationFound;
    out.certificate = found;
    return out;
  }
  if (out.solve.outcome() == Outcome::FixedPointFound) {
    out.outcome = Outcome::FixedPointFound;
    out.fixed_point = out.solve.x;
    return out;
  }
  throw InternalInvariantFailure("solver reported '" + out.solve.grid.message +
                                 "' but the transcript has no contraction violation");
}

}  // namespace cubefix
