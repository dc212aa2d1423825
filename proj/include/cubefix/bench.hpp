#pragma once

// Benchmark sweeps over (k, eps, gamma, family, seed) with CSV output.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cubefix/errors.hpp"
#include "cubefix/instances.hpp"
#include "cubefix/solver.hpp"

namespace cubefix {

struct BenchConfig {
  std::vector<std::size_t> ks{1, 2, 3};
  std::vector<double> eps{0.5, 0.25};
  /// Empty means gamma = eps in every cell.
  std::vector<double> gammas;
  std::vector<std::string> families{"affine", "constant", "diamond"};
  std::size_t seeds = 10;
  std::uint64_t seed = 0;
  std::uint64_t cap = 10'000'000;
  bool baseline = false;
  std::size_t picard_budget = 1'000'000;
  /// Solve for a point near Fix(f) instead of a small residual.
  bool strong = false;
  bool strict_invariants = false;
};

struct BenchRecord {
  std::string instance;
  std::size_t k = 0;
  double eps = 0.0;
  double gamma = 0.0;
  std::int64_t n = 0;
  std::size_t queries = 0;
  std::size_t rounds = 0;
  double residual = 0.0;
  std::string outcome;
  double wall_seconds = 0.0;
  std::size_t bound = 0;
  bool invariants_ok = true;
  std::optional<std::size_t> picard_queries;
  /// ||x - Fix(f)|| for strong runs with a known fixed point.
  std::optional<double> fix_error;
  std::string note;

  bool solved() const { return outcome == to_string(Outcome::FixedPointFound); }
  bool skipped() const { return outcome.rfind("skipped", 0) == 0; }
  bool within_bound() const { return skipped() || queries <= bound; }
};

namespace detail {

inline std::string fmt_real(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace detail

/// Runs one cell of the sweep.
inline BenchRecord run_bench_instance(const InstanceSpec& spec, const BenchConfig& cfg) {
  BenchRecord rec;
  rec.instance = spec.id();
  rec.k = spec.k;
  rec.eps = spec.epsilon;
  rec.gamma = spec.gamma;
  if (spec.family == "diamond" && spec.k != 2) {
    rec.outcome = "skipped-dimension";
    rec.note = "diamond instances are two-dimensional";
    return rec;
  }
  Instance inst = build_instance(spec);
  const Parameters p = cfg.strong ? strong_to_weak(spec.epsilon, spec.gamma)
                                  : Parameters{spec.epsilon, spec.gamma};
  rec.n = planned_grid_side(p.eps, p.gamma, inst.nonexpansive_only);
  rec.bound = query_bound(rec.n, spec.k);
  if (even_count(rec.n, spec.k) > cfg.cap) {
    rec.outcome = "skipped-cap";
    rec.note = "EVEN(" + std::to_string(rec.n) + "," + std::to_string(spec.k) +
               ") exceeds the candidate cap " + std::to_string(cfg.cap);
    return rec;
  }
  SolveOptions opts;
  opts.candidate_cap = cfg.cap;
  opts.strict_invariants = cfg.strict_invariants;
  const auto t0 = std::chrono::steady_clock::now();
  const UnitCubeResult res = solve_unit_cube(*inst.oracle, p.eps, p.gamma, opts, inst.nonexpansive_only);
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.queries = inst.oracle->queries();
  rec.rounds = res.grid.rounds;
  rec.residual = res.residual;
  rec.outcome = to_string(res.outcome());
  rec.invariants_ok = res.grid.invariants.ok();
  rec.note = res.grid.message;
  if (cfg.strong && res.outcome() == Outcome::FixedPointFound)
    if (auto fix = inst.oracle->known_fixed_point(1.0)) rec.fix_error = linf_dist(res.x, *fix);
  if (cfg.baseline) {
    Instance fresh = build_instance(spec);
    const RealPoint start(spec.k, 0.0);
    const SolveResult pic = picard_baseline(*fresh.oracle, p.eps, start, cfg.picard_budget);
    rec.picard_queries = pic.queries;
  }
  return rec;
}

/// Rows in config order: k, eps, gamma, family, then seed.
inline std::vector<InstanceSpec> bench_specs(const BenchConfig& cfg) {
  std::vector<InstanceSpec> out;
  for (std::size_t k : cfg.ks)
    for (std::size_t e = 0; e < cfg.eps.size(); ++e) {
      const std::vector<double> gammas = cfg.gammas.empty() ? std::vector<double>{cfg.eps[e]} : cfg.gammas;
      for (double gamma : gammas)
        for (const auto& family : cfg.families)
          for (std::size_t s = 0; s < cfg.seeds; ++s) {
            InstanceSpec spec;
            spec.family = family;
            spec.k = k;
            spec.epsilon = cfg.eps[e];
            spec.gamma = gamma;
            spec.seed = cfg.seed + s;
            out.push_back(spec);
          }
    }
  return out;
}

inline std::vector<BenchRecord> run_bench(const BenchConfig& cfg,
                                          const std::function<void(const BenchRecord&)>& on_row = {}) {
  std::vector<BenchRecord> out;
  for (const auto& spec : bench_specs(cfg)) {
    BenchRecord rec;
    try {
      rec = run_bench_instance(spec, cfg);
    } catch (const InstanceTooLarge& e) {
      rec.instance = spec.id();
      rec.k = spec.k;
      rec.eps = spec.epsilon;
      rec.gamma = spec.gamma;
      rec.outcome = "skipped-cap";
      rec.note = e.what();
    } catch (const DomainError& e) {
      rec.instance = spec.id();
      rec.k = spec.k;
      rec.eps = spec.epsilon;
      rec.gamma = spec.gamma;
      rec.outcome = "error";
      rec.note = e.what();
    }
    if (on_row) on_row(rec);
    out.push_back(std::move(rec));
  }
  return out;
}

inline void write_bench_csv(std::ostream& os, const std::vector<BenchRecord>& rows, bool baseline) {
  os << "instance,k,eps,gamma,n,queries,rounds,residual,outcome";
  if (baseline) os << ",picard_queries";
  os << "\n";
  for (const auto& r : rows) {
    os << r.instance << ',' << r.k << ',' << detail::fmt_real(r.eps) << ','
       << detail::fmt_real(r.gamma) << ',' << r.n << ',' << r.queries << ',' << r.rounds << ','
       << detail::fmt_real(r.residual) << ',' << r.outcome;
    if (baseline) os << ',' << (r.picard_queries ? std::to_string(*r.picard_queries) : "");
    os << "\n";
  }
}

struct BenchSummary {
  std::size_t k = 0;
  double eps = 0.0;
  std::int64_t n = 0;
  std::size_t runs = 0;
  std::size_t skipped = 0;
  std::size_t max_queries = 0;
  std::size_t bound = 0;
  bool all_within_bound = true;
};

/// One row per (k, eps, n); n separates cells whose grids differ because
/// non-expansive instances take the shrink route.
inline std::vector<BenchSummary> summarize(const std::vector<BenchRecord>& rows) {
  std::map<std::tuple<std::size_t, double, std::int64_t>, BenchSummary> cells;
  std::vector<std::tuple<std::size_t, double, std::int64_t>> order;
  for (const auto& r : rows) {
    const auto key = std::make_tuple(r.k, r.eps, r.n);
    auto [it, inserted] = cells.try_emplace(key);
    if (inserted) order.push_back(key);
    auto& s = it->second;
    s.k = r.k;
    s.eps = r.eps;
    s.n = r.n;
    if (r.skipped()) {
      ++s.skipped;
      continue;
    }
    ++s.runs;
    s.max_queries = std::max(s.max_queries, r.queries);
    s.bound = r.bound;
    s.all_within_bound = s.all_within_bound && r.within_bound();
  }
  std::vector<BenchSummary> out;
  for (const auto& key : order) out.push_back(cells.at(key));
  return out;
}

inline void write_summary_csv(std::ostream& os, const std::vector<BenchSummary>& rows) {
  os << "k,eps,n,runs,skipped,max_queries,bound,all_within_bound\n";
  for (const auto& s : rows)
    os << s.k << ',' << detail::fmt_real(s.eps) << ',' << s.n << ',' << s.runs << ',' << s.skipped
       << ',' << s.max_queries << ',' << s.bound << ',' << (s.all_within_bound ? "true" : "false")
       << "\n";
}

}  // namespace cubefix
