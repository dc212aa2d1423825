#pragma once

// The `cubefix` command line: solve, bench, verify-lemmas, total and
// adversary-demo. run_cli is callable in-process with explicit streams.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cubefix/adversary.hpp"
#include "cubefix/bench.hpp"
#include "cubefix/errors.hpp"
#include "cubefix/instances.hpp"
#include "cubefix/properties.hpp"
#include "cubefix/solver.hpp"
#include "cubefix/total_search.hpp"

namespace cubefix::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kViolation = 2, kInternal = 3 };

struct SolveArgs {
  std::size_t k = 2;
  double eps = 0.5;
  double gamma = 0.5;
  std::uint64_t seed = 0;
  std::string family = "affine";
  std::string instance_file;
  std::uint64_t cap = 10'000'000;
  std::string out;
  std::string log;
  std::string variant = "weak";
  bool total = false;
};

struct BenchArgs {
  std::vector<std::size_t> ks{1, 2, 3};
  std::vector<double> eps{0.5, 0.25};
  std::vector<double> gammas;
  std::vector<std::string> families{"affine", "constant", "diamond"};
  std::size_t seeds = 10;
  std::uint64_t seed = 0;
  std::uint64_t cap = 10'000'000;
  std::string out;
  std::string variant = "weak";
  bool baseline = false;
};

struct LemmaArgs {
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  bool mutate = false;
  std::string out;
};

struct DemoArgs {
  std::size_t strips = 8;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::size_t trials = 1000;
  std::string out;
};

namespace detail {

using cubefix::detail::require;

inline void require_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) throw UsageError(std::string(name) + " must lie in (0, 1)");
}

/// Writes `text` to `path`, or to `fallback` when the path is empty.
inline void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw UsageError("cannot open output file '" + path + "'");
  f << text;
}

inline void check_variant(const std::string& v) {
  require(v == "weak" || v == "strong", "--variant must be 'weak' or 'strong'");
}

inline InstanceSpec load_spec(const SolveArgs& a) {
  InstanceSpec spec;
  if (!a.instance_file.empty()) {
    std::ifstream f(a.instance_file);
    if (!f) throw UsageError("cannot read instance file '" + a.instance_file + "'");
    spec = InstanceSpec::from_json(nlohmann::json::parse(f));
  } else {
    spec.family = a.family;
    spec.k = a.k;
    spec.gamma = a.gamma;
    spec.epsilon = a.eps;
    spec.seed = a.seed;
  }
  require(spec.k >= 1, "k must be at least 1");
  require_open_unit(spec.epsilon, "eps");
  require_open_unit(spec.gamma, "gamma");
  return spec;
}

}  // namespace detail

inline int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  detail::require(a.cap >= 1, "--cap must be at least 1");
  detail::check_variant(a.variant);
  const InstanceSpec spec = detail::load_spec(a);
  Instance inst = build_instance(spec);
  const Parameters p = a.variant == "strong" ? strong_to_weak(spec.epsilon, spec.gamma)
                                             : Parameters{spec.epsilon, spec.gamma};
  const std::int64_t n = planned_grid_side(p.eps, p.gamma, inst.nonexpansive_only);
  const std::uint64_t count = even_count(n, spec.k);
  if (count > a.cap)
    throw InstanceTooLarge("instance needs " + std::to_string(count) + " candidates on EVEN(" +
                           std::to_string(n) + "," + std::to_string(spec.k) +
                           "), above the candidate cap " + std::to_string(a.cap));

  std::unique_ptr<std::ofstream> log;
  if (!a.log.empty()) {
    log = std::make_unique<std::ofstream>(a.log);
    if (!*log) throw UsageError("cannot open log file '" + a.log + "'");
  }
  SolveOptions opts;
  opts.candidate_cap = a.cap;
  if (log) opts.on_round = [&](const RoundRecord& r) { *log << r.to_json().dump() << "\n"; };

  nlohmann::json doc{{"command", a.total ? "total" : "solve"},
                     {"seed", spec.seed},
                     {"instance", spec.to_json()},
                     {"variant", a.variant},
                     {"eps_solved", p.eps},
                     {"gamma_solved", p.gamma}};
  int code = kOk;
  RealPoint answer;
  if (a.total) {
    const TotalResult res = solve_total(*inst.oracle, p.eps, p.gamma, opts, inst.nonexpansive_only);
    doc["result"] = res.to_json();
    if (res.certificate) {
      code = kViolation;
      err << "violation certificate: entries " << res.certificate->t1 << " and "
          << res.certificate->t2 << "\n";
    } else {
      answer = *res.fixed_point;
    }
  } else {
    const UnitCubeResult res = solve_unit_cube(*inst.oracle, p.eps, p.gamma, opts, inst.nonexpansive_only);
    doc["result"] = res.to_json();
    if (res.outcome() == Outcome::FixedPointFound) {
      answer = res.x;
    } else {
      code = res.outcome() == Outcome::ViolationFound ? kViolation : kInternal;
      err << "solver outcome " << to_string(res.outcome()) << ": " << res.grid.message << "\n";
    }
  }
  if (!answer.empty()) {
    if (auto fix = inst.oracle->known_fixed_point(1.0))
      doc["ground_truth"] = {{"fixed_point", *fix}, {"distance", linf_dist(answer, *fix)}};
  }
  detail::emit(a.out, doc.dump(2) + "\n", out);
  return code;
}

inline int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  detail::require(a.cap >= 1, "--cap must be at least 1");
  detail::check_variant(a.variant);
  for (std::size_t k : a.ks) detail::require(k >= 1, "k must be at least 1");
  for (double e : a.eps) detail::require_open_unit(e, "eps");
  for (double g : a.gammas) detail::require_open_unit(g, "gamma");
  BenchConfig cfg;
  cfg.ks = a.ks;
  cfg.eps = a.eps;
  cfg.gammas = a.gammas;
  cfg.families = a.families;
  cfg.seeds = a.seeds;
  cfg.seed = a.seed;
  cfg.cap = a.cap;
  cfg.baseline = a.baseline;
  cfg.strong = a.variant == "strong";
  for (const auto& f : a.families)
    detail::require(f == "affine" || f == "constant" || f == "identity" || f == "reflect" || f == "diamond",
                    "unknown instance family '" + f + "'");

  const auto rows = run_bench(cfg, [&](const BenchRecord& r) {
    err << r.instance << " eps=" << r.eps << " n=" << r.n << " queries=" << r.queries << "/"
        << r.bound << " " << r.outcome << " (" << cubefix::detail::fmt_real(r.wall_seconds) << "s)";
    if (!r.note.empty()) err << " " << r.note;
    err << "\n";
  });
  std::ostringstream csv, summary;
  write_bench_csv(csv, rows, a.baseline);
  write_summary_csv(summary, summarize(rows));
  detail::emit(a.out, csv.str(), out);
  if (a.out.empty())
    err << summary.str();
  else
    detail::emit(a.out + ".summary.csv", summary.str(), out);

  int code = kOk;
  for (const auto& r : rows) {
    if (r.outcome == to_string(Outcome::Failure) || !r.within_bound() || !r.invariants_ok)
      return kInternal;
    if (r.outcome == to_string(Outcome::ViolationFound) || r.outcome == "error") code = kViolation;
  }
  return code;
}

inline int cmd_verify_lemmas(const LemmaArgs& a, std::ostream& out, std::ostream& err) {
  if (a.trials == 0) err << "warning: zero trials requested; every suite passes vacuously\n";
  properties::SuiteConfig cfg{a.trials, a.seed, a.mutate};
  const auto reports = properties::run_all(cfg);
  nlohmann::json doc{{"seed", a.seed}, {"trials", a.trials}, {"mutate", a.mutate},
                     {"suites", nlohmann::json::array()}};
  bool ok = true;
  for (const auto& r : reports) {
    doc["suites"].push_back(r.to_json());
    ok = ok && r.passed();
    out << (r.passed() ? "PASS " : "FAIL ") << r.name << " (" << r.trials << " trials)";
    if (!r.passed()) out << " witness: " << r.witness;
    out << "\n";
  }
  if (!a.out.empty()) detail::emit(a.out, doc.dump(2) + "\n", out);
  return ok ? kOk : kInternal;
}

inline int cmd_adversary_demo(const DemoArgs& a, std::ostream& out, std::ostream&) {
  const double delta = a.delta > 0.0 ? a.delta : adversary::strip_delta_bound(a.strips) / 2.0;
  const adversary::StripFamily fam = adversary::strip_family(a.strips, delta);
  std::mt19937_64 rng(a.seed);
  std::vector<RealPoint> queries;
  for (std::size_t i = 0; i < a.trials; ++i) queries.push_back(adversary::sample_square(rng));

  nlohmann::json doc{{"seed", a.seed}, {"family", fam.to_json()}, {"queries", a.trials},
                     {"strips", nlohmann::json::array()}};
  bool ok = true;
  for (std::size_t x = 1; x <= fam.strips; ++x) {
    const auto& sm = fam.s_map(x);
    const auto& tm = fam.t_map(x);
    const auto& strip = fam.partition[x - 1];
    ContractionOracle fs = adversary::extend_to_square(sm);
    ContractionOracle ft = adversary::extend_to_square(tm);
    const double dist = linf_dist(sm.anchor(), tm.anchor());
    std::size_t outside = 0, inside = 0, differing = 0;
    bool identical = true;
    for (const auto& q : queries) {
      const RealPoint ys = fs(q), yt = ft(q);
      if (strip.contains(q)) {
        ++inside;
        differing += ys != yt;
      } else {
        ++outside;
        identical = identical && ys == yt;
      }
    }
    auto eval_s = [&](const RealPoint& p) { return fs.peek(p); };
    auto eval_t = [&](const RealPoint& p) { return ft.peek(p); };
    auto in_square = [](const RealPoint& p) {
      return p[0] >= 0.0 && p[0] <= 1.0 && p[1] >= 0.0 && p[1] <= 1.0;
    };
    const auto rs = adversary::check_diagonal_nonexpansive(eval_s, adversary::sample_square, in_square, a.trials, rng);
    const auto rt = adversary::check_diagonal_nonexpansive(eval_t, adversary::sample_square, in_square, a.trials, rng);
    const bool strip_ok = dist > 0.5 && identical && rs.ok && rt.ok;
    ok = ok && strip_ok;
    doc["strips"].push_back({{"x", x},
                             {"s", sm.anchor()},
                             {"t", tm.anchor()},
                             {"anchor_distance", dist},
                             {"out_of_strip_queries", outside},
                             {"out_of_strip_identical", identical},
                             {"in_strip_queries", inside},
                             {"in_strip_differing", differing},
                             {"max_diagonal_ratio", std::max(rs.max_ratio, rt.max_ratio)},
                             {"ok", strip_ok}});
  }
  doc["ok"] = ok;
  detail::emit(a.out, doc.dump(2) + "\n", out);
  return ok ? kOk : kInternal;
}

namespace detail {

inline void add_solve_options(CLI::App* sub, SolveArgs& a) {
  sub->add_option("--k", a.k, "dimension");
  sub->add_option("--eps", a.eps, "target accuracy in (0,1)");
  sub->add_option("--gamma", a.gamma, "contraction gap in (0,1)");
  sub->add_option("--seed", a.seed, "instance seed");
  sub->add_option("--family", a.family, "affine | constant | identity | reflect | diamond");
  sub->add_option("--instance-file", a.instance_file, "JSON instance spec");
  sub->add_option("--cap", a.cap, "largest candidate set allowed");
  sub->add_option("--out", a.out, "result JSON path (default stdout)");
  sub->add_option("--log", a.log, "per-round JSON lines path");
  sub->add_option("--variant", a.variant, "weak (residual) or strong (distance to Fix)");
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Query-efficient fixed points of l-infinity contractions"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "solve one instance");
  detail::add_solve_options(solve, solve_args);
  solve->add_flag("--total", solve_args.total, "return a violation certificate when one appears");

  SolveArgs total_args;
  total_args.total = true;
  auto* total = app.add_subcommand("total", "total-search solve: fixed point or violation certificate");
  detail::add_solve_options(total, total_args);

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "benchmark sweep to CSV");
  bench->add_option("--k", bench_args.ks, "dimensions")->expected(0, -1);
  bench->add_option("--eps", bench_args.eps, "accuracies")->expected(0, -1);
  bench->add_option("--gamma", bench_args.gammas, "contraction gaps (default: gamma = eps)")->expected(0, -1);
  bench->add_option("--family", bench_args.families, "instance families")->expected(0, -1);
  bench->add_option("--trials", bench_args.seeds, "seeds per cell");
  bench->add_option("--seed", bench_args.seed, "first seed");
  bench->add_option("--cap", bench_args.cap, "largest candidate set allowed");
  bench->add_option("--out", bench_args.out, "CSV path (default stdout); summary goes to <out>.summary.csv");
  bench->add_option("--variant", bench_args.variant, "weak or strong");
  bench->add_flag("--baseline", bench_args.baseline, "add a Picard iteration column");

  LemmaArgs lemma_args;
  auto* lemmas = app.add_subcommand("verify-lemmas", "run the property suites");
  lemmas->add_option("--trials", lemma_args.trials, "randomized trials per suite");
  lemmas->add_option("--seed", lemma_args.seed, "generator seed");
  lemmas->add_flag("--mutate", lemma_args.mutate, "run the solver suite with a broken elimination apex");
  lemmas->add_option("--out", lemma_args.out, "JSON report path");

  DemoArgs demo_args;
  auto* demo = app.add_subcommand("adversary-demo", "strip family and indistinguishability replay");
  demo->add_option("--strips", demo_args.strips, "number of strips (power of two)");
  demo->add_option("--delta", demo_args.delta, "map parameter (default: half the allowed maximum)");
  demo->add_option("--seed", demo_args.seed, "generator seed");
  demo->add_option("--trials", demo_args.trials, "replayed queries and diagonal pairs per map");
  demo->add_option("--out", demo_args.out, "JSON report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_args, out, err);
    if (total->parsed()) return cmd_solve(total_args, out, err);
    if (bench->parsed()) return cmd_bench(bench_args, out, err);
    if (lemmas->parsed()) return cmd_verify_lemmas(lemma_args, out, err);
    if (demo->parsed()) return cmd_adversary_demo(demo_args, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const InstanceTooLarge& e) {
    err << "instance too large: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "bad instance file: " << e.what() << "\n";
    return kUsage;
  } catch (const InternalInvariantFailure& e) {
    err << "internal invariant failure: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

/// Argument-vector form; args[0] is the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace cubefix::cli
