#pragma once

// Randomized and exhaustive property suites over the geometry, the solver
// invariants, the consistent extension and the diamond maps. Each suite
// returns a report with the first counterexample it met.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cubefix/adversary.hpp"
#include "cubefix/balanced.hpp"
#include "cubefix/geometry.hpp"
#include "cubefix/instances.hpp"
#include "cubefix/solver.hpp"
#include "cubefix/total_search.hpp"

namespace cubefix::properties {

struct SuiteReport {
  SuiteReport() = default;
  explicit SuiteReport(std::string suite) : name(std::move(suite)) {}

  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::string witness;
  std::string note;

  bool passed() const { return failures == 0; }

  void fail(const std::string& what) {
    if (failures++ == 0) witness = what;
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"name", name}, {"trials", trials}, {"failures", failures},
                     {"passed", passed()}};
    if (!witness.empty()) j["witness"] = witness;
    if (!note.empty()) j["note"] = note;
    return j;
  }
};

namespace detail {

template <class T>
std::string dump(const T& v) {
  return nlohmann::json(v).dump();
}

inline SignVector random_nonzero_signs(std::size_t k, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> sgn(-1, 1);
  SignVector s(k);
  do {
    for (int& v : s) v = sgn(rng);
  } while (is_zero(s));
  return s;
}

/// Uniform multiple of 1/64 in [lo, hi]; exact in binary floating point.
inline double dyadic(double lo, double hi, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> d(static_cast<long>(std::ceil(lo * 64)),
                                        static_cast<long>(std::floor(hi * 64)));
  return static_cast<double>(d(rng)) / 64.0;
}

}  // namespace detail

/// For a contraction g on [0,n]^k and a point a with ||g(a) - a|| > 16/gamma,
/// Fix(g) lies in the union of P_i(a + 4s, s_i) over s_i != 0.
inline SuiteReport fixed_point_region(std::size_t trials, std::mt19937_64& rng) {
  SuiteReport rep{"fixed-point-region"};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t attempts = 0;
  while (rep.trials < trials && attempts < 200 * trials + 200) {
    ++attempts;
    const std::size_t k = 2 + attempts % 2;
    const double gamma = attempts % 3 == 0 ? 0.25 : 0.5;
    const double eps = attempts % 4 < 2 ? 0.25 : 0.125;
    AffineInstance inst;
    if (attempts % 2 == 0) {
      inst = random_affine(k, gamma, rng);
    } else {
      inst.gamma = gamma;
      inst.matrix.assign(k, std::vector<double>(k, 0.0));
      for (std::size_t i = 0; i < k; ++i) inst.offset.push_back(unit(rng));
    }
    const std::int64_t n = grid_side(gamma, eps);
    const double scale = static_cast<double>(n);
    RealPoint fix = inst.fixed_point();
    for (double& v : fix) v *= scale;
    RealPoint a(k);
    for (double& v : a) v = scale * unit(rng);
    RealPoint unit_a(k);
    for (std::size_t i = 0; i < k; ++i) unit_a[i] = a[i] / scale;
    RealPoint ga = inst.apply(unit_a);
    for (double& v : ga) v *= scale;
    if (linf_dist(ga, a) <= 16.0 / gamma) continue;
    ++rep.trials;
    const SignVector s = sign_vector(a, ga);
    RealPoint apex(k);
    for (std::size_t i = 0; i < k; ++i) apex[i] = a[i] + 4.0 * s[i];
    if (!in_pyramid_union(fix, apex, s, 1e-9 * scale))
      rep.fail("a=" + detail::dump(a) + " s=" + detail::dump(s) + " fix=" + detail::dump(fix));
  }
  return rep;
}

/// Every x in the union of P_i(b + 2s, s_i) has Around(x) inside the union of
/// P_i(b, s_i). Coordinates are multiples of 1/64, so the checks are exact.
inline SuiteReport around_containment(std::size_t trials, std::mt19937_64& rng) {
  SuiteReport rep{"around-containment"};
  for (std::size_t t = 0; t < trials; ++t) {
    ++rep.trials;
    const std::size_t k = 2 + t % 2;
    const SignVector s = detail::random_nonzero_signs(k, rng);
    RealPoint b(k), c(k), x(k);
    for (std::size_t i = 0; i < k; ++i) {
      b[i] = detail::dyadic(-2.0, 10.0, rng);
      c[i] = b[i] + 2.0 * s[i];
    }
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < k; ++i)
      if (s[i] != 0) active.push_back(i);
    const std::size_t dom = active[std::uniform_int_distribution<std::size_t>(0, active.size() - 1)(rng)];
    const double r = detail::dyadic(0.0, 4.0, rng);
    for (std::size_t i = 0; i < k; ++i)
      x[i] = i == dom ? c[i] + s[i] * r : c[i] + detail::dyadic(-r, r, rng);
    if (!in_pyramid_union(x, c, s)) {
      rep.fail("generated x outside the shifted union: " + detail::dump(x));
      continue;
    }
    std::vector<RealPoint> ys;
    for (std::uint32_t corner = 0; corner < (1u << k); ++corner) {
      RealPoint y = x;
      for (std::size_t i = 0; i < k; ++i) y[i] += (corner >> i) & 1u ? 1.0 : -1.0;
      ys.push_back(y);
    }
    for (int j = 0; j < 16; ++j) {
      RealPoint y = x;
      for (double& v : y) v += detail::dyadic(-1.0, 1.0, rng);
      ys.push_back(y);
    }
    for (const auto& y : ys)
      if (!in_pyramid_union(y, b, s)) {
        rep.fail("b=" + detail::dump(b) + " s=" + detail::dump(s) + " x=" + detail::dump(x) +
                 " y=" + detail::dump(y));
        break;
      }
  }
  return rep;
}

namespace detail {

/// y in P_j(a, phi) and in the union of P_i(a + 2s, s_i), all on the same lattice.
inline bool pyramid_meets_union(const RealPoint& y, const RealPoint& a, std::size_t j, int phi,
                                const SignVector& s) {
  RealPoint b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) b[i] = a[i] + 2.0 * s[i];
  return in_pyramid(y, Pyramid<double>{a, j, phi}) && in_pyramid_union(y, b, s);
}

/// Signs that must give an empty intersection: -s_j, or both when s_j = 0.
inline std::vector<int> disjoint_signs(int sj) {
  if (sj != 0) return {-sj};
  return {-1, 1};
}

}  // namespace detail

/// P_j(a, -s_j) (both signs when s_j = 0) misses the union of P_i(a + 2s, s_i).
/// Points of P_j(a, phi) are sampled on a 1/64 lattice inside [0, n]^k.
inline SuiteReport pyramid_elimination(std::size_t trials, std::mt19937_64& rng,
                                       std::int64_t n = 16) {
  SuiteReport rep{"pyramid-elimination"};
  std::uniform_int_distribution<Coord> coord(0, static_cast<Coord>(n));
  const double side = static_cast<double>(n);
  for (std::size_t t = 0; t < trials; ++t) {
    ++rep.trials;
    const std::size_t k = 2 + t % 2;
    const SignVector s = detail::random_nonzero_signs(k, rng);
    RealPoint a(k);
    for (double& v : a) v = coord(rng);
    bool bad = false;
    for (std::size_t j = 0; j < k && !bad; ++j) {
      for (int phi : detail::disjoint_signs(s[j])) {
        for (int sample = 0; sample < 32 && !bad; ++sample) {
          const double r = detail::dyadic(0.0, side, rng);
          RealPoint y(k);
          for (std::size_t i = 0; i < k; ++i)
            y[i] = i == j ? a[i] + phi * r : a[i] + detail::dyadic(-r, r, rng);
          bool inside = true;
          for (double v : y) inside = inside && v >= 0.0 && v <= side;
          if (!inside) continue;
          if (detail::pyramid_meets_union(y, a, j, phi, s)) {
            bad = true;
            rep.fail("a=" + detail::dump(a) + " s=" + detail::dump(s) + " j=" +
                     std::to_string(j) + " phi=" + std::to_string(phi) + " y=" + detail::dump(y));
          }
        }
      }
    }
  }
  return rep;
}

/// Exhaustive k = 2 version over every integer a, every s != 0 and every y on
/// the half-integer lattice of [0, n]^2, for n = 1..max_n.
inline SuiteReport pyramid_elimination_exhaustive(std::int64_t max_n = 8) {
  SuiteReport rep{"pyramid-elimination-exhaustive"};
  for (std::int64_t n = 1; n <= max_n; ++n) {
    for (int a0 = 0; a0 <= n; ++a0)
      for (int a1 = 0; a1 <= n; ++a1)
        for (int s0 = -1; s0 <= 1; ++s0)
          for (int s1 = -1; s1 <= 1; ++s1) {
            if (s0 == 0 && s1 == 0) continue;
            ++rep.trials;
            const RealPoint a{static_cast<double>(a0), static_cast<double>(a1)};
            const SignVector s{s0, s1};
            for (std::size_t j = 0; j < 2; ++j)
              for (int phi : detail::disjoint_signs(s[j]))
                for (std::int64_t y0 = 0; y0 <= 2 * n; ++y0)
                  for (std::int64_t y1 = 0; y1 <= 2 * n; ++y1) {
                    const RealPoint y{y0 / 2.0, y1 / 2.0};
                    if (detail::pyramid_meets_union(y, a, j, phi, s))
                      rep.fail("n=" + std::to_string(n) + " a=" + detail::dump(a) +
                               " s=" + detail::dump(s) + " j=" + std::to_string(j) +
                               " phi=" + std::to_string(phi) + " y=" + detail::dump(y));
                  }
          }
  }
  return rep;
}

/// Balance check written directly from the pyramid definition, sharing no
/// code with is_balanced.
inline bool verify_balanced(const GridPoint& q, const CandidateSet& t) {
  const std::size_t k = q.size();
  const auto pts = t.points();
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    std::size_t covered = 0;
    for (const auto& x : pts) {
      bool in = false;
      for (std::size_t i = 0; i < k && !in; ++i)
        in = in_pyramid(x, Pyramid<Coord>{q, i, (mask >> i) & 1u ? -1 : 1});
      covered += in ? 1 : 0;
    }
    if (2 * covered < pts.size()) return false;
  }
  return true;
}

namespace detail {

inline void check_balanced_instance(SuiteReport& rep, const CandidateSet& t) {
  ++rep.trials;
  try {
    const GridPoint q = find_balanced_point(t);
    bool in_range = q.size() == t.dimension();
    for (Coord c : q) in_range = in_range && c >= 0 && c <= t.side();
    if (!in_range || !verify_balanced(q, t))
      rep.fail("n=" + std::to_string(t.side()) + " T=" + dump(t.points()) + " q=" + dump(q));
  } catch (const InternalInvariantFailure& e) {
    rep.fail("n=" + std::to_string(t.side()) + " T=" + dump(t.points()) + ": " + e.what());
  }
}

}  // namespace detail

/// Every non-empty T in EVEN(n, 2), n = 1..max_n, has a verified balanced point.
inline SuiteReport balanced_existence_exhaustive(std::int64_t max_n = 6) {
  SuiteReport rep{"balanced-existence-exhaustive"};
  for (std::int64_t n = 1; n <= max_n; ++n) {
    const auto all = enumerate_even(n, 2);
    const std::uint32_t subsets = 1u << all.size();
    for (std::uint32_t mask = 1; mask < subsets; ++mask) {
      CandidateSet t(2, n);
      for (std::size_t i = 0; i < all.size(); ++i)
        if ((mask >> i) & 1u) t.push_back(all[i]);
      detail::check_balanced_instance(rep, t);
    }
  }
  return rep;
}

/// Random T in EVEN(n, k) with n drawn from [1, max_n].
inline SuiteReport balanced_existence_random(std::size_t trials, std::mt19937_64& rng,
                                             std::int64_t max_n = 10, std::size_t k = 3) {
  SuiteReport rep{"balanced-existence-random"};
  std::uniform_int_distribution<std::int64_t> side(1, max_n);
  std::uniform_real_distribution<double> density(0.0, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::int64_t n = side(rng);
    std::bernoulli_distribution keep(density(rng));
    CandidateSet cand(k, n);
    for_each_even(n, k, [&](const GridPoint& x) {
      if (keep(rng)) cand.push_back(x);
    });
    if (cand.empty()) cand.push_back(GridPoint(k, 0));
    detail::check_balanced_instance(rep, cand);
  }
  return rep;
}

/// Random violation-free transcripts: the extension reproduces every answer
/// within 1e-12 and passes a sampled (1 - gamma)-contraction check.
inline SuiteReport consistent_extension(std::size_t trials, std::size_t pairs, std::mt19937_64& rng) {
  SuiteReport rep{"consistent-extension"};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> len(1, 30);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t k = 1 + t % 3;
    const double gamma = 0.05 + 0.9 * unit(rng);
    QueryTranscript tr;
    do {
      AffineInstance inst = random_affine(k, gamma, rng);
      for (auto& row : inst.matrix)
        for (double& v : row) v *= 0.999;
      tr.clear();
      const std::size_t m = len(rng);
      for (std::size_t j = 0; j < m; ++j) {
        RealPoint q(k);
        for (double& v : q) v = unit(rng);
        tr.push_back({q, inst.apply(q)});
      }
    } while (scan_violations(tr, gamma));
    ++rep.trials;
    ContractionOracle f = extend_consistent(tr, gamma, k);
    for (std::size_t j = 0; j < tr.size(); ++j) {
      const double err = linf_dist(f.peek(tr[j].query), tr[j].answer);
      if (err > 1e-12) {
        rep.fail("entry " + std::to_string(j) + " reproduced with error " + std::to_string(err));
        break;
      }
    }
    for (std::size_t p = 0; p < pairs; ++p) {
      RealPoint x(k), y(k);
      for (double& v : x) v = unit(rng);
      if (p % 4 == 0)
        y = tr[p % tr.size()].query;
      else
        for (double& v : y) v = unit(rng);
      const RealPoint fx = f.peek(x), fy = f.peek(y);
      if (!f.contains(fx) || linf_dist(fx, fy) > (1.0 - gamma) * linf_dist(x, y) + 1e-12) {
        rep.fail("contraction check failed at x=" + detail::dump(x) + " y=" + detail::dump(y));
        break;
      }
    }
  }
  return rep;
}

/// f_{delta,s} extended to the square is non-expansive on diagonal pairs.
inline SuiteReport diagonal_pairs(std::size_t maps, std::size_t pairs, std::mt19937_64& rng) {
  SuiteReport rep{"diagonal-pairs"};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t m = 0; m < maps; ++m) {
    const double delta = 0.01 + 0.2 * unit(rng);
    const auto side = unit(rng) < 0.5 ? adversary::Side::SW : adversary::Side::NE;
    const double arc = delta + (adversary::kSideLength - 2.0 * delta) * unit(rng);
    const adversary::DiamondMap map(delta, side, arc);
    ContractionOracle f = adversary::extend_to_square(map);
    auto eval = [&](const RealPoint& p) { return f.peek(p); };
    auto in_square = [](const RealPoint& p) {
      return p[0] >= 0.0 && p[0] <= 1.0 && p[1] >= 0.0 && p[1] <= 1.0;
    };
    const auto in_d = [](const RealPoint& p) { return adversary::in_diamond(p, 0.0); };
    const std::size_t half = pairs / 2;
    auto r1 = adversary::check_diagonal_nonexpansive(eval, adversary::sample_square, in_square, half, rng);
    auto r2 = adversary::check_diagonal_nonexpansive(eval, adversary::sample_diamond, in_d, pairs - half, rng);
    rep.trials += r1.pairs + r2.pairs;
    worst = std::max({worst, r1.max_ratio, r2.max_ratio});
    for (const auto* r : {&r1, &r2})
      if (!r->ok)
        rep.fail("map " + map.to_json().dump() + " witness p=" + detail::dump(r->witness->first) +
                 " q=" + detail::dump(r->witness->second));
  }
  rep.note = "max ratio " + std::to_string(worst);
  return rep;
}

/// Runs the solver on instances with known fixed points and checks, every
/// round, 2|Cand^t| <= |Cand^{t-1}| and that the even points near Fix(g)
/// survive. `apex_offset` other than 2 is the mutation mode.
inline SuiteReport halving_containment(std::size_t runs, std::mt19937_64& rng, int apex_offset = 2) {
  SuiteReport rep{"halving-containment"};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t r = 0; r < runs; ++r) {
    const std::size_t k = 1 + r % 2;
    const double eps = r % 3 == 0 ? 1.0 / 16 : 1.0 / 8;
    const double gamma = 0.5;
    ContractionOracle f = [&] {
      if (r % 2 == 0) {
        RealPoint c(k);
        for (double& v : c) v = unit(rng);
        return make_constant(c, gamma);
      }
      return make_affine(random_affine(k, gamma, rng));
    }();
    SolveOptions opts;
    opts.apex_offset = apex_offset;
    const UnitCubeResult res = solve_unit_cube(f, eps, gamma, opts);
    rep.trials += res.grid.invariants.halving_checks;
    if (!res.grid.invariants.ok())
      rep.fail(f.name() + " k=" + std::to_string(k) + ": " + res.grid.invariants.witness);
  }
  if (apex_offset != 2) rep.note = "mutation: apex offset " + std::to_string(apex_offset);
  return rep;
}

struct SuiteConfig {
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  bool mutate = false;
};

/// The suites behind `verify-lemmas`; trial counts scale with `trials`.
inline std::vector<SuiteReport> run_all(const SuiteConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  const std::size_t t = cfg.trials;
  std::vector<SuiteReport> out;
  out.push_back(fixed_point_region(t, rng));
  out.push_back(around_containment(t, rng));
  out.push_back(pyramid_elimination(t, rng));
  out.push_back(t > 0 ? pyramid_elimination_exhaustive(8) : SuiteReport{"pyramid-elimination-exhaustive"});
  out.push_back(t > 0 ? balanced_existence_exhaustive(6) : SuiteReport{"balanced-existence-exhaustive"});
  out.push_back(balanced_existence_random(t, rng));
  out.push_back(consistent_extension((t + 9) / 10, 1000, rng));
  out.push_back(diagonal_pairs((t + 99) / 100, t > 0 ? 10000 : 0, rng));
  out.push_back(halving_containment((t + 9) / 10, rng, cfg.mutate ? 0 : 2));
  return out;
}

}  // namespace cubefix::properties
