#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cubefix/solver.hpp"

using namespace cubefix;

TEST_CASE("query_bound is exact") {
  CHECK(query_bound(64, 2) == 12);   // 33^2 = 1089, ceil(log2) = 11
  CHECK(query_bound(256, 3) == 23);  // 129^3
  CHECK(query_bound(16384, 1) == 15);
  CHECK(query_bound(2, 1) == 2);     // 2 points
  CHECK(query_bound(0, 3) == 1);     // single point
  CHECK(query_bound(14, 1) == 4);    // 8 points, a power of two
  for (std::int64_t n = 0; n < 300; ++n)
    for (std::size_t k = 1; k <= 3; ++k) {
      const double count = std::pow(static_cast<double>(n / 2 + 1), static_cast<double>(k));
      CHECK(query_bound(n, k) == static_cast<std::size_t>(std::ceil(std::log2(count) - 1e-12)) + 1);
    }
}

TEST_CASE("eliminate examples") {
  auto t = CandidateSet::full(8, 1);
  auto out = eliminate(t, GridPoint{4}, SignVector{1});
  CHECK(out.points() == std::vector<GridPoint>{{6}, {8}});
  CHECK(out.round == 1);
  CHECK(eliminate(t, GridPoint{4}, SignVector{-1}).points() == std::vector<GridPoint>{{0}, {2}});

  // One active coordinate in 2D: survivors form the wedge with x_1 - 6 >= |x_2 - 4|.
  auto t2 = CandidateSet::full(8, 2);
  auto wedge = eliminate(t2, GridPoint{4, 4}, SignVector{1, 0});
  for (const auto& p : t2.points()) {
    const bool expect = p[0] - 6 >= std::abs(p[1] - 4);
    CHECK(wedge.contains(p) == expect);
  }
  CHECK(wedge.contains(GridPoint{8, 2}));
  CHECK_FALSE(wedge.contains(GridPoint{8, 0}));
  CHECK(wedge.contains(GridPoint{6, 4}));

  // Apex outside the grid; T already inside the union.
  auto corner = CandidateSet::from_points(8, 2, {{6, 6}, {8, 8}, {8, 6}});
  CHECK(eliminate(corner, GridPoint{0, 0}, SignVector{1, 1}).size() == 3);
  auto low = eliminate(t2, GridPoint{0, 0}, SignVector{-1, -1});
  CHECK(low.empty());

  CHECK_THROWS_AS(eliminate(t, GridPoint{4}, SignVector{0}), UsageError);
}

TEST_CASE("eliminate matches pyramid membership") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> sgn(-1, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + trial % 3;
    const std::int64_t n = 10;
    auto t = CandidateSet::full(n, k);
    GridPoint a(k);
    SignVector s(k);
    std::uniform_int_distribution<Coord> c(0, n);
    for (auto& v : a) v = c(rng);
    do {
      for (int& v : s) v = sgn(rng);
    } while (is_zero(s));
    auto out = eliminate(t, a, s);
    for (const auto& p : t.points()) {
      bool in = false;
      for (std::size_t i = 0; i < k; ++i) {
        if (s[i] == 0) continue;
        GridPoint apex(k);
        for (std::size_t j = 0; j < k; ++j) apex[j] = a[j] + 2 * s[j];
        in = in || in_pyramid(p, Pyramid<Coord>{apex, i, s[i]});
      }
      CHECK(out.contains(p) == in);
    }
  }
}

TEST_CASE("solve on a constant map") {
  // n = 64 > 32 / gamma with gamma = 1; c far from the first query.
  ContractionOracle g(2, 64.0, 0.0, [](const RealPoint&) { return RealPoint{3.0, 61.0}; }, "const");
  g.set_fixed_point_hook([](double) -> std::optional<RealPoint> { return RealPoint{3.0, 61.0}; });
  SolveOptions opts;
  opts.strict_invariants = true;
  const auto res = solve(g, 1.0, opts);
  CHECK(res.outcome == Outcome::FixedPointFound);
  CHECK(linf_dist(res.answer, RealPoint{3.0, 61.0}) <= 16.0);
  CHECK(res.queries <= query_bound(64, 2));
  CHECK(res.queries == g.queries());
  CHECK(res.log.size() == res.queries);
  CHECK(res.invariants.ok());
  CHECK(res.invariants.halving_checks == res.queries - 1);
  for (std::size_t i = 0; i < res.log.size(); ++i) {
    CHECK(res.log[i].t == i + 1);
    CHECK(res.log[i].queries_so_far == i + 1);
  }
}

TEST_CASE("solve on random affine maps at n = 64") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    auto f = make_affine(random_affine(2, 0.5, rng));
    auto g = rescale_to_grid(f, 0.5, 0.5);
    REQUIRE(g.n == 64);
    SolveOptions opts;
    opts.strict_invariants = true;
    const auto res = solve(g.oracle, 0.5, opts);
    REQUIRE(res.outcome == Outcome::FixedPointFound);
    CHECK(res.residual <= 32.0);
    RealPoint x = res.answer;
    for (double& v : x) v /= 64.0;
    CHECK(linf_dist(f.peek(x), x) <= 0.5);
  }
}

TEST_CASE("solve_unit_cube residual, bound and invariants") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t k = 1 + trial % 3;
    const double eps = trial % 2 ? 0.25 : 0.125;
    const double gamma = k == 3 ? 0.5 : (trial % 4 == 1 ? 0.05 : 0.5);
    RealPoint c(k);
    for (double& v : c) v = u(rng);
    auto f = trial % 3 == 0 ? make_constant(c, gamma) : make_affine(random_affine(k, gamma, rng));
    SolveOptions opts;
    opts.strict_invariants = true;
    const auto res = solve_unit_cube(f, eps, gamma, opts);
    REQUIRE(res.outcome() == Outcome::FixedPointFound);
    CHECK(res.shrunk == (gamma < eps / 2));
    CHECK(res.residual <= eps + 1e-12);
    CHECK(linf_dist(f.peek(res.x), res.x) == res.residual);
    CHECK(f.queries() == res.grid.queries);
    CHECK(res.grid.queries <= query_bound(res.grid.n, k));
    CHECK(res.grid.n == planned_grid_side(eps, gamma, false));
  }
}

TEST_CASE("solve_unit_cube examples") {
  SECTION("f(x) = (1 - gamma) x") {
    auto f = make_affine({{{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0}, 0.5});
    const auto res = solve_unit_cube(f, 0.25, 0.5);
    REQUIRE(res.outcome() == Outcome::FixedPointFound);
    CHECK(linf_dist(f.peek(res.x), res.x) <= 0.25);
  }
  SECTION("bad parameters") {
    auto f = make_constant({0.5}, 0.5);
    CHECK_THROWS_AS(solve_unit_cube(f, 0.0, 0.5), UsageError);
    CHECK_THROWS_AS(solve_unit_cube(f, 0.5, 1.0), UsageError);
  }
  SECTION("candidate cap") {
    auto f = make_constant({0.5, 0.5, 0.5}, 0.25);
    SolveOptions opts;
    opts.candidate_cap = 1000;
    CHECK_THROWS_AS(solve_unit_cube(f, 0.25, 0.25, opts), InstanceTooLarge);
  }
}

TEST_CASE("strong variant lands near the true fixed point") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 1 + trial % 2;
    const double eps = 0.25, gamma = 0.5;
    auto inst = random_affine(k, gamma, rng);
    auto f = make_affine(inst);
    const auto res = solve_strong(f, eps, gamma);
    REQUIRE(res.outcome() == Outcome::FixedPointFound);
    CHECK(linf_dist(res.x, inst.fixed_point()) <= eps + 1e-9);
    CHECK(res.eps_used == eps * gamma);
  }
}

TEST_CASE("residual soundness near the fixed point") {
  // Points within distance 1 of Fix(g) have ||g(y) - y|| <= 2.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto f = make_affine(random_affine(3, 0.25, rng));
    auto g = rescale_to_grid(f, 0.25, 0.25);
    const auto fix = g.oracle.known_fixed_point().value();
    for (int j = 0; j < 100; ++j) {
      RealPoint y = fix;
      for (double& v : y) v = std::clamp(v + u(rng), 0.0, static_cast<double>(g.n));
      CHECK(linf_dist(g.oracle.peek(y), y) <= 2.0 + 1e-9);
    }
  }
}

TEST_CASE("reference scan and fast search give identical runs") {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 6; ++trial) {
    RealPoint c{std::uniform_real_distribution<double>(0, 1)(rng)};
    auto f1 = make_constant(c, 0.5);
    auto f2 = make_constant(c, 0.5);
    SolveOptions ref;
    ref.reference_search = true;
    const auto a = solve_unit_cube(f1, 0.125, 0.5);
    const auto b = solve_unit_cube(f2, 0.125, 0.5, ref);
    CHECK(a.x == b.x);
    CHECK(a.grid.queries == b.grid.queries);
  }
}

TEST_CASE("round log serialization") {
  RoundRecord r{3, {2, 4}, {1, -1}, 40.5, 17, 3};
  const auto j = r.to_json();
  CHECK(j["t"] == 3);
  CHECK(j["a_t"] == nlohmann::json({2, 4}));
  CHECK(j["s"] == nlohmann::json({1, -1}));
  CHECK(j["residual"] == 40.5);
  CHECK(j["cand_size"] == 17);
  CHECK(j["queries_so_far"] == 3);
}

TEST_CASE("promise violations surface as outcomes") {
  SECTION("expanding map empties the candidate set or stalls") {
    // x -> clamp(3x - n): not a contraction; its fixed points sit at 0, n/2, n.
    ContractionOracle g(1, 1024.0, 0.5, [](const RealPoint& x) {
      return RealPoint{std::clamp(3.0 * x[0] - 1024.0, 0.0, 1024.0)};
    });
    const auto res = solve(g, 0.5);
    CHECK(res.queries <= query_bound(1024, 1));
    CHECK((res.outcome == Outcome::FixedPointFound || res.outcome == Outcome::ViolationFound));
  }
  SECTION("query hook can stop the run") {
    auto f = make_constant({0.9}, 0.5);
    auto g = rescale_to_grid(f, 0.5, 0.125);
    SolveOptions opts;
    opts.after_query = [](const RealPoint&, const RealPoint&) { return true; };
    const auto res = solve(g.oracle, 0.5, opts);
    CHECK(res.outcome == Outcome::ViolationFound);
    CHECK(res.queries == 1);
  }
}

TEST_CASE("mutated elimination apex breaks halving") {
  // With the apex at a itself, T = EVEN(8,1) queried at 4 keeps {4, 6, 8}.
  auto t = CandidateSet::full(8, 1);
  auto out = eliminate(t, GridPoint{4}, SignVector{1}, 0);
  CHECK(out.size() == 3);
  CHECK(2 * out.size() > t.size());

  auto f = make_constant({0.95}, 0.5);
  SolveOptions opts;
  opts.apex_offset = 0;
  const auto res = solve_unit_cube(f, 0.125, 0.5, opts);
  CHECK(res.outcome() == Outcome::Failure);
  CHECK_FALSE(res.grid.invariants.halving_ok);
  opts.strict_invariants = true;
  auto f2 = make_constant({0.95}, 0.5);
  CHECK_THROWS_AS(solve_unit_cube(f2, 0.125, 0.5, opts), InternalInvariantFailure);
}

TEST_CASE("picard baseline") {
  SECTION("geometric decay of (1 - gamma) x") {
    const double gamma = 0.125, eps = 1e-3;
    auto f = make_affine({{{1.0}}, {0.0}, gamma});
    const auto res = picard_baseline(f, eps, {1.0}, 100000);
    REQUIRE(res.outcome == Outcome::FixedPointFound);
    // residual after m steps is gamma (1 - gamma)^m
    const auto m = static_cast<std::size_t>(std::ceil(std::log(eps / gamma) / std::log(1 - gamma)));
    CHECK(res.queries == m + 1);
  }
  SECTION("constant map takes two queries") {
    auto f = make_constant({0.3, 0.6}, 0.5);
    const auto res = picard_baseline(f, 0.01, {0.9, 0.9}, 10);
    CHECK(res.outcome == Outcome::FixedPointFound);
    CHECK(res.queries == 2);
    CHECK(res.answer == RealPoint{0.3, 0.6});
  }
  SECTION("budget exhaustion") {
    auto f = make_affine({{{-1.0}}, {1.0}, 1.0 / 256});
    const auto res = picard_baseline(f, 1.0 / 16, {0.0}, 50);
    CHECK(res.outcome == Outcome::Failure);
    CHECK(res.queries == 50);
  }
}
