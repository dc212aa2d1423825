#include <catch_amalgamated.hpp>

#include <random>

#include "cubefix/geometry.hpp"

using namespace cubefix;

TEST_CASE("linf_dist examples") {
  CHECK(linf_dist(RealPoint{0, 0}, RealPoint{0, 0}) == 0.0);
  CHECK(linf_dist(RealPoint{1, 5}, RealPoint{4, 3}) == 3.0);
  CHECK(linf_dist(RealPoint{0.5, 0.5}, RealPoint{1, 1}) == 0.5);
  CHECK(linf_dist(GridPoint{1, 5}, GridPoint{4, 3}) == 3);
  CHECK_THROWS_AS(linf_dist(RealPoint{1}, RealPoint{1, 2}), UsageError);
}

TEST_CASE("in_pyramid examples") {
  Pyramid<Coord> p{{5, 5}, 0, +1};
  CHECK(in_pyramid(GridPoint{8, 5}, p));
  CHECK_FALSE(in_pyramid(GridPoint{5, 8}, p));
  for (std::size_t i = 0; i < 2; ++i)
    for (int phi : {-1, 1}) CHECK(in_pyramid(GridPoint{5, 5}, Pyramid<Coord>{{5, 5}, i, phi}));
  CHECK_THROWS_AS(in_pyramid(GridPoint{1, 2}, Pyramid<Coord>{{1, 2}, 2, 1}), UsageError);
  CHECK_THROWS_AS(in_pyramid(GridPoint{1, 2}, Pyramid<Coord>{{1, 2}, 0, 0}), UsageError);
}

TEST_CASE("every point has a dominating coordinate and pyramids are translation invariant") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<Coord> coord(-50, 50);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t k = 1 + trial % 4;
    GridPoint y(k), apex(k), shift(k);
    for (std::size_t i = 0; i < k; ++i) {
      y[i] = coord(rng);
      apex[i] = coord(rng);
      shift[i] = coord(rng);
    }
    bool any = false;
    for (std::size_t i = 0; i < k; ++i)
      for (int phi : {-1, 1}) {
        const bool in = in_pyramid(y, Pyramid<Coord>{apex, i, phi});
        any = any || in;
        GridPoint ys = y, as = apex;
        for (std::size_t j = 0; j < k; ++j) {
          ys[j] += shift[j];
          as[j] += shift[j];
        }
        CHECK(in_pyramid(ys, Pyramid<Coord>{as, i, phi}) == in);
      }
    CHECK(any);
  }
}

TEST_CASE("real pyramid membership uses the tolerance") {
  Pyramid<double> p{{0.5, 0.5}, 1, -1};
  CHECK(in_pyramid(RealPoint{0.5, 0.1}, p));
  CHECK_FALSE(in_pyramid(RealPoint{0.95, 0.1}, p));
  CHECK_FALSE(in_pyramid(RealPoint{0.9 + 1e-11, 0.1}, p));
  CHECK(in_pyramid(RealPoint{0.9 + 1e-11, 0.1}, p, 1e-9));
}

TEST_CASE("pyramid union with an apex outside the grid") {
  // apex (-2, 4), s = (+1, 0): only P_1(apex, +1) counts.
  CHECK(in_pyramid_union(GridPoint{4, 4}, {-2, 4}, SignVector{1, 0}));
  CHECK_FALSE(in_pyramid_union(GridPoint{0, 10}, {-2, 4}, SignVector{1, 0}));
  CHECK(in_pyramid_union(RealPoint{0.5, 0.2}, RealPoint{0.1, 0.1}, SignVector{1, 1}));
  CHECK_FALSE(in_pyramid_union(RealPoint{0.1, 0.2}, RealPoint{0.5, 0.1}, SignVector{1, 0}));
}

TEST_CASE("enumerate_even counts and order") {
  CHECK(enumerate_even(4, 2).size() == 9);
  auto one = enumerate_even(1, 3);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == GridPoint{0, 0, 0});
  CHECK(even_count(64, 2) == 1089);
  CHECK(enumerate_even(64, 2).size() == 1089);
  for (std::int64_t n : {0, 1, 5, 8}) {
    for (std::size_t k : {1u, 2u, 3u}) {
      auto pts = enumerate_even(n, k);
      CHECK(pts.size() == even_count(n, k));
      for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i - 1] < pts[i]);
      for (const auto& p : pts)
        for (Coord c : p) CHECK((c % 2 == 0 && c >= 0 && c <= n));
    }
  }
}

TEST_CASE("enumerate_even reports oversized instances") {
  CHECK_THROWS_AS(even_count(std::int64_t{1} << 30, 8), InstanceTooLarge);
  CHECK_THROWS_AS(enumerate_even(1000, 3, 1000), InstanceTooLarge);
  CHECK_THROWS_AS(enumerate_even(-1, 2), UsageError);
}

TEST_CASE("around_contains examples") {
  CHECK(around_contains(RealPoint{3, 3}, RealPoint{4, 2}));
  CHECK_FALSE(around_contains(RealPoint{3, 3}, RealPoint{5, 3}));
  CHECK(around_contains(RealPoint{3, 3}, RealPoint{3, 3}));
}

TEST_CASE("Around(x) meets the even grid for every x") {
  // Exhaustive over a quarter-integer lattice for small n, k.
  for (std::int64_t n = 1; n <= 6; ++n) {
    for (std::size_t k : {1u, 2u}) {
      const auto evens = enumerate_even(n, k);
      const int steps = static_cast<int>(4 * n);
      std::vector<int> idx(k, 0);
      while (true) {
        RealPoint x(k);
        for (std::size_t i = 0; i < k; ++i) x[i] = idx[i] / 4.0;
        const GridPoint r = round_to_even(x, n);
        CHECK(linf_dist(to_real(r), x) <= 1.0);
        bool any = false;
        for (const auto& e : evens) any = any || around_contains(to_real(e), x);
        CHECK(any);
        std::size_t i = 0;
        while (i < k && idx[i] == steps) idx[i++] = 0;
        if (i == k) break;
        ++idx[i];
      }
    }
  }
}

TEST_CASE("sign_vector examples") {
  CHECK(sign_vector({0, 0, 0}, {3.2, -0.5, 0}) == SignVector{1, -1, 0});
  CHECK(is_zero(sign_vector({0.3, 0.7}, {0.3, 0.7})));
  CHECK(sign_vector({0, 0}, {1e-12, -2}, 1e-9) == SignVector{0, -1});
  CHECK_THROWS_AS(sign_vector({0}, {0}, -1.0), UsageError);
}
