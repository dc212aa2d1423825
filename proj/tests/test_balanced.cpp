#include <catch_amalgamated.hpp>

#include <random>

#include "cubefix/balanced.hpp"

using namespace cubefix;

namespace {

// Independent verifier: for each s in {-1,+1}^k, count the points of T that
// lie in some P_i(q, s_i) using in_pyramid directly.
bool balanced_by_definition(const GridPoint& q, const std::vector<GridPoint>& t) {
  const std::size_t k = q.size();
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    std::size_t covered = 0;
    for (const auto& x : t) {
      bool in = false;
      for (std::size_t i = 0; i < k && !in; ++i) {
        const int phi = (mask >> i) & 1u ? -1 : 1;
        in = in_pyramid(x, Pyramid<Coord>{q, i, phi});
      }
      covered += in;
    }
    if (2 * covered < t.size()) return false;
  }
  return true;
}

CandidateSet random_subset(std::int64_t n, std::size_t k, std::mt19937_64& rng, double keep) {
  std::bernoulli_distribution coin(keep);
  std::vector<GridPoint> pts;
  for_each_even(n, k, [&](const GridPoint& x) {
    if (coin(rng)) pts.push_back(x);
  });
  if (pts.empty()) pts.push_back(GridPoint(k, 0));
  return CandidateSet::from_points(n, k, pts);
}

}  // namespace

TEST_CASE("CandidateSet basics") {
  auto full = CandidateSet::full(4, 2);
  CHECK(full.size() == 9);
  CHECK(full.contains(GridPoint{2, 4}));
  CHECK_FALSE(full.contains(GridPoint{1, 2}));
  CHECK(full.points() == enumerate_even(4, 2));
  CHECK_THROWS_AS(CandidateSet::full(1000, 3, 1000), InstanceTooLarge);
  CandidateSet t(2, 4);
  CHECK_THROWS_AS(t.push_back(GridPoint{1, 0}), UsageError);
  CHECK_THROWS_AS(t.push_back(GridPoint{6, 0}), UsageError);
}

TEST_CASE("is_balanced examples in one dimension") {
  auto t = CandidateSet::from_points(8, 1, {{0}, {2}, {4}, {6}, {8}});
  CHECK(is_balanced(GridPoint{4}, t));
  CHECK_FALSE(is_balanced(GridPoint{0}, t));
  auto single = CandidateSet::from_points(8, 1, {{6}});
  CHECK(is_balanced(GridPoint{6}, single));
}

TEST_CASE("find_balanced_point examples") {
  SECTION("full one-dimensional set gives the smallest median") {
    for (std::int64_t n : {0, 1, 2, 7, 8, 16, 31}) {
      auto t = CandidateSet::full(n, 1);
      const auto q = find_balanced_point(t);
      CHECK(q == find_balanced_point_scan(t).value());
      const auto pts = t.points();
      // With m points, both {x >= q} and {x <= q} must hold at least m/2 of them.
      std::size_t le = 0, ge = 0;
      for (const auto& x : pts) {
        le += x[0] <= q[0];
        ge += x[0] >= q[0];
      }
      CHECK(2 * le >= pts.size());
      CHECK(2 * ge >= pts.size());
      if (q[0] > 0) {
        std::size_t le_prev = 0;
        for (const auto& x : pts) le_prev += x[0] <= q[0] - 1;
        CHECK(2 * le_prev < pts.size());
      }
    }
  }
  SECTION("singleton gives a point no larger than the member") {
    auto t = CandidateSet::from_points(8, 2, {{4, 6}});
    const auto q = find_balanced_point(t);
    CHECK(q <= GridPoint({4, 6}));
    CHECK(balanced_by_definition(q, t.points()));
    CHECK(q == find_balanced_point_scan(t).value());
  }
  SECTION("two opposite corners") {
    auto t = CandidateSet::from_points(4, 2, {{0, 0}, {4, 4}});
    const auto q = find_balanced_point(t);
    CHECK(balanced_by_definition(q, t.points()));
    CHECK(q == find_balanced_point_scan(t).value());
  }
}

TEST_CASE("is_balanced agrees with the definition") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + trial % 3;
    const std::int64_t n = 2 + trial % 7;
    auto t = random_subset(n, k, rng, 0.4);
    const auto pts = t.points();
    std::uniform_int_distribution<Coord> c(0, static_cast<Coord>(n));
    for (int j = 0; j < 10; ++j) {
      GridPoint q(k);
      for (auto& v : q) v = c(rng);
      CHECK(is_balanced(q, t) == balanced_by_definition(q, pts));
    }
  }
}

TEST_CASE("fast search matches the lexicographic scan") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + trial % 3;
    const std::int64_t n = 1 + trial % 12;
    auto t = random_subset(n, k, rng, trial % 2 ? 0.15 : 0.6);
    const auto fast = find_balanced_point(t);
    const auto scan = find_balanced_point_scan(t);
    REQUIRE(scan.has_value());
    CHECK(fast == *scan);
  }
}

TEST_CASE("prefix-sum and direct counting agree") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 2 + trial % 2;
    const std::int64_t n = k == 2 ? 128 : 40;
    auto t = random_subset(n, k, rng, 0.5);
    BalancedPointSearch search(t);
    REQUIRE(search.uses_prefix_sums());
    std::uniform_int_distribution<Coord> c(0, static_cast<Coord>(n));
    for (int j = 0; j < 20; ++j) {
      GridPoint q(k);
      for (auto& v : q) v = c(rng);
      CHECK(search.balanced(q) == is_balanced(q, t));
    }
    const auto q = search.find();
    REQUIRE(q.has_value());
    CHECK(is_balanced(*q, t));
  }
}

TEST_CASE("larger sets still give a balanced point") {
  for (std::size_t k : {1u, 2u, 3u, 4u}) {
    const std::int64_t n = k == 4 ? 16 : 64;
    auto t = CandidateSet::full(n, k);
    const auto q = find_balanced_point(t);
    CHECK(is_balanced(q, t));
  }
}
