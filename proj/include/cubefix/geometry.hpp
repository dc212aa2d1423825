#pragma once

// Geometry of the l-infinity cube: norms, pyramids, the even grid, and
// unit neighborhoods. Integer points use exact arithmetic throughout.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cubefix/errors.hpp"

namespace cubefix {

using Coord = std::int32_t;
using GridPoint = std::vector<Coord>;
using RealPoint = std::vector<double>;
/// Entries in {-1, 0, +1}.
using SignVector = std::vector<int>;

/// Largest grid side accepted anywhere in the library.
inline constexpr std::int64_t kMaxGridSide = std::int64_t{1} << 30;

namespace detail {

template <class A, class B>
void require_same_dim(const A& x, const B& y) {
  if (x.size() != y.size())
    throw UsageError("dimension mismatch: " + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()));
}

template <class T>
using wide_t = std::conditional_t<std::is_integral_v<T>, std::int64_t, double>;

}  // namespace detail

/// max_i |x_i - y_i|. Integer inputs give an exact int64 result.
template <class T>
detail::wide_t<T> linf_dist(const std::vector<T>& x, const std::vector<T>& y) {
  detail::require_same_dim(x, y);
  detail::wide_t<T> best = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto d = static_cast<detail::wide_t<T>>(x[i]) - static_cast<detail::wide_t<T>>(y[i]);
    best = std::max(best, d < 0 ? -d : d);
  }
  return best;
}

inline double linf_norm(const RealPoint& x) {
  double best = 0.0;
  for (double v : x) best = std::max(best, std::abs(v));
  return best;
}

/// The pyramid P_i(apex, phi) = { y : phi * (y_i - apex_i) == ||y - apex|| }.
/// `coord` is zero-based. The apex may lie outside the cube.
template <class T>
struct Pyramid {
  std::vector<T> apex;
  std::size_t coord = 0;
  int phi = +1;
};

/// Membership test. Exact equality for integer points; for reals the
/// comparison is `phi*(y_i - apex_i) >= ||y - apex|| - tol` (the left side
/// never exceeds the right, so this is equality up to `tol`).
template <class T>
bool in_pyramid(const std::vector<T>& y, const Pyramid<T>& p,
                double tol = 0.0) {
  detail::require_same_dim(y, p.apex);
  detail::require(p.coord < y.size(), "pyramid coordinate out of range");
  detail::require(p.phi == 1 || p.phi == -1, "pyramid sign must be +1 or -1");
  using W = detail::wide_t<T>;
  const W lhs = static_cast<W>(p.phi) *
                (static_cast<W>(y[p.coord]) - static_cast<W>(p.apex[p.coord]));
  const W dist = linf_dist(y, p.apex);
  if constexpr (std::is_integral_v<T>) {
    (void)tol;
    return lhs == dist;
  } else {
    return lhs >= dist - tol;
  }
}

/// True iff y lies in the union of P_i(apex, s_i) over the coordinates with
/// s_i != 0. Works for integer apexes outside [0, n]^k.
inline bool in_pyramid_union(const GridPoint& y, const std::vector<std::int64_t>& apex,
                             const SignVector& s) {
  std::int64_t dist = 0;
  std::int64_t best_signed = std::numeric_limits<std::int64_t>::min();
  for (std::size_t i = 0; i < y.size(); ++i) {
    const std::int64_t d = static_cast<std::int64_t>(y[i]) - apex[i];
    dist = std::max(dist, d < 0 ? -d : d);
    if (s[i] != 0) best_signed = std::max(best_signed, s[i] * d);
  }
  return best_signed == dist;
}

/// Real-valued variant of in_pyramid_union with a membership tolerance.
inline bool in_pyramid_union(const RealPoint& y, const RealPoint& apex, const SignVector& s,
                             double tol = 0.0) {
  detail::require_same_dim(y, apex);
  detail::require_same_dim(y, s);
  double dist = 0.0;
  double best_signed = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - apex[i];
    dist = std::max(dist, std::abs(d));
    if (s[i] != 0) best_signed = std::max(best_signed, s[i] * d);
  }
  return best_signed >= dist - tol;
}

/// (floor(n/2) + 1)^k, or throws InstanceTooLarge on uint64 overflow.
inline std::uint64_t even_count(std::int64_t n, std::size_t k) {
  detail::require(n >= 0, "grid side must be non-negative");
  detail::require(k >= 1, "dimension must be at least 1");
  const std::uint64_t per_axis = static_cast<std::uint64_t>(n / 2) + 1;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (total > std::numeric_limits<std::uint64_t>::max() / per_axis)
      throw InstanceTooLarge("EVEN(" + std::to_string(n) + "," + std::to_string(k) +
                             ") has more than 2^64 points");
    total *= per_axis;
  }
  return total;
}

/// Calls fn(const GridPoint&) for every point of EVEN(n, k) in lexicographic order.
template <class Fn>
void for_each_even(std::int64_t n, std::size_t k, Fn&& fn) {
  (void)even_count(n, k);
  detail::require(n < kMaxGridSide, "grid side too large");
  GridPoint x(k, 0);
  const Coord top = static_cast<Coord>(n - n % 2);
  while (true) {
    fn(static_cast<const GridPoint&>(x));
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (x[i] < top) {
        x[i] += 2;
        break;
      }
      x[i] = 0;
      if (i == 0) return;
    }
  }
}

/// All of EVEN(n, k) in lexicographic order; refuses more than `limit` points.
inline std::vector<GridPoint> enumerate_even(std::int64_t n, std::size_t k,
                                             std::uint64_t limit = 10'000'000) {
  const std::uint64_t count = even_count(n, k);
  if (count > limit)
    throw InstanceTooLarge("EVEN(n,k) has " + std::to_string(count) + " points, limit is " +
                           std::to_string(limit));
  std::vector<GridPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for_each_even(n, k, [&](const GridPoint& x) { out.push_back(x); });
  return out;
}

/// linf_dist(center, y) <= 1.
template <class T>
bool around_contains(const std::vector<T>& center, const std::vector<T>& y) {
  return linf_dist(center, y) <= 1;
}

/// s_i = +1 if ga_i - a_i > tol, -1 if < -tol, else 0.
inline SignVector sign_vector(const RealPoint& a, const RealPoint& ga, double tolerance = 0.0) {
  detail::require_same_dim(a, ga);
  detail::require(tolerance >= 0.0, "sign tolerance must be non-negative");
  SignVector s(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = ga[i] - a[i];
    if (d > tolerance)
      s[i] = 1;
    else if (d < -tolerance)
      s[i] = -1;
  }
  return s;
}

inline bool is_zero(const SignVector& s) {
  return std::all_of(s.begin(), s.end(), [](int v) { return v == 0; });
}

inline RealPoint to_real(const GridPoint& x) { return RealPoint(x.begin(), x.end()); }

/// Nearest even integer in [0, n] to each coordinate (ties go down); the
/// result lies in Around(x) for every x in [0, n]^k.
inline GridPoint round_to_even(const RealPoint& x, std::int64_t n) {
  GridPoint out(x.size());
  const std::int64_t top = n - n % 2;
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto v = static_cast<std::int64_t>(std::floor(x[i] / 2.0 + 0.5)) * 2;
    if (v - x[i] == 1.0) v -= 2;  // exact tie lands on the lower even value
    out[i] = static_cast<Coord>(std::clamp<std::int64_t>(v, 0, top));
  }
  return out;
}

}  // namespace cubefix
