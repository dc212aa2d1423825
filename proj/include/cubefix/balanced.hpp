#pragma once

// Candidate sets and balanced points.
//
// A grid point q is balanced for T when every sign vector s in {-1,+1}^k
// leaves at least half of T inside the union of pyramids P_i(q, s_i).
//
// Two searches return the same answer, the lexicographically smallest
// balanced point of [0:n]^k:
//   * find_balanced_point_scan walks the grid in order and tests each point
//     with is_balanced. Quadratic, used as the reference on small inputs.
//   * BalancedPointSearch prunes boxes of apexes. Writing a_i = s_i (x_i - q_i),
//     x escapes every pyramid of q iff max_i(-a_i) > max_i(a_i). Moving q_j in
//     the direction s_j only lowers a_j, so the escaping count U(s, q) is
//     monotone along s. Over a box of apexes the smallest U(s, .) sits at one
//     corner, which gives sound bounds on each coordinate.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cubefix/errors.hpp"
#include "cubefix/geometry.hpp"

namespace cubefix {

/// Points of EVEN(n, k) still possibly within distance 1 of the fixed point,
/// stored flat and in lexicographic order.
class CandidateSet {
 public:
  CandidateSet() = default;
  CandidateSet(std::size_t k, std::int64_t n) : k_(k), n_(n) {
    detail::require(k >= 1, "dimension must be at least 1");
    detail::require(n >= 0 && n < kMaxGridSide, "grid side out of range");
  }

  /// All of EVEN(n, k); InstanceTooLarge above `cap` points.
  static CandidateSet full(std::int64_t n, std::size_t k, std::uint64_t cap = 10'000'000) {
    const std::uint64_t count = even_count(n, k);
    if (count > cap)
      throw InstanceTooLarge("EVEN(" + std::to_string(n) + "," + std::to_string(k) + ") has " +
                             std::to_string(count) + " points, above the candidate cap " +
                             std::to_string(cap));
    CandidateSet out(k, n);
    out.flat_.reserve(static_cast<std::size_t>(count) * k);
    for_each_even(n, k, [&](const GridPoint& x) { out.flat_.insert(out.flat_.end(), x.begin(), x.end()); });
    return out;
  }

  static CandidateSet from_points(std::int64_t n, std::size_t k, std::vector<GridPoint> pts) {
    CandidateSet out(k, n);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    for (const auto& p : pts) out.push_back(p);
    return out;
  }

  void push_back(std::span<const Coord> x) {
    detail::require(x.size() == k_, "candidate dimension mismatch");
    for (Coord c : x) {
      detail::require(c >= 0 && c <= n_ && c % 2 == 0, "candidates must lie in EVEN(n,k)");
    }
    flat_.insert(flat_.end(), x.begin(), x.end());
  }

  std::size_t dimension() const { return k_; }
  std::int64_t side() const { return n_; }
  std::size_t size() const { return k_ == 0 ? 0 : flat_.size() / k_; }
  bool empty() const { return flat_.empty(); }
  std::span<const Coord> operator[](std::size_t i) const { return {flat_.data() + i * k_, k_}; }
  GridPoint point(std::size_t i) const {
    auto r = (*this)[i];
    return {r.begin(), r.end()};
  }
  std::vector<GridPoint> points() const {
    std::vector<GridPoint> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(point(i));
    return out;
  }
  bool contains(std::span<const Coord> x) const {
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      auto row = (*this)[mid];
      if (std::lexicographical_compare(row.begin(), row.end(), x.begin(), x.end()))
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo == size()) return false;
    auto row = (*this)[lo];
    return std::equal(row.begin(), row.end(), x.begin(), x.end());
  }
  const std::vector<Coord>& flat() const { return flat_; }

  /// Round index t of Cand^t.
  std::size_t round = 0;

 private:
  std::size_t k_ = 0;
  std::int64_t n_ = 0;
  std::vector<Coord> flat_;
};

namespace detail {

/// Bit i of the mask set means s_i = -1, clear means s_i = +1.
inline SignVector signs_from_mask(std::uint32_t mask, std::size_t k) {
  SignVector s(k);
  for (std::size_t i = 0; i < k; ++i) s[i] = (mask >> i) & 1u ? -1 : +1;
  return s;
}

inline void require_balanced_args(const CandidateSet& t, std::span<const Coord> q) {
  require(!t.empty(), "candidate set must be non-empty");
  require(q.size() == t.dimension(), "apex dimension mismatch");
  require(t.dimension() <= 24, "balanced-point search supports k <= 24");
}

}  // namespace detail

/// The balance test with per-candidate acceleration: one pass records, for
/// each x, which (i, phi) pyramids at q contain it as a bitmask; each sign
/// vector is then a mask intersection.
inline bool is_balanced(std::span<const Coord> q, const CandidateSet& t) {
  detail::require_balanced_args(t, q);
  const std::size_t k = t.dimension();
  // plus[x] has bit i when x in P_i(q,+1); minus[x] when x in P_i(q,-1).
  std::vector<std::uint32_t> plus(t.size()), minus(t.size());
  for (std::size_t idx = 0; idx < t.size(); ++idx) {
    auto x = t[idx];
    std::int64_t dist = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const std::int64_t d = std::int64_t{x[i]} - q[i];
      dist = std::max(dist, d < 0 ? -d : d);
    }
    for (std::size_t i = 0; i < k; ++i) {
      const std::int64_t d = std::int64_t{x[i]} - q[i];
      if (d == dist) plus[idx] |= 1u << i;
      if (-d == dist) minus[idx] |= 1u << i;
    }
  }
  const std::uint32_t all = k == 32 ? ~0u : (1u << k) - 1u;
  for (std::uint32_t mask = 0; mask <= all; ++mask) {
    // Pyramids chosen by s: P_i(q,-1) for bits in mask, P_i(q,+1) otherwise.
    std::size_t covered = 0;
    for (std::size_t idx = 0; idx < t.size(); ++idx)
      if ((minus[idx] & mask) || (plus[idx] & ~mask & all)) ++covered;
    if (2 * covered < t.size()) return false;
  }
  return true;
}

inline bool is_balanced(const GridPoint& q, const CandidateSet& t) {
  return is_balanced(std::span<const Coord>(q), t);
}

/// Reference search: first q of [0:n]^k in lexicographic order passing is_balanced.
inline std::optional<GridPoint> find_balanced_point_scan(const CandidateSet& t) {
  detail::require(!t.empty(), "candidate set must be non-empty");
  const std::size_t k = t.dimension();
  const auto n = static_cast<Coord>(t.side());
  GridPoint q(k, 0);
  while (true) {
    if (is_balanced(q, t)) return q;
    std::size_t i = k;
    while (true) {
      if (i == 0) return std::nullopt;
      --i;
      if (q[i] < n) {
        ++q[i];
        break;
      }
      q[i] = 0;
    }
  }
}

/// Branch-and-bound search for the lexicographically smallest balanced point.
class BalancedPointSearch {
 public:
  static constexpr std::size_t kMaxPrefixDim = 8;

  explicit BalancedPointSearch(const CandidateSet& t) : t_(t), k_(t.dimension()), n_(t.side()) {
    detail::require(!t.empty(), "candidate set must be non-empty");
    detail::require(k_ <= 24, "balanced-point search supports k <= 24");
    half_limit_ = t.size();
    lo_box_.assign(k_, std::numeric_limits<Coord>::max());
    hi_box_.assign(k_, std::numeric_limits<Coord>::min());
    for (std::size_t idx = 0; idx < t.size(); ++idx) {
      auto x = t[idx];
      for (std::size_t i = 0; i < k_; ++i) {
        lo_box_[i] = std::min(lo_box_[i], x[i]);
        hi_box_[i] = std::max(hi_box_[i], x[i]);
      }
    }
    // Direct counting costs |T| k per evaluation; the prefix-sum route costs
    // about 2 n 2^k lookups plus a one-off table build.
    const double direct_cost = static_cast<double>(t.size()) * static_cast<double>(k_);
    const double prefix_cost = 4.0 * static_cast<double>(std::max<std::int64_t>(n_, 1)) *
                               static_cast<double>(std::size_t{1} << std::min(k_, std::size_t{20}));
    use_prefix_ = k_ <= kMaxPrefixDim && direct_cost > prefix_cost;
    if (use_prefix_) build_prefix();
  }

  /// Number of x in T outside every P_i(q, s_i), s encoded by `mask`.
  std::size_t escaping(std::span<const Coord> q, std::uint32_t mask) const {
    ++evaluations_;
    return use_prefix_ ? escaping_prefix(q, mask) : escaping_direct(q, mask);
  }

  bool balanced(std::span<const Coord> q) const {
    const std::uint32_t all = (1u << k_) - 1u;
    for (std::uint32_t mask = 0; mask <= all; ++mask)
      if (2 * escaping(q, mask) > half_limit_) return false;
    return true;
  }

  std::optional<GridPoint> find() const {
    std::vector<Coord> lo(k_, 0), hi(k_, static_cast<Coord>(n_));
    return search(lo, hi);
  }

  std::size_t evaluations() const { return evaluations_; }
  bool uses_prefix_sums() const { return use_prefix_; }

 private:
  // ---- counting -----------------------------------------------------------

  std::size_t escaping_direct(std::span<const Coord> q, std::uint32_t mask) const {
    std::size_t count = 0;
    const std::size_t m = t_.size();
    const Coord* data = t_.flat().data();
    for (std::size_t idx = 0; idx < m; ++idx) {
      const Coord* x = data + idx * k_;
      std::int64_t mx = std::numeric_limits<std::int64_t>::min();
      std::int64_t mn = std::numeric_limits<std::int64_t>::max();
      for (std::size_t i = 0; i < k_; ++i) {
        std::int64_t a = std::int64_t{x[i]} - q[i];
        if ((mask >> i) & 1u) a = -a;
        mx = std::max(mx, a);
        mn = std::min(mn, a);
      }
      if (-mn > mx) ++count;
    }
    return count;
  }

  void build_prefix() {
    h_ = static_cast<std::size_t>(n_ / 2) + 1;
    stride_.assign(k_, 1);
    std::size_t total = 1;
    for (std::size_t i = k_; i-- > 0;) {
      stride_[i] = total;
      total *= h_ + 1;
    }
    prefix_.assign(total, 0);
    for (std::size_t idx = 0; idx < t_.size(); ++idx) {
      auto x = t_[idx];
      std::size_t off = 0;
      for (std::size_t i = 0; i < k_; ++i) off += (static_cast<std::size_t>(x[i] / 2) + 1) * stride_[i];
      ++prefix_[off];
    }
    for (std::size_t axis = 0; axis < k_; ++axis) {
      const std::size_t st = stride_[axis];
      for (std::size_t off = 0; off < total; ++off) {
        const std::size_t coord = (off / st) % (h_ + 1);
        if (coord > 0) prefix_[off] += prefix_[off - st];
      }
    }
  }

  /// Points of T with lo_i <= x_i <= hi_i for all i.
  std::size_t box_count(const std::array<std::int64_t, kMaxPrefixDim>& lo,
                        const std::array<std::int64_t, kMaxPrefixDim>& hi) const {
    std::array<std::size_t, kMaxPrefixDim> ylo{}, yhi{};
    for (std::size_t i = 0; i < k_; ++i) {
      const std::int64_t a = std::max<std::int64_t>(lo[i], lo_box_[i]);
      const std::int64_t b = std::min<std::int64_t>(hi[i], hi_box_[i]);
      if (a > b) return 0;
      // y = x / 2 ranges over ceil(a/2) .. floor(b/2); shift by one for the prefix layout.
      const std::int64_t ya = (a + 1) / 2;
      const std::int64_t yb = b / 2;
      if (ya > yb) return 0;
      ylo[i] = static_cast<std::size_t>(ya);
      yhi[i] = static_cast<std::size_t>(yb) + 1;
    }
    std::int64_t sum = 0;
    const std::uint32_t corners = 1u << k_;
    for (std::uint32_t c = 0; c < corners; ++c) {
      std::size_t off = 0;
      int parity = 0;
      for (std::size_t i = 0; i < k_; ++i) {
        if ((c >> i) & 1u) {
          off += ylo[i] * stride_[i];
          ++parity;
        } else {
          off += yhi[i] * stride_[i];
        }
      }
      sum += (parity & 1) ? -std::int64_t{prefix_[off]} : std::int64_t{prefix_[off]};
    }
    return static_cast<std::size_t>(sum);
  }

  /// Sum over m <= -1 of #{min_i a_i == m and max_i a_i <= -m-1}.
  std::size_t escaping_prefix(std::span<const Coord> q, std::uint32_t mask) const {
    std::int64_t m_lo = 0;
    for (std::size_t i = 0; i < k_; ++i) {
      const bool neg = (mask >> i) & 1u;
      const std::int64_t a_min = neg ? std::int64_t{q[i]} - hi_box_[i] : std::int64_t{lo_box_[i]} - q[i];
      m_lo = std::min(m_lo, a_min);
    }
    std::array<std::int64_t, kMaxPrefixDim> lo{}, hi{};
    // Box of x with alpha <= a_i <= beta for every i.
    auto count_between = [&](std::int64_t alpha, std::int64_t beta) -> std::size_t {
      if (alpha > beta) return 0;
      for (std::size_t i = 0; i < k_; ++i) {
        if ((mask >> i) & 1u) {
          lo[i] = q[i] - beta;
          hi[i] = q[i] - alpha;
        } else {
          lo[i] = q[i] + alpha;
          hi[i] = q[i] + beta;
        }
      }
      return box_count(lo, hi);
    };
    std::size_t total = 0;
    for (std::int64_t m = m_lo; m <= -1; ++m) {
      const std::int64_t top = -m - 1;
      total += count_between(m, top) - count_between(m + 1, top);
    }
    return total;
  }

  // ---- search -------------------------------------------------------------

  /// Corner of the box minimizing s_i q_i in every coordinate.
  void lower_corner(const std::vector<Coord>& lo, const std::vector<Coord>& hi, std::uint32_t mask,
                    std::vector<Coord>& out) const {
    for (std::size_t i = 0; i < k_; ++i) out[i] = ((mask >> i) & 1u) ? hi[i] : lo[i];
  }

  bool feasible_at(std::vector<Coord>& corner, std::uint32_t mask) const {
    return 2 * escaping(corner, mask) <= half_limit_;
  }

  /// Shrinks [lo, hi] to the coordinates any balanced point inside could use.
  /// Returns false when the box holds no balanced point.
  bool propagate(std::vector<Coord>& lo, std::vector<Coord>& hi) const {
    const std::uint32_t all = (1u << k_) - 1u;
    std::vector<Coord> corner(k_);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::uint32_t mask = 0; mask <= all; ++mask) {
        lower_corner(lo, hi, mask, corner);
        if (!feasible_at(corner, mask)) return false;
        for (std::size_t j = 0; j < k_; ++j) {
          if (lo[j] == hi[j]) continue;
          const bool neg = (mask >> j) & 1u;
          lower_corner(lo, hi, mask, corner);
          if (!neg) {
            // Feasible values of q_j form a prefix [lo_j, v*]; lo_j is feasible.
            Coord a = lo[j], b = hi[j];
            while (a < b) {
              const Coord mid = a + (b - a + 1) / 2;
              corner[j] = mid;
              if (feasible_at(corner, mask))
                a = mid;
              else
                b = mid - 1;
            }
            if (a < hi[j]) {
              hi[j] = a;
              changed = true;
            }
          } else {
            // Feasible values form a suffix [v*, hi_j]; hi_j is feasible.
            Coord a = lo[j], b = hi[j];
            while (a < b) {
              const Coord mid = a + (b - a) / 2;
              corner[j] = mid;
              if (feasible_at(corner, mask))
                b = mid;
              else
                a = mid + 1;
            }
            if (a > lo[j]) {
              lo[j] = a;
              changed = true;
            }
          }
        }
      }
    }
    return true;
  }

  std::optional<GridPoint> search(std::vector<Coord> lo, std::vector<Coord> hi) const {
    if (!propagate(lo, hi)) return std::nullopt;
    std::size_t j = 0;
    while (j < k_ && lo[j] == hi[j]) ++j;
    if (j == k_) return GridPoint(lo.begin(), lo.end());
    const Coord mid = lo[j] + (hi[j] - lo[j]) / 2;
    {
      auto hi_left = hi;
      hi_left[j] = mid;
      if (auto found = search(lo, hi_left)) return found;
    }
    lo[j] = mid + 1;
    return search(lo, hi);
  }

  const CandidateSet& t_;
  std::size_t k_;
  std::int64_t n_;
  std::size_t half_limit_ = 0;
  std::vector<Coord> lo_box_, hi_box_;
  bool use_prefix_ = false;
  std::size_t h_ = 0;
  std::vector<std::size_t> stride_;
  std::vector<std::uint32_t> prefix_;
  mutable std::size_t evaluations_ = 0;
};

/// Lexicographically smallest balanced point of T in [0:n]^k. A miss means
/// the existence guarantee was contradicted, so it is reported as an
/// internal failure.
inline GridPoint find_balanced_point(const CandidateSet& t) {
  BalancedPointSearch search(t);
  auto q = search.find();
  if (!q)
    throw InternalInvariantFailure("no balanced point exists for a candidate set of size " +
                                   std::to_string(t.size()));
  return *q;
}

}  // namespace cubefix
