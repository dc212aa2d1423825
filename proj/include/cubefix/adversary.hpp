#pragma once

// Non-expansive maps on the diamond D whose vertices are the side midpoints
// of the unit square, and the strip family built from them.
//
// Everything is computed in rotated coordinates u = (x+y)/sqrt2,
// v = (y-x)/sqrt2. In those coordinates D is the axis-aligned box
// [kUMin, kUMax] x [kVMin, kVMax], the 45-degree lines are v = const, and the
// l-infinity norm of the plane becomes (|du| + |dv|) / sqrt2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "cubefix/errors.hpp"
#include "cubefix/geometry.hpp"
#include "cubefix/oracle.hpp"

namespace cubefix::adversary {

inline const double kSqrt2 = std::sqrt(2.0);
inline const double kUMin = 0.5 / kSqrt2;
inline const double kUMax = 1.5 / kSqrt2;
inline const double kVMin = -0.5 / kSqrt2;
inline const double kVMax = 0.5 / kSqrt2;
/// Euclidean side length of D.
inline const double kSideLength = 1.0 / kSqrt2;

struct Rotated {
  double u;
  double v;
};

inline Rotated to_rotated(const RealPoint& p) {
  detail::require(p.size() == 2, "diamond maps are two-dimensional");
  return {(p[0] + p[1]) / kSqrt2, (p[1] - p[0]) / kSqrt2};
}

inline RealPoint from_rotated(Rotated r) {
  return {(r.u - r.v) / kSqrt2, (r.u + r.v) / kSqrt2};
}

enum class Side { SW, NE };

inline std::string to_string(Side s) { return s == Side::SW ? "SW" : "NE"; }

/// The map f_{delta,s}. The anchor s sits on the SW or NE side at arc length
/// `arc` measured from that side's lower-v endpoint (the S vertex for SW,
/// the E vertex for NE).
class DiamondMap {
 public:
  DiamondMap(double delta, Side side, double arc) : delta_(delta), side_(side), arc_(arc) {
    detail::require(delta > 0.0 && delta < 0.5, "delta must lie in (0, 1/2)");
    detail::require(arc >= delta && arc <= kSideLength - delta,
                    "anchor must be at distance >= delta from the diamond vertices");
    v_anchor_ = kVMin + arc;
    u_anchor_ = side == Side::SW ? kUMin : kUMax;
  }

  double delta() const { return delta_; }
  Side side() const { return side_; }
  double arc() const { return arc_; }
  RealPoint anchor() const { return from_rotated({u_anchor_, v_anchor_}); }
  /// Other endpoint of the 45-degree line l0 through the anchor.
  RealPoint opposite() const { return from_rotated({side_ == Side::SW ? kUMax : kUMin, v_anchor_}); }
  double anchor_v() const { return v_anchor_; }
  double anchor_u() const { return u_anchor_; }

  /// True when p lies strictly between l1 and l2.
  bool in_central_strip(Rotated r) const { return std::abs(r.v - v_anchor_) < delta_; }

  /// Outer-region rule: move distance delta toward l0.
  Rotated outer_rule(Rotated r) const {
    return {r.u, r.v > v_anchor_ ? r.v - delta_ : r.v + delta_};
  }

  /// Central-strip rule: project onto l0, then slide toward the anchor by
  /// (delta - |pp'|) * |p's|.
  Rotated central_rule(Rotated r) const {
    const double shrink = delta_ - std::abs(r.v - v_anchor_);
    return {r.u - (r.u - u_anchor_) * shrink, v_anchor_};
  }

  Rotated apply(Rotated r) const { return in_central_strip(r) ? central_rule(r) : outer_rule(r); }

  nlohmann::json to_json() const {
    return {{"delta", delta_}, {"side", to_string(side_)}, {"arc", arc_}, {"anchor", anchor()}};
  }

 private:
  double delta_;
  Side side_;
  double arc_;
  double v_anchor_ = 0.0;
  double u_anchor_ = 0.0;
};

inline bool in_diamond(const RealPoint& p, double slack = 1e-12) {
  const auto r = to_rotated(p);
  return r.u >= kUMin - slack && r.u <= kUMax + slack && r.v >= kVMin - slack &&
         r.v <= kVMax + slack;
}

inline RealPoint clamp_to_square(RealPoint p) {
  for (double& x : p) x = std::clamp(x, 0.0, 1.0);
  return p;
}

/// Translates p perpendicular to the sides of D until it reaches D; points of
/// D are returned unchanged (up to rounding of the coordinate rotation).
inline RealPoint project_to_diamond(const RealPoint& p) {
  if (in_diamond(p, 0.0)) return p;
  auto r = to_rotated(p);
  r.u = std::clamp(r.u, kUMin, kUMax);
  r.v = std::clamp(r.v, kVMin, kVMax);
  return clamp_to_square(from_rotated(r));
}

/// f_{delta,s}(p) for p in D (1e-12 slack); UsageError otherwise.
inline RealPoint eval_diamond_map(const DiamondMap& m, const RealPoint& p) {
  if (!in_diamond(p))
    throw UsageError("point (" + std::to_string(p.at(0)) + ", " + std::to_string(p.at(1)) +
                     ") lies outside the diamond");
  const auto r = to_rotated(p);
  return clamp_to_square(from_rotated(m.apply(r)));
}

/// The extension p -> f(pi(p)) to the unit square as a non-expansive oracle.
inline ContractionOracle extend_to_square(const DiamondMap& m) {
  ContractionOracle oracle(
      2, 1.0, 1.0, [m](const RealPoint& p) { return eval_diamond_map(m, project_to_diamond(p)); },
      "diamond");
  oracle.set_fixed_point_hook([m](double lambda) -> std::optional<RealPoint> {
    if (lambda == 1.0) return m.anchor();
    return std::nullopt;
  });
  return oracle;
}

struct DiagonalReport {
  std::size_t pairs = 0;
  double max_ratio = 0.0;
  bool ok = true;
  std::optional<std::pair<RealPoint, RealPoint>> witness;
};

/// Samples pairs p, q with q - p along (1,1) or (1,-1) inside the domain picked
/// by `sample` and checks ||f(p) - f(q)|| <= ||p - q|| + 1e-12.
template <class Map, class Sampler, class Inside>
DiagonalReport check_diagonal_nonexpansive(Map&& f, Sampler&& sample, Inside&& inside,
                                           std::size_t samples, std::mt19937_64& rng) {
  DiagonalReport rep;
  std::uniform_real_distribution<double> len(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  while (rep.pairs < samples) {
    const RealPoint p = sample(rng);
    const double dy = coin(rng) ? 1.0 : -1.0;
    const double r = len(rng);
    const RealPoint q{p[0] + r, p[1] + dy * r};
    if (!inside(q) || r == 0.0) continue;
    ++rep.pairs;
    const double num = linf_dist(f(p), f(q));
    const double den = linf_dist(p, q);
    rep.max_ratio = std::max(rep.max_ratio, num / den);
    if (num > den + 1e-12 && rep.ok) {
      rep.ok = false;
      rep.witness = std::make_pair(p, q);
    }
  }
  return rep;
}

inline RealPoint sample_square(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {u(rng), u(rng)};
}

inline RealPoint sample_diamond(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> du(kUMin, kUMax);
  std::uniform_real_distribution<double> dv(kVMin, kVMax);
  return clamp_to_square(from_rotated({du(rng), dv(rng)}));
}

/// One strip S_x of the partition of D by 45-degree lines, 1-based index x.
struct Strip {
  std::size_t index;
  double v_lo;
  double v_hi;
  bool contains(const RealPoint& p) const {
    const double v = to_rotated(project_to_diamond(p)).v;
    return v >= v_lo && v <= v_hi;
  }
};

struct StripFamily {
  std::size_t strips = 0;
  double delta = 0.0;
  std::vector<Strip> partition;
  /// maps[2(x-1)] anchors at s_x (SW side), maps[2(x-1)+1] at t_x (NE side).
  std::vector<DiamondMap> maps;

  const DiamondMap& s_map(std::size_t x) const { return maps.at(2 * (x - 1)); }
  const DiamondMap& t_map(std::size_t x) const { return maps.at(2 * (x - 1) + 1); }

  nlohmann::json to_json() const {
    nlohmann::json j{{"N", strips}, {"delta", delta}, {"strips", nlohmann::json::array()}};
    for (std::size_t x = 1; x <= strips; ++x) {
      j["strips"].push_back({{"x", x}, {"anchor", "s"}});
      j["strips"].push_back({{"x", x}, {"anchor", "t"}});
    }
    return j;
  }
};

/// Bound on delta for which every central strip fits inside its S_x.
inline double strip_delta_bound(std::size_t strips) {
  return 1.0 / (2.0 * kSqrt2 * static_cast<double>(strips));
}

/// The 2N maps {f_{delta,s_x}, f_{delta,t_x}}: s_x on the SW side at distance
/// delta from the S vertex of S_x, t_x on the NE side at distance delta from
/// its N vertex.
inline StripFamily strip_family(std::size_t strips, double delta) {
  detail::require(strips >= 1 && (strips & (strips - 1)) == 0,
                  "number of strips must be a power of two");
  detail::require(delta > 0.0 && delta < strip_delta_bound(strips),
                  "delta must be below 1/(2*sqrt2*N)");
  StripFamily fam;
  fam.strips = strips;
  fam.delta = delta;
  const double width = kSideLength / static_cast<double>(strips);
  for (std::size_t x = 1; x <= strips; ++x) {
    const double lo = static_cast<double>(x - 1) * width;
    const double hi = static_cast<double>(x) * width;
    fam.partition.push_back({x, kVMin + lo, kVMin + hi});
    fam.maps.emplace_back(delta, Side::SW, lo + delta);
    fam.maps.emplace_back(delta, Side::NE, hi - delta);
  }
  return fam;
}

inline DiamondMap diamond_map_from_json(const nlohmann::json& j) {
  const std::string side = j.at("side").get<std::string>();
  detail::require(side == "SW" || side == "NE", "diamond side must be SW or NE");
  return DiamondMap(j.at("delta").get<double>(), side == "SW" ? Side::SW : Side::NE,
                    j.at("arc").get<double>());
}

}  // namespace cubefix::adversary
