#pragma once

// Concrete oracle families with closed-form fixed points, the black-box
// reductions between problem variants, and the declarative instance format.

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cubefix/adversary.hpp"
#include "cubefix/errors.hpp"
#include "cubefix/geometry.hpp"
#include "cubefix/oracle.hpp"

namespace cubefix {

using Matrix = std::vector<std::vector<double>>;

namespace detail {

inline double max_abs_row_sum(const Matrix& m) {
  double best = 0.0;
  for (const auto& row : m) {
    double s = 0.0;
    for (double v : row) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

inline void require_unit_interval(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) throw UsageError(std::string(name) + " must lie in (0, 1)");
}

}  // namespace detail

/// x -> (1 - gamma) M x + c on [0,1]^k.
struct AffineInstance {
  Matrix matrix;
  RealPoint offset;
  double gamma = 0.0;

  std::size_t dimension() const { return offset.size(); }

  RealPoint apply(const RealPoint& x, double lambda = 1.0) const {
    const std::size_t k = dimension();
    RealPoint y(k);
    for (std::size_t i = 0; i < k; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) acc += matrix[i][j] * x[j];
      y[i] = lambda * ((1.0 - gamma) * acc + offset[i]);
    }
    return y;
  }

  /// Solves (I - lambda (1-gamma) M) x = lambda c by dense LU.
  RealPoint fixed_point(double lambda = 1.0) const {
    const auto k = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd b(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      b(i) = lambda * offset[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < k; ++j)
        a(i, j) -= lambda * (1.0 - gamma) *
                   matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    const Eigen::VectorXd x = a.partialPivLu().solve(b);
    return RealPoint(x.data(), x.data() + k);
  }

  /// Per-coordinate [min, max] of the image of [0,1]^k.
  std::vector<std::pair<double, double>> image_bounds() const {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < dimension(); ++i) {
      double lo = offset[i], hi = offset[i];
      for (double v : matrix[i]) {
        lo += (1.0 - gamma) * std::min(v, 0.0);
        hi += (1.0 - gamma) * std::max(v, 0.0);
      }
      out.emplace_back(lo, hi);
    }
    return out;
  }
};

/// Builds the affine oracle after checking ||M||_inf <= 1 and that the
/// interval image of the cube stays inside the cube.
inline ContractionOracle make_affine(const AffineInstance& inst) {
  const std::size_t k = inst.dimension();
  detail::require(k >= 1, "affine instance needs k >= 1");
  detail::require(inst.matrix.size() == k, "matrix must be k x k");
  for (const auto& row : inst.matrix) detail::require(row.size() == k, "matrix must be k x k");
  detail::require(inst.gamma >= 0.0 && inst.gamma <= 1.0, "gamma must lie in [0, 1]");
  if (detail::max_abs_row_sum(inst.matrix) > 1.0 + 1e-12)
    throw UsageError("affine matrix has max absolute row sum above 1");
  for (const auto& [lo, hi] : inst.image_bounds())
    if (lo < -1e-12 || hi > 1.0 + 1e-12)
      throw UsageError("affine map does not send the unit cube into itself");
  ContractionOracle oracle(k, 1.0, 1.0 - inst.gamma,
                           [inst](const RealPoint& x) { return inst.apply(x); }, "affine");
  oracle.set_fixed_point_hook(
      [inst](double lambda) -> std::optional<RealPoint> { return inst.fixed_point(lambda); });
  return oracle;
}

/// Random instance: entries uniform in [-1, 1], rows normalized to absolute
/// sum 1, offset uniform over the range that keeps the image in the cube.
inline AffineInstance random_affine(std::size_t k, double gamma, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  AffineInstance inst;
  inst.gamma = gamma;
  inst.matrix.assign(k, std::vector<double>(k, 0.0));
  for (auto& row : inst.matrix) {
    double sum = 0.0;
    for (double& v : row) {
      v = entry(rng);
      sum += std::abs(v);
    }
    for (double& v : row) v /= sum;
  }
  inst.offset.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    double neg = 0.0, pos = 0.0;
    for (double v : inst.matrix[i]) (v < 0 ? neg : pos) += (1.0 - gamma) * v;
    const double lo = -neg, hi = 1.0 - pos;
    inst.offset[i] = lo + (hi - lo) * unit(rng);
  }
  return inst;
}

inline ContractionOracle make_constant(const RealPoint& c, double gamma) {
  for (double v : c) detail::require(v >= 0.0 && v <= 1.0, "constant value must lie in [0,1]^k");
  ContractionOracle oracle(c.size(), 1.0, 1.0 - gamma, [c](const RealPoint&) { return c; },
                           "constant");
  oracle.set_fixed_point_hook([c](double lambda) -> std::optional<RealPoint> {
    RealPoint out = c;
    for (double& v : out) v *= lambda;
    return out;
  });
  return oracle;
}

/// The identity map declared as a (1 - gamma)-contraction; every point is fixed.
inline ContractionOracle make_identity(std::size_t k, double gamma) {
  ContractionOracle oracle(k, 1.0, 1.0 - gamma, [](const RealPoint& x) { return x; }, "identity");
  oracle.set_fixed_point_hook([k](double lambda) -> std::optional<RealPoint> {
    if (lambda < 1.0) return RealPoint(k, 0.0);
    return std::nullopt;
  });
  return oracle;
}

/// x_i -> clamp(2 c_i - x_i, 0, 1): an isometry near c, declared as a
/// (1 - gamma)-contraction. Its unique fixed point is c.
inline ContractionOracle make_reflection(const RealPoint& center, double gamma) {
  ContractionOracle oracle(
      center.size(), 1.0, 1.0 - gamma,
      [center](const RealPoint& x) {
        RealPoint y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
          y[i] = std::clamp(2.0 * center[i] - x[i], 0.0, 1.0);
        return y;
      },
      "reflect");
  return oracle;
}

/// g(x) = n f(x / n) on [0, n]^k with n = ceil(16 / (gamma eps)).
struct GridOracle {
  std::int64_t n = 0;
  ContractionOracle oracle;
};

inline std::int64_t grid_side(double gamma, double eps) {
  detail::require(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
  detail::require(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
  const double n = std::ceil(16.0 / (gamma * eps));
  if (!(n < static_cast<double>(kMaxGridSide)))
    throw InstanceTooLarge("grid side ceil(16/(gamma*eps)) exceeds 2^30");
  return static_cast<std::int64_t>(n);
}

inline GridOracle rescale_to_grid(ContractionOracle& f, double gamma, double eps) {
  detail::require(f.side() == 1.0, "rescale_to_grid expects an oracle on [0,1]^k");
  const std::int64_t n = grid_side(gamma, eps);
  const double scale = static_cast<double>(n);
  ContractionOracle* inner = &f;
  ContractionOracle g(
      f.dimension(), scale, f.factor(),
      [inner, scale](const RealPoint& x) {
        RealPoint y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] / scale;
        RealPoint fy = (*inner)(y);
        for (double& v : fy) v *= scale;
        return fy;
      },
      f.name() + "@grid");
  if (f.fixed_point_hook()) {
    g.set_fixed_point_hook([inner, scale](double lambda) -> std::optional<RealPoint> {
      auto fp = inner->known_fixed_point(lambda);
      if (fp)
        for (double& v : *fp) v *= scale;
      return fp;
    });
  }
  return {n, std::move(g)};
}

/// g(x) = (1 - eps/2) f(x), declared a (1 - eps/2)-contraction since f is
/// only assumed non-expansive.
inline ContractionOracle reduce_nonexpansive(ContractionOracle& f, double eps) {
  detail::require(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
  const double lambda = 1.0 - eps / 2.0;
  ContractionOracle* inner = &f;
  ContractionOracle g(
      f.dimension(), f.side(), lambda,
      [inner, lambda](const RealPoint& x) {
        RealPoint y = (*inner)(x);
        for (double& v : y) v *= lambda;
        return y;
      },
      f.name() + "@shrunk");
  if (f.fixed_point_hook()) {
    g.set_fixed_point_hook([inner, lambda](double mu) -> std::optional<RealPoint> {
      return inner->known_fixed_point(mu * lambda);
    });
  }
  return g;
}

struct Parameters {
  double eps;
  double gamma;
};

/// Strong eps-fixed points reduce to weak (eps * gamma)-fixed points.
inline Parameters strong_to_weak(double eps, double gamma) {
  detail::require(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
  detail::require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
  return {eps * gamma, gamma};
}

// ---------------------------------------------------------------------------
// Declarative instances: {family, k, gamma, epsilon, seed, params}.

struct InstanceSpec {
  std::string family = "affine";
  std::size_t k = 2;
  double gamma = 0.5;
  double epsilon = 0.5;
  std::uint64_t seed = 0;
  nlohmann::json params = nlohmann::json::object();

  nlohmann::json to_json() const {
    return {{"family", family}, {"k", k},         {"gamma", gamma},
            {"epsilon", epsilon}, {"seed", seed}, {"params", params}};
  }

  static InstanceSpec from_json(const nlohmann::json& j) {
    InstanceSpec s;
    s.family = j.at("family").get<std::string>();
    s.k = j.at("k").get<std::size_t>();
    s.gamma = j.at("gamma").get<double>();
    s.epsilon = j.at("epsilon").get<double>();
    s.seed = j.value("seed", std::uint64_t{0});
    s.params = j.value("params", nlohmann::json::object());
    return s;
  }

  std::string id() const { return family + "-k" + std::to_string(k) + "-s" + std::to_string(seed); }
};

/// An oracle on [0,1]^k built from a spec, plus what the harness needs to
/// know about it.
struct Instance {
  InstanceSpec spec;
  /// Only the contraction promise is honest for contraction families.
  bool nonexpansive_only = false;
  std::unique_ptr<ContractionOracle> oracle;
  std::optional<AffineInstance> affine;
  std::optional<adversary::DiamondMap> diamond;
};

inline Instance build_instance(const InstanceSpec& spec) {
  detail::require(spec.k >= 1, "k must be at least 1");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Instance inst;
  inst.spec = spec;
  const auto& p = spec.params;
  if (spec.family == "affine") {
    AffineInstance a;
    if (p.contains("matrix")) {
      a.matrix = p.at("matrix").get<Matrix>();
      a.offset = p.at("offset").get<RealPoint>();
      a.gamma = spec.gamma;
    } else {
      a = random_affine(spec.k, spec.gamma, rng);
    }
    detail::require(a.dimension() == spec.k, "affine offset must have k entries");
    inst.oracle = std::make_unique<ContractionOracle>(make_affine(a));
    inst.affine = std::move(a);
  } else if (spec.family == "constant") {
    RealPoint c;
    if (p.contains("value")) {
      c = p.at("value").get<RealPoint>();
    } else {
      for (std::size_t i = 0; i < spec.k; ++i) c.push_back(unit(rng));
    }
    detail::require(c.size() == spec.k, "constant value must have k entries");
    inst.oracle = std::make_unique<ContractionOracle>(make_constant(c, spec.gamma));
  } else if (spec.family == "identity") {
    inst.oracle = std::make_unique<ContractionOracle>(make_identity(spec.k, spec.gamma));
  } else if (spec.family == "reflect") {
    RealPoint c = p.contains("center") ? p.at("center").get<RealPoint>()
                                       : RealPoint(spec.k, p.value("center_value", 0.7));
    detail::require(c.size() == spec.k, "reflection center must have k entries");
    inst.oracle = std::make_unique<ContractionOracle>(make_reflection(c, spec.gamma));
  } else if (spec.family == "diamond") {
    detail::require(spec.k == 2, "the diamond family is two-dimensional");
    const double delta = p.value("delta", 0.05);
    adversary::Side side = unit(rng) < 0.5 ? adversary::Side::SW : adversary::Side::NE;
    if (p.contains("side"))
      side = p.at("side").get<std::string>() == "NE" ? adversary::Side::NE : adversary::Side::SW;
    const double arc = p.contains("arc")
                           ? p.at("arc").get<double>()
                           : delta + (adversary::kSideLength - 2.0 * delta) * unit(rng);
    adversary::DiamondMap m(delta, side, arc);
    inst.oracle = std::make_unique<ContractionOracle>(adversary::extend_to_square(m));
    inst.diamond = m;
    inst.nonexpansive_only = true;
  } else {
    throw UsageError("unknown instance family '" + spec.family + "'");
  }
  return inst;
}

}  // namespace cubefix
