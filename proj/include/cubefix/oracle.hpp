#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cubefix/errors.hpp"
#include "cubefix/geometry.hpp"

namespace cubefix {

struct QueryRecord {
  RealPoint query;
  RealPoint answer;
};

/// Ordered (query, answer) pairs exchanged with one oracle.
using QueryTranscript = std::vector<QueryRecord>;

inline nlohmann::json transcript_to_json(const QueryTranscript& tr) {
  auto out = nlohmann::json::array();
  for (const auto& e : tr) out.push_back({{"query", e.query}, {"answer", e.answer}});
  return out;
}

inline QueryTranscript transcript_from_json(const nlohmann::json& j) {
  detail::require(j.is_array(), "transcript must be a JSON array");
  QueryTranscript tr;
  for (const auto& e : j) {
    QueryRecord r{e.at("query").get<RealPoint>(), e.at("answer").get<RealPoint>()};
    detail::require(r.query.size() == r.answer.size(), "transcript entry dimension mismatch");
    tr.push_back(std::move(r));
  }
  return tr;
}

/// Black-box map on the cube [0, side]^k with query accounting.
///
/// Every call through operator() is counted and appended to the transcript,
/// and both the query and the answer are checked against the declared domain.
/// `factor` is the declared Lipschitz constant (1 - gamma); it is a promise,
/// not something the oracle enforces.
///
/// Oracles built by the reductions in instances.hpp hold a pointer to the
/// oracle they wrap; the wrapped oracle must outlive them.
class ContractionOracle {
 public:
  using Map = std::function<RealPoint(const RealPoint&)>;
  /// Fixed point of lambda * f for lambda in (0, 1], when known in closed form.
  using FixedPointHook = std::function<std::optional<RealPoint>(double lambda)>;

  /// Relative slack allowed when checking that points stay inside the cube.
  static constexpr double kDomainSlack = 1e-9;

  ContractionOracle(std::size_t k, double side, double factor, Map map, std::string name = {})
      : k_(k), side_(side), factor_(factor), map_(std::move(map)), name_(std::move(name)) {
    detail::require(k >= 1, "oracle dimension must be at least 1");
    detail::require(side > 0.0, "oracle domain side must be positive");
    detail::require(factor >= 0.0 && factor <= 1.0, "declared factor must lie in [0, 1]");
  }

  RealPoint operator()(const RealPoint& x) {
    check_in_domain(x, "query");
    RealPoint y = map_(x);
    check_in_domain(y, "answer");
    transcript_.push_back({x, y});
    return y;
  }

  /// Evaluates without counting or recording; for measurements in tests.
  RealPoint peek(const RealPoint& x) const { return map_(x); }

  std::size_t dimension() const { return k_; }
  double side() const { return side_; }
  double factor() const { return factor_; }
  const std::string& name() const { return name_; }
  std::size_t queries() const { return transcript_.size(); }
  const QueryTranscript& transcript() const { return transcript_; }
  void reset() { transcript_.clear(); }

  void set_fixed_point_hook(FixedPointHook hook) { hook_ = std::move(hook); }
  const FixedPointHook& fixed_point_hook() const { return hook_; }
  std::optional<RealPoint> known_fixed_point(double lambda = 1.0) const {
    if (!hook_) return std::nullopt;
    return hook_(lambda);
  }

  bool contains(const RealPoint& x) const {
    if (x.size() != k_) return false;
    const double slack = kDomainSlack * side_;
    for (double v : x)
      if (!std::isfinite(v) || v < -slack || v > side_ + slack) return false;
    return true;
  }

 private:
  void check_in_domain(const RealPoint& x, const char* what) const {
    if (x.size() != k_)
      throw UsageError(std::string(what) + " has dimension " + std::to_string(x.size()) +
                       ", oracle expects " + std::to_string(k_));
    if (!contains(x))
      throw DomainError(std::string(what) + " of oracle '" + name_ + "' leaves [0, " +
                        std::to_string(side_) + "]^" + std::to_string(k_));
  }

  std::size_t k_;
  double side_;
  double factor_;
  Map map_;
  std::string name_;
  QueryTranscript transcript_;
  FixedPointHook hook_;
};

}  // namespace cubefix
