#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "lpm/core/space.hpp"
#include "lpm/error.hpp"

namespace lpm {

inline constexpr double kWeightSumTolerance = 1e-9;

struct Atom {
  Point point;
  double weight = 0.0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

enum class DuplicatePolicy { Reject, Merge };

/// Finitely supported probability measure: positive weights summing to 1 on
/// pairwise distinct points. Immutable after construction.
class DiscreteMeasure {
 public:
  [[nodiscard]] const Space& space() const noexcept { return space_; }
  [[nodiscard]] const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  [[nodiscard]] std::size_t size() const noexcept { return atoms_.size(); }
  [[nodiscard]] const Atom& operator[](std::size_t i) const { return atoms_[i]; }
  [[nodiscard]] bool is_dirac() const noexcept { return atoms_.size() == 1; }

  [[nodiscard]] std::vector<Point> support() const {
    std::vector<Point> pts;
    pts.reserve(atoms_.size());
    for (const auto& a : atoms_) pts.push_back(a.point);
    return pts;
  }
  [[nodiscard]] std::vector<double> weights() const {
    std::vector<double> w;
    w.reserve(atoms_.size());
    for (const auto& a : atoms_) w.push_back(a.weight);
    return w;
  }

  /// Same space, same atoms with identical weights, in any order.
  [[nodiscard]] bool same_as(const DiscreteMeasure& other) const {
    if (!(space_ == other.space_) || atoms_.size() != other.atoms_.size()) return false;
    auto lhs = atoms_;
    auto rhs = other.atoms_;
    auto by_point = [](const Atom& a, const Atom& b) { return a.point < b.point; };
    std::sort(lhs.begin(), lhs.end(), by_point);
    std::sort(rhs.begin(), rhs.end(), by_point);
    return lhs == rhs;
  }

  friend DiscreteMeasure make_measure(const Space&, std::vector<Atom>, DuplicatePolicy);

 private:
  DiscreteMeasure(Space space, std::vector<Atom> atoms) : space_(std::move(space)), atoms_(std::move(atoms)) {}

  Space space_;
  std::vector<Atom> atoms_;
};

inline DiscreteMeasure make_measure(const Space& space, std::vector<Atom> atoms,
                                    DuplicatePolicy duplicates = DuplicatePolicy::Reject) {
  if (atoms.empty()) fail(ErrorCode::MalformedInput, "measure has no atoms");
  for (const auto& a : atoms) {
    space.check_point(a.point);
    if (!std::isfinite(a.weight) || !(a.weight > 0.0)) {
      fail(ErrorCode::NonPositiveWeight, "weight " + std::to_string(a.weight));
    }
  }

  std::vector<Atom> merged;
  merged.reserve(atoms.size());
  for (auto& a : atoms) {
    auto same = std::find_if(merged.begin(), merged.end(),
                             [&](const Atom& m) { return raw_distance(space, m.point, a.point) == 0.0; });
    if (same == merged.end()) {
      merged.push_back(std::move(a));
    } else if (duplicates == DuplicatePolicy::Merge) {
      same->weight += a.weight;
    } else {
      fail(ErrorCode::DuplicatePoint, "two atoms at distance 0");
    }
  }

  const double total = std::accumulate(merged.begin(), merged.end(), 0.0,
                                       [](double s, const Atom& a) { return s + a.weight; });
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    fail(ErrorCode::WeightSumMismatch, "sum is " + std::to_string(total));
  }
  return DiscreteMeasure(space, std::move(merged));
}

inline DiscreteMeasure dirac(const Space& space, const Point& x) {
  return make_measure(space, {Atom{x, 1.0}});
}

inline void require_same_space(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (!(mu.space() == nu.space())) fail(ErrorCode::SpaceMismatch, "measures live on different spaces");
}

/// Smallest distance between an atom of `mu` and an atom of `nu`.
inline double support_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require_same_space(mu, nu);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : mu.atoms()) {
    for (const auto& b : nu.atoms()) best = std::min(best, raw_distance(mu.space(), a.point, b.point));
  }
  return best;
}

/// Pairwise distances, rows indexed by atoms of `mu`, columns by atoms of `nu`.
inline std::vector<std::vector<double>> cross_distances(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require_same_space(mu, nu);
  std::vector<std::vector<double>> d(mu.size(), std::vector<double>(nu.size()));
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) d[i][j] = raw_distance(mu.space(), mu[i].point, nu[j].point);
  }
  return d;
}

}  // namespace lpm
