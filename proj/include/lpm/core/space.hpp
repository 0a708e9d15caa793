#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lpm/error.hpp"

namespace lpm {

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// A point of a base space: a coordinate vector for normed spaces, an index
/// into the distance matrix for finite metric spaces.
class Point {
 public:
  Point() = default;

  static Point coords(std::vector<double> values) {
    Point p;
    p.value_ = std::move(values);
    return p;
  }
  static Point index(std::size_t i) {
    Point p;
    p.value_ = i;
    return p;
  }

  [[nodiscard]] bool is_index() const noexcept {
    return std::holds_alternative<std::size_t>(value_);
  }
  [[nodiscard]] std::span<const double> coordinates() const {
    return std::get<std::vector<double>>(value_);
  }
  [[nodiscard]] std::size_t index() const { return std::get<std::size_t>(value_); }
  [[nodiscard]] std::size_t dim() const {
    return is_index() ? 0 : std::get<std::vector<double>>(value_).size();
  }

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;

 private:
  std::variant<std::vector<double>, std::size_t> value_ = std::vector<double>{};
};

/// R^dim equipped with the l_p norm, p in [1, inf].
struct NormedSpace {
  std::size_t dim = 1;
  double p = 2.0;

  [[nodiscard]] bool is_euclidean() const noexcept { return p == 2.0; }
  [[nodiscard]] bool is_max_norm() const noexcept { return std::isinf(p); }

  friend bool operator==(const NormedSpace&, const NormedSpace&) = default;
};

/// A finite metric space given by its full distance matrix.
struct FiniteMetricSpace {
  std::vector<std::vector<double>> dist;

  [[nodiscard]] std::size_t size() const noexcept { return dist.size(); }

  friend bool operator==(const FiniteMetricSpace&, const FiniteMetricSpace&) = default;
};

inline constexpr double kTriangleTolerance = 1e-12;

/// Base metric space. Immutable; construct through the validating factories.
class Space {
 public:
  static Space normed(std::size_t dim, double p) {
    if (dim == 0) fail(ErrorCode::InvalidNorm, "dimension must be at least 1");
    if (!(p >= 1.0)) fail(ErrorCode::InvalidNorm, "p must be >= 1 or inf");
    return Space(NormedSpace{dim, p});
  }

  static Space finite(std::vector<std::vector<double>> dist) {
    const std::size_t n = dist.size();
    if (n == 0) fail(ErrorCode::NonSquareMatrix, "empty distance matrix");
    for (const auto& row : dist) {
      if (row.size() != n) fail(ErrorCode::NonSquareMatrix, "row length differs from row count");
      for (double v : row) {
        if (!std::isfinite(v)) fail(ErrorCode::MalformedInput, "non-finite distance");
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (dist[i][i] != 0.0) {
        fail(ErrorCode::NonzeroDiagonal, "d(" + std::to_string(i) + "," + std::to_string(i) + ") != 0");
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        if (dist[i][j] != dist[j][i]) {
          fail(ErrorCode::AsymmetricMatrix,
               "d(" + std::to_string(i) + "," + std::to_string(j) + ") != d(" + std::to_string(j) + "," +
                   std::to_string(i) + ")");
        }
        if (!(dist[i][j] > 0.0)) {
          fail(ErrorCode::NonPositiveOffDiagonal, "d(" + std::to_string(i) + "," + std::to_string(j) + ") <= 0");
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
          if (dist[i][j] > dist[i][k] + dist[k][j] + kTriangleTolerance) {
            fail(ErrorCode::TriangleViolation, "d(" + std::to_string(i) + "," + std::to_string(j) + ") > d(" +
                                                   std::to_string(i) + "," + std::to_string(k) + ") + d(" +
                                                   std::to_string(k) + "," + std::to_string(j) + ")");
          }
        }
      }
    }
    return Space(FiniteMetricSpace{std::move(dist)});
  }

  [[nodiscard]] bool is_normed() const noexcept { return std::holds_alternative<NormedSpace>(kind_); }
  [[nodiscard]] bool is_finite() const noexcept { return !is_normed(); }
  [[nodiscard]] const NormedSpace& as_normed() const { return std::get<NormedSpace>(kind_); }
  [[nodiscard]] const FiniteMetricSpace& as_finite() const { return std::get<FiniteMetricSpace>(kind_); }

  /// Throws unless `p` is a point of this space.
  void check_point(const Point& p) const {
    if (is_normed()) {
      if (p.is_index()) fail(ErrorCode::DimensionMismatch, "index point in a normed space");
      if (p.dim() != as_normed().dim) {
        fail(ErrorCode::DimensionMismatch,
             "point has " + std::to_string(p.dim()) + " coordinates, space has dim " + std::to_string(as_normed().dim));
      }
      for (double v : p.coordinates()) {
        if (!std::isfinite(v)) fail(ErrorCode::MalformedInput, "non-finite coordinate");
      }
    } else {
      if (!p.is_index()) fail(ErrorCode::DimensionMismatch, "coordinate point in a finite metric space");
      if (p.index() >= as_finite().size()) {
        fail(ErrorCode::IndexOutOfRange,
             "index " + std::to_string(p.index()) + " >= " + std::to_string(as_finite().size()));
      }
    }
  }

  friend bool operator==(const Space&, const Space&) = default;

 private:
  explicit Space(NormedSpace s) : kind_(s) {}
  explicit Space(FiniteMetricSpace s) : kind_(std::move(s)) {}

  std::variant<NormedSpace, FiniteMetricSpace> kind_;
};

/// l_p norm of a coordinate vector.
inline double lp_norm(std::span<const double> v, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  if (p == 1.0) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
  }
  if (p == 2.0) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  }
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x), p);
  return std::pow(s, 1.0 / p);
}

/// Unchecked distance; both points must already belong to `space`.
inline double raw_distance(const Space& space, const Point& a, const Point& b) {
  if (space.is_finite()) return space.as_finite().dist[a.index()][b.index()];
  const auto x = a.coordinates();
  const auto y = b.coordinates();
  const double p = space.as_normed().p;
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
  }
  if (p == 1.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
    return s;
  }
  if (p == 2.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i] - y[i]), p);
  return std::pow(s, 1.0 / p);
}

inline double distance(const Space& space, const Point& a, const Point& b) {
  space.check_point(a);
  space.check_point(b);
  return raw_distance(space, a, b);
}

}  // namespace lpm
