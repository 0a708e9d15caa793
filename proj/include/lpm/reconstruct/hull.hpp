#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lpm/core/space.hpp"
#include "lpm/error.hpp"
#include "lpm/reconstruct/simplex.hpp"

namespace lpm {

inline constexpr double kHullTolerance = 1e-9;
inline constexpr int kRayCheckSamples = 32;
inline constexpr double kRayCheckExtent = 2.0;

namespace detail {

inline void require_normed(const Space& space, const char* what) {
  if (!space.is_normed()) fail(ErrorCode::NoConvexStructure, std::string(what) + " needs a normed space");
}

inline Eigen::VectorXd to_eigen(const Point& p) {
  const auto c = p.coordinates();
  return Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
}

inline Point from_eigen(const Eigen::VectorXd& v) { return Point::coords(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace detail

/// True if `p` is a convex combination of `others` (LP feasibility, tolerance 1e-9).
inline bool in_convex_hull(const Point& p, const std::vector<Point>& others) {
  if (others.empty()) return false;
  const auto d = static_cast<Eigen::Index>(p.dim());
  LinearProgram lp(others.size());
  for (Eigen::Index k = 0; k < d; ++k) {
    Eigen::VectorXd row(static_cast<Eigen::Index>(others.size()));
    for (std::size_t j = 0; j < others.size(); ++j) row(static_cast<Eigen::Index>(j)) = others[j].coordinates()[k];
    lp.add_row(row, RowSense::Equal, p.coordinates()[k]);
  }
  lp.add_row(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(others.size())), RowSense::Equal, 1.0);
  return lp.solve(kHullTolerance).status != LpStatus::Infeasible;
}

/// The points that are not convex combinations of the remaining ones.
inline std::vector<Point> hull_vertices(const Space& space, const std::vector<Point>& points) {
  detail::require_normed(space, "hull_vertices");
  if (points.empty()) fail(ErrorCode::InvalidArgument, "hull_vertices needs at least one point");
  for (const auto& p : points) space.check_point(p);
  std::vector<Point> vertices;
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<Point> others;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j != i) others.push_back(points[j]);
    }
    if (!in_convex_hull(points[i], others)) vertices.push_back(points[i]);
  }
  return vertices;
}

/// Half-line origin + t * direction (t >= 0) along which `origin` is the
/// strictly nearest point of the support hull.
struct ExposingRay {
  Point origin;
  std::vector<double> direction;          // unit vector in the space norm
  std::optional<std::vector<double>> functional;  // separating functional, when the LP was used

  [[nodiscard]] Point at(double t) const {
    const auto o = origin.coordinates();
    std::vector<double> x(o.size());
    for (std::size_t i = 0; i < o.size(); ++i) x[i] = o[i] + t * direction[i];
    return Point::coords(std::move(x));
  }
};

/// Checks ||x - origin|| < ||x - k|| for x = origin + t*u on a 32-point grid of
/// t in (0, 2] and every other support point k, plus ||u|| = 1.
inline bool verify_ray(const Space& space, const ExposingRay& ray, const std::vector<Point>& others) {
  const double p = space.as_normed().p;
  if (std::abs(lp_norm(ray.direction, p) - 1.0) > 1e-12) return false;
  for (int s = 1; s <= kRayCheckSamples; ++s) {
    const double t = kRayCheckExtent * s / kRayCheckSamples;
    const Point x = ray.at(t);
    const double to_origin = raw_distance(space, x, ray.origin);
    for (const auto& k : others) {
      if (!(to_origin < raw_distance(space, x, k))) return false;
    }
  }
  return true;
}

namespace detail {

/// Unit vector u (in the l_p norm) maximizing f(u): the dual-norm direction of f.
inline std::vector<double> dual_direction(const Eigen::VectorXd& f, double p) {
  const auto d = static_cast<std::size_t>(f.size());
  std::vector<double> u(d, 0.0);
  if (p == 1.0) {
    Eigen::Index arg = 0;
    f.cwiseAbs().maxCoeff(&arg);
    u[static_cast<std::size_t>(arg)] = f(arg) >= 0 ? 1.0 : -1.0;
    return u;
  }
  if (std::isinf(p)) {
    for (std::size_t i = 0; i < d; ++i) {
      const double fi = f(static_cast<Eigen::Index>(i));
      u[i] = fi > 0 ? 1.0 : (fi < 0 ? -1.0 : 0.0);
    }
    return u;
  }
  const double q = p / (p - 1.0);
  for (std::size_t i = 0; i < d; ++i) {
    const double fi = f(static_cast<Eigen::Index>(i));
    u[i] = std::copysign(std::pow(std::abs(fi), q - 1.0), fi);
  }
  const double norm = lp_norm(u, p);
  for (auto& v : u) v /= norm;
  return u;
}

/// Separating functional with f in [-1,1]^d maximizing min_j f(x_hat - x_j).
inline std::optional<Eigen::VectorXd> separating_functional(const Point& vertex, const std::vector<Point>& others) {
  const auto d = static_cast<Eigen::Index>(vertex.dim());
  // Variables: g = f + 1 in [0, 2]^d, margin = m_plus - m_minus.
  LinearProgram lp(static_cast<std::size_t>(d + 2));
  Eigen::VectorXd c = Eigen::VectorXd::Zero(d + 2);
  c(d) = 1.0;
  c(d + 1) = -1.0;
  lp.set_objective(c);
  const Eigen::VectorXd xhat = to_eigen(vertex);
  for (const auto& other : others) {
    const Eigen::VectorXd v = xhat - to_eigen(other);
    // margin - (g - 1).v <= 0
    Eigen::VectorXd row(d + 2);
    row.head(d) = -v;
    row(d) = 1.0;
    row(d + 1) = -1.0;
    lp.add_row(row, RowSense::LessEqual, -v.sum());
  }
  for (Eigen::Index k = 0; k < d; ++k) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(d + 2);
    row(k) = 1.0;
    lp.add_row(row, RowSense::LessEqual, 2.0);
  }
  const auto sol = lp.solve();
  if (sol.status != LpStatus::Optimal || !(sol.objective > kHullTolerance)) return std::nullopt;
  return Eigen::VectorXd(sol.x.head(d).array() - 1.0);
}

}  // namespace detail

/// Builds a verified exposing ray from `vertex` against `others`. Tries the
/// direction away from the centroid of `others` first, then the dual direction
/// of a max-margin separating functional.
inline ExposingRay exposing_direction(const Space& space, const Point& vertex, const std::vector<Point>& others) {
  detail::require_normed(space, "exposing_direction");
  space.check_point(vertex);
  for (const auto& k : others) space.check_point(k);
  const double p = space.as_normed().p;
  const auto d = vertex.dim();

  if (others.empty()) {
    std::vector<double> u(d, 0.0);
    u[0] = 1.0;
    return ExposingRay{vertex, u, std::nullopt};
  }
  if (in_convex_hull(vertex, others)) fail(ErrorCode::NotAVertex, "probe lies in the hull of the other points");

  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (const auto& k : others) centroid += detail::to_eigen(k);
  centroid /= static_cast<double>(others.size());
  const Eigen::VectorXd away = detail::to_eigen(vertex) - centroid;
  std::vector<double> u(away.data(), away.data() + away.size());
  const double norm = lp_norm(u, p);
  if (norm > 0.0) {
    for (auto& v : u) v /= norm;
    ExposingRay ray{vertex, u, std::nullopt};
    if (verify_ray(space, ray, others)) return ray;
  }

  if (const auto f = detail::separating_functional(vertex, others)) {
    ExposingRay ray{vertex, detail::dual_direction(*f, p), std::vector<double>(f->data(), f->data() + f->size())};
    if (verify_ray(space, ray, others)) return ray;
  }
  fail(ErrorCode::RayVerificationFailed, "no verified exposing ray from this vertex");
}

}  // namespace lpm
