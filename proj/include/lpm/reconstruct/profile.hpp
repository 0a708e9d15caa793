#pragma once

// Witness profiles along an exposing ray.
//
// Let x_hat carry mass lambda of theta and let the ray from x_hat be exposing.
// Every other atom is then farther from x = x_hat + t*u than x_hat is, so no
// mass lies strictly within distance t of x and W_s(t) >= t, with equality
// exactly when t >= s*(1 - lambda). Below that breakpoint the profile sits on
// the plateau W_s = s*(1 - lambda) (at least near the breakpoint); above it,
// W_s(t) = min(s, t).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "lpm/error.hpp"
#include "lpm/reconstruct/hull.hpp"
#include "lpm/reconstruct/oracle.hpp"

namespace lpm {

inline constexpr double kBisectionTolT = 1e-8;
inline constexpr double kZeroTolG = 1e-10;

struct ProfileGrid {
  double step = 1.0 / 64.0;
  double extent = 0.0;  // 0 selects 1.25 * s
};

struct WitnessProfile {
  ExposingRay ray;
  double s = 1.0;
  std::vector<std::pair<double, double>> samples;  // (t, W)
  double plateau_value = 0.0;
  double breakpoint = 0.0;    // t* = s * (1 - lambda_hat)
  double lambda_hat = 1.0;    // mass fraction of the vertex
  double plateau_length = 0.0;  // sampled extent of the plateau below t*
};

namespace detail {

struct Bracket {
  double lo;  // g(lo) > 0
  double hi;  // g(hi) == 0
  bool dirac;
};

/// Bisection for the smallest t in (0, s] with W(t) = t.
inline Bracket bracket_breakpoint(const WitnessFn& w, const ExposingRay& ray, double s) {
  auto g = [&](double t) { return w(ray.at(t)) - t; };
  const double g0 = g(0.0);
  if (g0 < -kZeroTolG) fail(ErrorCode::ProfileShapeMismatch, "W(x_hat) < 0");
  if (g0 <= kZeroTolG) return {0.0, 0.0, true};
  const double gs = g(s);
  if (std::abs(gs) > kZeroTolG) {
    fail(ErrorCode::ProfileShapeMismatch, "W(s) = " + std::to_string(gs + s) + " differs from s = " + std::to_string(s));
  }
  double lo = 0.0;
  double hi = s;
  while (hi - lo > kBisectionTolT) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm < -kZeroTolG) {
      fail(ErrorCode::ProfileShapeMismatch, "W(t) < t at t = " + std::to_string(mid) + ": ray is not exposing");
    }
    if (gm <= kZeroTolG) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {lo, hi, false};
}

inline void check_profile_args(const ExposingRay& ray, double s) {
  if (ray.origin.is_index()) fail(ErrorCode::NoConvexStructure, "witness profiles need a normed space");
  if (!(s > 0.0) || !std::isfinite(s)) fail(ErrorCode::InvalidArgument, "scale s must be positive");
}

}  // namespace detail

namespace detail {

/// The plateau value W(lo), which equals t* exactly when lo lies on the
/// plateau. Bisection only pins t* to 1e-8; reading the plateau keeps
/// recovered weights accurate to rounding, so later peeling stages see a
/// consistent residual mass.
inline double plateau_value(const WitnessFn& w, const ExposingRay& ray, const Bracket& b) {
  const double value = w(ray.at(b.lo));
  if (std::abs(value - 0.5 * (b.lo + b.hi)) > 2.0 * kBisectionTolT) {
    fail(ErrorCode::ProfileShapeMismatch, "plateau value " + std::to_string(value) + " disagrees with breakpoint " +
                                              std::to_string(b.hi));
  }
  return value;
}

}  // namespace detail

/// Mass fraction of the ray origin: lambda_hat = 1 - t*/s, where t* is the
/// breakpoint of g(t) = W_s(t) - t (bisection to 1e-8 in t, 1e-10 in g),
/// read off the plateau just below it.
inline double plateau_weight(const WitnessFn& w, const ExposingRay& ray, double s) {
  detail::check_profile_args(ray, s);
  const auto b = detail::bracket_breakpoint(w, ray, s);
  if (b.dirac) return 1.0;
  return 1.0 - detail::plateau_value(w, ray, b) / s;
}

inline double plateau_weight(DistanceOracle& oracle, const ExposingRay& ray) {
  return plateau_weight(oracle_witness(oracle), ray, 1.0);
}

/// Samples W_s along the ray and fits the three-piece shape
///   W = s on t >= s,  W = t on t* < t < s,  W = t* on the plateau below t*.
inline WitnessProfile witness_profile(const WitnessFn& w, const ExposingRay& ray, double s, ProfileGrid grid = {}) {
  detail::check_profile_args(ray, s);
  if (!(grid.step > 0.0)) fail(ErrorCode::InvalidArgument, "grid step must be positive");
  const double extent = grid.extent > 0.0 ? grid.extent : 1.25 * s;

  WitnessProfile prof;
  prof.ray = ray;
  prof.s = s;
  const auto count = static_cast<std::size_t>(std::floor(extent / grid.step + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) {
    const double t = static_cast<double>(i) * grid.step;
    prof.samples.emplace_back(t, w(ray.at(t)));
  }

  const auto b = detail::bracket_breakpoint(w, ray, s);
  if (b.dirac) {
    prof.plateau_value = 0.0;
    prof.breakpoint = 0.0;
    prof.lambda_hat = 1.0;
  } else {
    prof.plateau_value = detail::plateau_value(w, ray, b);
    prof.breakpoint = prof.plateau_value;
    prof.lambda_hat = 1.0 - prof.plateau_value / s;
  }

  const double tol = std::max(grid.step, 1e-8);
  const double tstar = prof.breakpoint;
  double plateau_start = tstar;
  bool on_plateau = true;
  for (auto it = prof.samples.rbegin(); it != prof.samples.rend(); ++it) {
    const auto [t, value] = *it;
    if (t >= tstar) {
      const double expected = std::min(s, t);
      if (std::abs(value - expected) > tol) {
        fail(ErrorCode::ProfileShapeMismatch, "W(" + std::to_string(t) + ") = " + std::to_string(value) +
                                                  ", expected " + std::to_string(expected));
      }
      continue;
    }
    if (value < t - tol || value > prof.plateau_value + tol) {
      fail(ErrorCode::ProfileShapeMismatch, "W(" + std::to_string(t) + ") = " + std::to_string(value) +
                                                " outside [t, plateau] below the breakpoint");
    }
    if (on_plateau && std::abs(value - prof.plateau_value) <= tol) {
      plateau_start = t;
    } else {
      on_plateau = false;
    }
  }
  prof.plateau_length = tstar - plateau_start;
  return prof;
}

inline WitnessProfile witness_profile(DistanceOracle& oracle, const ExposingRay& ray, ProfileGrid grid = {}) {
  return witness_profile(oracle_witness(oracle), ray, 1.0, grid);
}

}  // namespace lpm
