#pragma once

// Reference computations that share no code with the library's distance
// routines: the LP distance straight from its defining predicate.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "lpm/core/measure.hpp"

namespace oracle {

/// True iff s*mu(A) <= s*nu(closed eps-neighbourhood of A) + eps for every A.
inline bool feasible(const lpm::DiscreteMeasure& mu, const lpm::DiscreteMeasure& nu, double s, double eps) {
  const auto& space = mu.space();
  const std::size_t n = mu.size();
  for (unsigned long mask = 1; mask < (1UL << n); ++mask) {
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1UL) mass += mu[i].weight;
    }
    double near = 0.0;
    for (const auto& b : nu.atoms()) {
      bool hit = false;
      for (std::size_t i = 0; i < n && !hit; ++i) {
        hit = (mask >> i & 1UL) && lpm::raw_distance(space, mu[i].point, b.point) <= eps;
      }
      if (hit) near += b.weight;
    }
    if (s * mass > s * near + eps + 1e-12) return false;
  }
  return true;
}

/// Smallest eps in [0, s] passing the predicate. The minimiser is either a
/// pairwise distance or a mass gap s*(mu(A) - nu(N_r(A))), so those are the
/// only candidates.
inline double lp_distance(const lpm::DiscreteMeasure& mu, const lpm::DiscreteMeasure& nu, double s = 1.0) {
  const auto& space = mu.space();
  std::vector<double> radii{0.0};
  for (const auto& a : mu.atoms()) {
    for (const auto& b : nu.atoms()) radii.push_back(lpm::raw_distance(space, a.point, b.point));
  }
  std::vector<double> candidates{s};
  for (double r : radii) candidates.push_back(r);
  const std::size_t n = mu.size();
  for (unsigned long mask = 1; mask < (1UL << n); ++mask) {
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1UL) mass += mu[i].weight;
    }
    for (double r : radii) {
      double near = 0.0;
      for (const auto& b : nu.atoms()) {
        bool hit = false;
        for (std::size_t i = 0; i < n && !hit; ++i) {
          hit = (mask >> i & 1UL) && lpm::raw_distance(space, mu[i].point, b.point) <= r;
        }
        if (hit) near += b.weight;
      }
      candidates.push_back(s * (mass - near));
    }
  }
  std::sort(candidates.begin(), candidates.end());
  for (double c : candidates) {
    if (c < 0.0 || c > s) continue;
    if (feasible(mu, nu, s, c)) return c;
  }
  return s;
}

inline double witness(const lpm::DiscreteMeasure& mu, const lpm::Point& x, double s = 1.0) {
  return lp_distance(lpm::dirac(mu.space(), x), mu, s);
}

}  // namespace oracle
