#pragma once

// Seeded generators for random spaces and measures (self-test, sampling).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "lpm/core/measure.hpp"
#include "lpm/core/space.hpp"
#include "lpm/error.hpp"

namespace lpm {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// R^d with d in [1, max_dim] and p in {1, 2, inf}.
inline Space random_normed_space(Rng& rng, std::size_t max_dim = 4) {
  static constexpr double kNorms[] = {1.0, 2.0, kInfNorm};
  return Space::normed(uniform_index(rng, 1, max_dim), kNorms[uniform_index(rng, 0, 2)]);
}

/// A valid metric on n points: either l2 distances of random planar points or
/// entries drawn from [a, 2a], which always satisfy the triangle inequality.
inline Space random_finite_space(Rng& rng, std::size_t n) {
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  if (std::bernoulli_distribution(0.5)(rng)) {
    std::vector<std::pair<double, double>> pts(n);
    for (auto& [x, y] : pts) {
      x = uniform(rng, 0.0, 1.5);
      y = uniform(rng, 0.0, 1.5);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const double v = std::max(1e-3, std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second));
        d[i][j] = d[j][i] = v;
      }
    }
    // Clamping tiny distances may break the triangle inequality; fall back.
    try {
      return Space::finite(d);
    } catch (const Error&) {
    }
  }
  const double a = uniform(rng, 0.1, 0.8);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) d[i][j] = d[j][i] = uniform(rng, a, 2.0 * a);
  }
  return Space::finite(d);
}

inline Point random_point(const Space& space, Rng& rng, double scale = 1.0) {
  if (space.is_finite()) return Point::index(uniform_index(rng, 0, space.as_finite().size() - 1));
  std::vector<double> x(space.as_normed().dim);
  for (auto& v : x) v = uniform(rng, -scale, scale);
  return Point::coords(std::move(x));
}

/// Random positive weights summing to 1; the last one absorbs rounding.
inline std::vector<double> random_weights(Rng& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& v : w) total += (v = e(rng) + 0.05);
  double partial = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) partial += (w[i] /= total);
  w[n - 1] = 1.0 - partial;
  return w;
}

/// Measure with between 1 and `max_atoms` distinct atoms.
inline DiscreteMeasure random_measure(const Space& space, Rng& rng, std::size_t max_atoms, double scale = 1.0) {
  if (space.is_finite()) max_atoms = std::min(max_atoms, space.as_finite().size());
  const std::size_t n = uniform_index(rng, 1, max_atoms);
  std::vector<Point> pts;
  while (pts.size() < n) {
    Point p = random_point(space, rng, scale);
    if (std::none_of(pts.begin(), pts.end(), [&](const Point& q) { return raw_distance(space, p, q) == 0.0; })) {
      pts.push_back(std::move(p));
    }
  }
  const auto w = random_weights(rng, n);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < n; ++i) atoms.push_back(Atom{pts[i], w[i]});
  return make_measure(space, std::move(atoms));
}

/// Empirical measure of n i.i.d. draws from `target`, duplicates merged.
inline DiscreteMeasure sample_empirical(const DiscreteMeasure& target, std::size_t n, Rng& rng) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "sample size must be positive");
  const auto w = target.weights();
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  std::vector<std::size_t> counts(target.size(), 0);
  for (std::size_t i = 0; i < n; ++i) ++counts[pick(rng)];
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (counts[i] == 0) continue;
    atoms.push_back(Atom{target[i].point, static_cast<double>(counts[i]) / static_cast<double>(n)});
  }
  return make_measure(target.space(), std::move(atoms), DuplicatePolicy::Merge);
}

}  // namespace lpm
