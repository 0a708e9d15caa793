#pragma once

// Atom peeling: recovering a hidden finitely supported measure theta from the
// distance oracle nu -> pi(nu, theta), given its support.
//
// Atoms are removed one hull vertex at a time. Once atoms y with weights w have
// been detected, the s-witness (s = 1 - sum w) of the undetected remainder at a
// probe x is recovered from oracle values pi(eta_r, theta), where eta_r keeps
// the detected atoms of the r outermost distance rings around x and parks the
// remaining mass at x. The plateau of that residual witness along an exposing
// ray from the next vertex gives the vertex's weight.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lpm/core/measure.hpp"
#include "lpm/error.hpp"
#include "lpm/reconstruct/hull.hpp"
#include "lpm/reconstruct/oracle.hpp"
#include "lpm/reconstruct/profile.hpp"

namespace lpm {

inline constexpr double kRingTolerance = 1e-12;
inline constexpr double kPrTolerance = 1e-12;
inline constexpr double kReconstructionTolerance = 1e-6;

/// Detected atoms at a common distance `radius` from the probe.
struct Ring {
  double radius = 0.0;
  std::vector<Atom> atoms;

  [[nodiscard]] double weight() const {
    return std::accumulate(atoms.begin(), atoms.end(), 0.0, [](double s, const Atom& a) { return s + a.weight; });
  }
};

/// Detected atoms grouped into rings around a probe point, outermost first.
class PeelState {
 public:
  /// Groups `detected` by distance from `probe` (ties within 1e-12 share a ring).
  static PeelState from_detected(const Space& space, const Point& probe, const std::vector<Atom>& detected) {
    space.check_point(probe);
    std::vector<std::pair<double, Atom>> by_dist;
    double total = 0.0;
    for (const auto& a : detected) {
      space.check_point(a.point);
      if (!(a.weight > 0.0)) fail(ErrorCode::NonPositiveWeight, "detected atom weight must be positive");
      const double d = raw_distance(space, probe, a.point);
      if (!(d > 0.0)) fail(ErrorCode::InvalidArgument, "probe coincides with a detected atom");
      by_dist.emplace_back(d, a);
      total += a.weight;
    }
    std::stable_sort(by_dist.begin(), by_dist.end(), [](const auto& l, const auto& r) { return l.first > r.first; });

    PeelState state(space, probe);
    for (auto& [d, atom] : by_dist) {
      if (!state.rings_.empty() && state.rings_.back().radius - d <= kRingTolerance) {
        state.rings_.back().atoms.push_back(std::move(atom));
      } else {
        state.rings_.push_back(Ring{d, {std::move(atom)}});
      }
    }
    if (total > 1.0 + kWeightSumTolerance) fail(ErrorCode::WeightSumMismatch, "detected mass exceeds 1");
    state.residual_weight_ = std::clamp(1.0 - total, 0.0, 1.0);
    return state;
  }

  [[nodiscard]] const Space& space() const noexcept { return space_; }
  [[nodiscard]] const Point& probe() const noexcept { return probe_; }
  [[nodiscard]] const std::vector<Ring>& rings() const noexcept { return rings_; }
  [[nodiscard]] std::size_t k() const noexcept { return rings_.size(); }
  [[nodiscard]] double residual_weight() const noexcept { return residual_weight_; }

 private:
  PeelState(Space space, Point probe) : space_(std::move(space)), probe_(std::move(probe)) {}

  Space space_;
  Point probe_;
  std::vector<Ring> rings_;
  double residual_weight_ = 1.0;
};

/// eta_r: the atoms of the r outermost rings, plus the remaining mass at the probe.
inline DiscreteMeasure build_eta(const PeelState& state, std::size_t r) {
  if (r > state.k()) fail(ErrorCode::InvalidArgument, "r exceeds the number of rings");
  std::vector<Atom> atoms;
  double kept = 0.0;
  for (std::size_t j = 0; j < r; ++j) {
    for (const auto& a : state.rings()[j].atoms) {
      atoms.push_back(a);
      kept += a.weight;
    }
  }
  const double rest = 1.0 - kept;
  if (rest > kWeightSumTolerance) {
    atoms.push_back(Atom{state.probe(), rest});
  } else if (r < state.k() || rest < -kWeightSumTolerance) {
    fail(ErrorCode::DegenerateEta, "no mass left for the probe at r = " + std::to_string(r));
  } else {
    fail(ErrorCode::DegenerateEta, "eta_k has zero mass at the probe, which is not a listed atom");
  }
  return make_measure(state.space(), std::move(atoms));
}

/// (P_r): pi(eta_{r-1}, theta) <= rho_r.
inline bool is_Pr(DistanceOracle& oracle, const PeelState& state, std::size_t r) {
  if (r < 1 || r > state.k()) fail(ErrorCode::InvalidArgument, "(P_r) needs 1 <= r <= k");
  return oracle(build_eta(state, r - 1)) <= state.rings()[r - 1].radius + kPrTolerance;
}

struct ResidualWitness {
  double value = 0.0;
  /// 0 when (P_1) fails; r when (P_r) holds and (P_{r+1}) fails; k when (P_k) holds.
  std::size_t branch = 0;
  bool empty_residual = false;
};

/// s-witness of the undetected remainder at the probe, s = residual weight,
/// computed from oracle values only.
inline ResidualWitness residual_witness(DistanceOracle& oracle, const PeelState& state) {
  ResidualWitness out;
  if (state.residual_weight() <= kWeightSumTolerance) {
    out.empty_residual = true;
    return out;
  }
  const std::size_t k = state.k();
  out.value = oracle(build_eta(state, 0));
  if (k == 0 || out.value > state.rings()[0].radius + kPrTolerance) return out;
  for (std::size_t r = 1; r < k; ++r) {
    out.value = oracle(build_eta(state, r));
    out.branch = r;
    if (out.value > state.rings()[r].radius + kPrTolerance) return out;
  }
  out.value = oracle(build_eta(state, k));
  out.branch = k;
  return out;
}

/// The residual witness as a pointwise function (rings recomputed per probe).
inline WitnessFn residual_witness_fn(DistanceOracle& oracle, std::vector<Atom> detected) {
  return [&oracle, detected = std::move(detected)](const Point& x) {
    return residual_witness(oracle, PeelState::from_detected(oracle.space(), x, detected)).value;
  };
}

struct ReconstructionResult {
  DiscreteMeasure measure;
  std::size_t oracle_calls = 0;
  std::size_t peel_stages = 0;
  std::vector<std::size_t> peel_order;  // indices into the given support
  double closing_deviation = 0.0;       // |independent estimate - closed form| for the last atom
};

namespace detail {

/// Next vertex to peel among `remaining` (indices into `support`), with its ray.
inline std::pair<std::size_t, ExposingRay> next_vertex(const Space& space, const std::vector<Point>& support,
                                                       const std::vector<std::size_t>& remaining) {
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.as_normed().dim));
  for (auto i : remaining) centroid += to_eigen(support[i]);
  centroid /= static_cast<double>(remaining.size());
  const Point c = from_eigen(centroid);

  std::vector<std::size_t> order = remaining;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return raw_distance(space, support[a], c) > raw_distance(space, support[b], c);
  });
  for (auto cand : order) {
    std::vector<Point> others;
    for (auto i : remaining) {
      if (i != cand) others.push_back(support[i]);
    }
    if (in_convex_hull(support[cand], others)) continue;
    try {
      return {cand, exposing_direction(space, support[cand], others)};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RayVerificationFailed) throw;
    }
  }
  fail(ErrorCode::ReconstructionFailure, "no remaining support point admits a verified exposing ray");
}

}  // namespace detail

/// Recovers the weights of the hidden measure on the known `support`.
inline ReconstructionResult peel_reconstruct(DistanceOracle& oracle, const std::vector<Point>& support,
                                             std::size_t support_cap = 12) {
  const Space& space = oracle.space();
  detail::require_normed(space, "peel_reconstruct");
  if (support.empty()) fail(ErrorCode::InvalidArgument, "empty support");
  if (support.size() > support_cap) fail(ErrorCode::SupportCapExceeded, "support larger than cap");
  for (std::size_t i = 0; i < support.size(); ++i) {
    space.check_point(support[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (raw_distance(space, support[i], support[j]) == 0.0) fail(ErrorCode::DuplicatePoint, "support repeats a point");
    }
  }
  const std::size_t calls_before = oracle.calls();

  if (support.size() == 1) {
    return ReconstructionResult{dirac(space, support[0]), 0, 0, {0}, 0.0};
  }

  std::vector<std::size_t> remaining(support.size());
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<Atom> detected;
  std::vector<std::size_t> order;
  std::vector<double> weights(support.size(), 0.0);
  double detected_mass = 0.0;

  auto extract = [&](std::size_t idx, const ExposingRay& ray) {
    const double s = 1.0 - detected_mass;
    const double lambda = s * plateau_weight(residual_witness_fn(oracle, detected), ray, s);
    if (!(lambda > 0.0)) {
      fail(ErrorCode::ReconstructionFailure, "support point " + std::to_string(idx) + " carries no mass");
    }
    return lambda;
  };

  std::size_t stages = 0;
  while (remaining.size() > 2) {
    auto [idx, ray] = detail::next_vertex(space, support, remaining);
    const double lambda = extract(idx, ray);
    weights[idx] = lambda;
    detected.push_back(Atom{support[idx], lambda});
    detected_mass += lambda;
    order.push_back(idx);
    remaining.erase(std::find(remaining.begin(), remaining.end(), idx));
    ++stages;
  }

  // Two points left: the first weight comes from its plateau, the second is the
  // rest of the mass, cross-checked against its own plateau.
  const std::size_t a = remaining[0];
  const std::size_t b = remaining[1];
  const double s = 1.0 - detected_mass;
  const double lambda_a = extract(a, exposing_direction(space, support[a], {support[b]}));
  const double lambda_b = s - lambda_a;
  const double lambda_b_check = extract(b, exposing_direction(space, support[b], {support[a]}));
  const double deviation = std::abs(lambda_b - lambda_b_check);
  if (!(lambda_b > 0.0) || deviation > kReconstructionTolerance) {
    fail(ErrorCode::ReconstructionFailure, "closing weights disagree: " + std::to_string(lambda_b) + " vs " +
                                               std::to_string(lambda_b_check));
  }
  weights[a] = lambda_a;
  weights[b] = lambda_b;
  order.push_back(a);
  order.push_back(b);

  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < support.size(); ++i) atoms.push_back(Atom{support[i], weights[i]});
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > kReconstructionTolerance) {
    fail(ErrorCode::ReconstructionFailure, "recovered weights sum to " + std::to_string(total));
  }
  return ReconstructionResult{make_measure(space, std::move(atoms)), oracle.calls() - calls_before, stages, order,
                              deviation};
}

/// Candidate support from a grid scan of the witness (no accuracy guarantee):
/// grid points that are local minima of W with W < 1, one representative per
/// connected cluster.
inline std::vector<Point> experimental_support_search(DistanceOracle& oracle, double lo, double hi, double step) {
  const Space& space = oracle.space();
  detail::require_normed(space, "support search");
  if (!(step > 0.0) || !(hi > lo)) fail(ErrorCode::InvalidArgument, "bad search grid");
  const std::size_t dim = space.as_normed().dim;
  const auto per_axis = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::size_t total = 1;
  for (std::size_t k = 0; k < dim; ++k) {
    total *= per_axis;
    if (total > 2'000'000) fail(ErrorCode::InvalidArgument, "search grid too large");
  }

  auto coords_of = [&](std::size_t flat) {
    std::vector<std::size_t> idx(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      idx[k] = flat % per_axis;
      flat /= per_axis;
    }
    return idx;
  };
  auto point_of = [&](const std::vector<std::size_t>& idx) {
    std::vector<double> x(dim);
    for (std::size_t k = 0; k < dim; ++k) x[k] = lo + step * static_cast<double>(idx[k]);
    return Point::coords(std::move(x));
  };
  auto flat_of = [&](const std::vector<std::size_t>& idx) {
    std::size_t f = 0;
    for (std::size_t k = dim; k-- > 0;) f = f * per_axis + idx[k];
    return f;
  };
  auto neighbours = [&](std::size_t flat) {
    std::vector<std::size_t> out;
    auto idx = coords_of(flat);
    for (std::size_t k = 0; k < dim; ++k) {
      for (int delta : {-1, 1}) {
        if ((delta < 0 && idx[k] == 0) || (delta > 0 && idx[k] + 1 == per_axis)) continue;
        auto n = idx;
        n[k] = static_cast<std::size_t>(static_cast<long long>(n[k]) + delta);
        out.push_back(flat_of(n));
      }
    }
    return out;
  };

  std::vector<double> w(total);
  for (std::size_t f = 0; f < total; ++f) w[f] = oracle(dirac(space, point_of(coords_of(f))));

  std::vector<bool> is_min(total, false);
  for (std::size_t f = 0; f < total; ++f) {
    if (w[f] >= 1.0) continue;
    bool ok = true;
    for (auto n : neighbours(f)) ok = ok && w[f] <= w[n];
    is_min[f] = ok;
  }

  std::vector<Point> found;
  std::vector<bool> seen(total, false);
  for (std::size_t f = 0; f < total; ++f) {
    if (!is_min[f] || seen[f]) continue;
    std::vector<std::size_t> cluster{f};
    seen[f] = true;
    for (std::size_t q = 0; q < cluster.size(); ++q) {
      for (auto n : neighbours(cluster[q])) {
        if (is_min[n] && !seen[n]) {
          seen[n] = true;
          cluster.push_back(n);
        }
      }
    }
    std::vector<double> mean(dim, 0.0);
    for (auto c : cluster) {
      const auto p = point_of(coords_of(c));
      for (std::size_t k = 0; k < dim; ++k) mean[k] += p.coordinates()[k] / static_cast<double>(cluster.size());
    }
    found.push_back(Point::coords(std::move(mean)));
  }
  return found;
}

}  // namespace lpm
