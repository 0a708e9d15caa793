#pragma once

// Exact Levy-Prokhorov distance between finitely supported measures.
//
// For a subset A of the support of mu, the smallest admissible eps satisfies
//     s * mu(A) <= s * nu({y : d(y, A) <= eps}) + eps.
// With the distances r_k = d(y_k, A) sorted and c_k the cumulative nu-mass up
// to level k, that minimum is min_k max(r_k, s * (mu(A) - c_k)), including the
// empty level (r = 0, c = 0). The open-ball definition has the same infimum, so
// both neighborhood semantics share the scan; they differ only in whether the
// infimum is attained, which matters for the decision form `lp_feasible_at`.
//
// Two independent routes compute pi_s = max_A eps_A:
//   * brute force: enumerate every nonempty A (exponential, capped);
//   * flow: for a fixed eps the constraint over all A is a Hall-type condition,
//     max_A [mu(A) - nu(N_eps(A))] = 1 - maxflow on the bipartite network with
//     edges d <= eps. Sweeping eps over the pairwise distances gives
//     pi_s = min_k max(t_k, s * deficiency(t_k)), found by binary search since
//     t_k increases while the deficiency does not.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lpm/core/measure.hpp"
#include "lpm/core/space.hpp"
#include "lpm/error.hpp"
#include "lpm/lpmetric/max_flow.hpp"

namespace lpm {

enum class Method { Brute, Flow, Both };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Brute: return "brute";
    case Method::Flow: return "flow";
    case Method::Both: return "both";
  }
  return "?";
}

/// Closed balls for normed spaces, open balls for finite metric spaces.
enum class Neighborhood { Closed, Open };

inline Neighborhood neighborhood_of(const Space& space) {
  return space.is_normed() ? Neighborhood::Closed : Neighborhood::Open;
}

struct DistanceOptions {
  std::size_t support_cap = 12;     // brute-force limit on |supp mu|
  double cross_check_tol = 1e-9;    // |brute - flow| allowed under Method::Both
  double threshold_dedup = 1e-12;   // distances closer than this are one sweep level
  double feasibility_slack = 1e-12; // maxflow >= 1 - eps/s - slack counts as feasible
};

struct DistanceResult {
  double value = 0.0;
  Method method = Method::Flow;
  /// Indices into mu's atoms of a subset attaining the maximal constraint
  /// (brute force only; empty optional when mu == nu).
  std::optional<std::vector<std::size_t>> witness_subset;
};

namespace detail {

struct Level {
  double radius;
  double mass;
};

/// min over levels of max(r_k, s * (mass - c_k)), starting from the empty
/// level; `levels` must be sorted by radius.
inline double min_eps_for_mass(double mass, const std::vector<Level>& levels, double s) {
  double best = s * mass;
  double cumulative = 0.0;
  for (const auto& lvl : levels) {
    cumulative += lvl.mass;
    best = std::min(best, std::max(lvl.radius, s * (mass - cumulative)));
  }
  return std::min(best, s);
}

inline void sort_levels(std::vector<Level>& levels) {
  std::stable_sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) { return a.radius < b.radius; });
}

inline void check_scale(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) fail(ErrorCode::InvalidArgument, "scale s must be positive and finite");
}

}  // namespace detail

/// Bipartite network deciding the subset constraints at a fixed eps: source ->
/// atoms of mu (capacity = weight), mu_i -> nu_j (unbounded) when the atoms are
/// within eps, atoms of nu -> sink (capacity = weight). The constraints hold iff
/// s * (1 - maxflow) <= eps, i.e. the slack eps/s covers the Hall deficiency.
class FeasibilityNetwork {
 public:
  FeasibilityNetwork(const std::vector<double>& mu_weights, const std::vector<double>& nu_weights,
                     const std::vector<std::vector<double>>& dist, double eps, Neighborhood hood,
                     double edge_tol = 0.0)
      : eps_(eps),
        n_(static_cast<int>(mu_weights.size())),
        m_(static_cast<int>(nu_weights.size())),
        graph_(n_ + m_ + 2) {
    const int source = 0;
    const int sink = n_ + m_ + 1;
    for (int i = 0; i < n_; ++i) graph_.add_edge(source, 1 + i, mu_weights[i]);
    for (int j = 0; j < m_; ++j) graph_.add_edge(1 + n_ + j, sink, nu_weights[j]);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < m_; ++j) {
        const double d = dist[i][j];
        const bool edge = hood == Neighborhood::Closed ? d <= eps + edge_tol : d < eps;
        if (edge) graph_.add_edge(1 + i, 1 + n_ + j, std::numeric_limits<double>::infinity());
      }
    }
  }

  [[nodiscard]] double eps() const noexcept { return eps_; }

  double max_flow() {
    if (!flow_) flow_ = graph_.max_flow(0, n_ + m_ + 1);
    return *flow_;
  }

  /// max_A [mu(A) - nu(N(A))], never negative.
  double deficiency() { return std::max(0.0, 1.0 - max_flow()); }

  bool feasible(double s = 1.0, double slack = 1e-12) { return max_flow() >= 1.0 - eps_ / s - slack; }

 private:
  double eps_;
  int n_;
  int m_;
  FlowGraph<double> graph_;
  std::optional<double> flow_;
};

/// Decision form: do all subset constraints hold at eps?
inline bool lp_feasible_at(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double eps,
                           const DistanceOptions& opt = {}) {
  require_same_space(mu, nu);
  if (!(eps > 0.0)) fail(ErrorCode::InvalidArgument, "eps must be positive");
  FeasibilityNetwork net(mu.weights(), nu.weights(), cross_distances(mu, nu), eps, neighborhood_of(mu.space()));
  return net.feasible(1.0, opt.feasibility_slack);
}

inline DistanceResult s_lp_distance_bruteforce(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double s,
                                               const DistanceOptions& opt = {}) {
  require_same_space(mu, nu);
  detail::check_scale(s);
  const std::size_t n = mu.size();
  if (n > opt.support_cap) {
    fail(ErrorCode::SupportCapExceeded,
         "|supp mu| = " + std::to_string(n) + " exceeds cap " + std::to_string(opt.support_cap));
  }
  DistanceResult result{0.0, Method::Brute, std::nullopt};
  if (mu.same_as(nu)) return result;

  const auto dist = cross_distances(mu, nu);
  const std::size_t m = nu.size();
  std::vector<detail::Level> levels(m);
  double best = -1.0;
  std::uint64_t best_mask = 0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) mass += mu[i].weight;
    }
    for (std::size_t j = 0; j < m; ++j) {
      double r = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        if (mask >> i & 1U) r = std::min(r, dist[i][j]);
      }
      levels[j] = {r, nu[j].weight};
    }
    detail::sort_levels(levels);
    const double eps = detail::min_eps_for_mass(mass, levels, s);
    if (eps > best) {
      best = eps;
      best_mask = mask;
    }
  }
  std::vector<std::size_t> subset;
  for (std::size_t i = 0; i < n; ++i) {
    if (best_mask >> i & 1U) subset.push_back(i);
  }
  result.value = std::min(best, s);
  result.witness_subset = std::move(subset);
  return result;
}

inline DistanceResult s_lp_distance_flow(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double s,
                                         const DistanceOptions& opt = {}) {
  require_same_space(mu, nu);
  detail::check_scale(s);
  DistanceResult result{0.0, Method::Flow, std::nullopt};
  if (mu.same_as(nu)) return result;

  const auto dist = cross_distances(mu, nu);
  const auto mu_w = mu.weights();
  const auto nu_w = nu.weights();

  // Sweep levels below s; anything at or above s cannot beat the cap.
  std::vector<double> all;
  for (const auto& row : dist) {
    for (double d : row) {
      if (d < s) all.push_back(d);
    }
  }
  std::sort(all.begin(), all.end());
  std::vector<double> thresholds;
  for (double d : all) {
    if (thresholds.empty() || d - thresholds.back() > opt.threshold_dedup) thresholds.push_back(d);
  }

  std::vector<std::optional<double>> deficiency(thresholds.size());
  auto scaled_deficiency = [&](std::size_t k) {
    if (!deficiency[k]) {
      FeasibilityNetwork net(mu_w, nu_w, dist, thresholds[k], Neighborhood::Closed, opt.threshold_dedup);
      deficiency[k] = net.deficiency();
    }
    return s * *deficiency[k];
  };

  // First level where the distance term dominates the mass term.
  std::size_t lo = 0;
  std::size_t hi = thresholds.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (thresholds[mid] >= scaled_deficiency(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  double best = s;
  if (lo < thresholds.size()) best = std::min(best, thresholds[lo]);
  if (lo > 0) best = std::min(best, scaled_deficiency(lo - 1));
  result.value = best;
  return result;
}

inline DistanceResult s_lp_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double s,
                                    Method method = Method::Flow, const DistanceOptions& opt = {}) {
  switch (method) {
    case Method::Brute: return s_lp_distance_bruteforce(mu, nu, s, opt);
    case Method::Flow: return s_lp_distance_flow(mu, nu, s, opt);
    case Method::Both: {
      auto brute = s_lp_distance_bruteforce(mu, nu, s, opt);
      const auto flow = s_lp_distance_flow(mu, nu, s, opt);
      if (!(std::abs(brute.value - flow.value) <= opt.cross_check_tol)) {
        fail(ErrorCode::CrossCheckDivergence,
             "brute " + std::to_string(brute.value) + " vs flow " + std::to_string(flow.value));
      }
      brute.method = Method::Both;
      return brute;
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown method");
}

inline DistanceResult lp_distance_bruteforce(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                             const DistanceOptions& opt = {}) {
  return s_lp_distance_bruteforce(mu, nu, 1.0, opt);
}

inline DistanceResult lp_distance_flow(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                       const DistanceOptions& opt = {}) {
  return s_lp_distance_flow(mu, nu, 1.0, opt);
}

inline DistanceResult lp_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Method method = Method::Flow,
                                  const DistanceOptions& opt = {}) {
  return s_lp_distance(mu, nu, 1.0, method, opt);
}

/// s-witness W_{s,mu}(x) = pi_s(delta_x, mu), by a single scan over the
/// distances from x.
inline double s_witness(const DiscreteMeasure& mu, const Point& x, double s) {
  detail::check_scale(s);
  mu.space().check_point(x);
  std::vector<detail::Level> levels;
  levels.reserve(mu.size());
  for (const auto& a : mu.atoms()) levels.push_back({raw_distance(mu.space(), x, a.point), a.weight});
  detail::sort_levels(levels);
  return detail::min_eps_for_mass(1.0, levels, s);
}

inline double witness(const DiscreteMeasure& mu, const Point& x) { return s_witness(mu, x, 1.0); }

/// pi(mu, nu) == 1 exactly when the supports are at least 1 apart.
inline bool is_unit_distant(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return support_distance(mu, nu) >= 1.0;
}

inline double dirac_distance(const Space& space, const Point& x, const Point& y) {
  return std::min(1.0, distance(space, x, y));
}

}  // namespace lpm
