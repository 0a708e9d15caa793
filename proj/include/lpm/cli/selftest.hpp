#pragma once

// Seeded property suites behind `lpm selftest`. Output is deterministic for a
// given (cases, seed) pair.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lpm/core/json_io.hpp"
#include "lpm/core/random.hpp"
#include "lpm/isometry/affine.hpp"
#include "lpm/lpmetric/distance.hpp"
#include "lpm/reconstruct/peel.hpp"

namespace lpm::cli {

struct SelftestConfig {
  std::size_t cases = 100;
  std::uint64_t seed = 1;
  bool inject_fault = false;  // negative cross-check tolerance: every comparison diverges
};

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  double worst = 0.0;
  bool passed = true;
  std::string note;
};

namespace detail {

inline std::vector<double> scaled(std::span<const double> x, double factor) {
  std::vector<double> y(x.begin(), x.end());
  for (auto& v : y) v *= factor;
  return y;
}

/// The same measure with every coordinate multiplied by `factor`.
inline DiscreteMeasure rescale(const DiscreteMeasure& mu, double factor) {
  std::vector<Atom> atoms;
  for (const auto& a : mu.atoms()) atoms.push_back(Atom{Point::coords(scaled(a.point.coordinates(), factor)), a.weight});
  return make_measure(mu.space(), std::move(atoms));
}

/// Measure whose atoms lie within `radius` (per coordinate) of `centre`.
inline DiscreteMeasure cluster(const Space& space, Rng& rng, std::span<const double> centre, double radius,
                               std::size_t max_atoms) {
  const auto base = random_measure(space, rng, max_atoms, radius);
  std::vector<Atom> atoms;
  for (const auto& a : base.atoms()) {
    std::vector<double> x(a.point.coordinates().begin(), a.point.coordinates().end());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] += centre[k];
    atoms.push_back(Atom{Point::coords(std::move(x)), a.weight});
  }
  return make_measure(space, std::move(atoms));
}

inline DiscreteMeasure with_extra_atom(const DiscreteMeasure& mu, const Point& y, double w) {
  std::vector<Atom> atoms;
  for (const auto& a : mu.atoms()) atoms.push_back(Atom{a.point, a.weight * (1.0 - w)});
  atoms.push_back(Atom{y, w});
  return make_measure(mu.space(), std::move(atoms), DuplicatePolicy::Merge);
}

}  // namespace detail

inline SuiteResult suite_oracle_equivalence(Rng& rng, std::size_t cases, const DistanceOptions& opt) {
  SuiteResult r{"oracle-equivalence", 0, 0.0, true, {}};
  for (std::size_t i = 0; i < cases; ++i) {
    const bool finite = i % 10 == 9;
    const Space space = finite ? random_finite_space(rng, uniform_index(rng, 2, 6)) : random_normed_space(rng);
    const auto mu = random_measure(space, rng, 8);
    const auto nu = random_measure(space, rng, 8);
    const double dev = std::abs(lp_distance_flow(mu, nu, opt).value - lp_distance_bruteforce(mu, nu, opt).value);
    r.worst = std::max(r.worst, dev);
    r.passed = r.passed && dev <= opt.cross_check_tol;
    ++r.cases;
  }
  return r;
}

inline SuiteResult suite_dirac_formula(Rng& rng, std::size_t cases) {
  SuiteResult r{"dirac-formula", 0, 0.0, true, {}};
  for (std::size_t i = 0; i < cases; ++i) {
    const Space space = random_normed_space(rng);
    const Point x = random_point(space, rng);
    const Point y = random_point(space, rng);
    const double dev = std::abs(lp_distance(dirac(space, x), dirac(space, y)).value - dirac_distance(space, x, y));
    r.worst = std::max(r.worst, dev);
    r.passed = r.passed && dev <= 1e-12;
    ++r.cases;
  }
  return r;
}

inline SuiteResult suite_unit_distance(Rng& rng, std::size_t cases) {
  SuiteResult r{"unit-distance", 0, 0.0, true, {}};
  for (std::size_t i = 0; i < cases; ++i) {
    const Space space = random_normed_space(rng, 3);
    const auto d = space.as_normed().dim;
    std::vector<double> origin(d, 0.0);
    if (i % 2 == 0) {
      // Supports at least 1 apart: pi = 1.
      std::vector<double> far(d, 0.0);
      far[0] = 1.6 + uniform(rng, 0.0, 1.0);
      const auto mu = detail::cluster(space, rng, origin, 0.3, 5);
      const auto nu = detail::cluster(space, rng, far, 0.3, 5);
      const double dev = std::abs(lp_distance(mu, nu).value - 1.0);
      r.worst = std::max(r.worst, dev);
      r.passed = r.passed && support_distance(mu, nu) >= 1.0 && dev <= 1e-12;
    } else {
      // An atom pair closer than 1: pi <= max(1 - min weight, gap) < 1.
      const auto mu = random_measure(space, rng, 5);
      const auto base = random_measure(space, rng, 5);
      std::vector<double> y(mu[0].point.coordinates().begin(), mu[0].point.coordinates().end());
      y[0] += uniform(rng, 0.05, 0.95);
      const Point yp = Point::coords(std::move(y));
      const double w = uniform(rng, 0.1, 0.9);
      const auto nu = detail::with_extra_atom(base, yp, w);
      double nu_y = 0.0;
      for (const auto& a : nu.atoms()) {
        if (raw_distance(space, a.point, yp) == 0.0) nu_y = a.weight;
      }
      const double bound = std::max(1.0 - std::min(mu[0].weight, nu_y), raw_distance(space, mu[0].point, yp));
      const double value = lp_distance(mu, nu).value;
      r.worst = std::max(r.worst, std::max(0.0, value - bound));
      r.passed = r.passed && value <= bound + 1e-12 && value < 1.0;
    }
    ++r.cases;
  }
  return r;
}

inline SuiteResult suite_metric_axioms(Rng& rng, std::size_t cases) {
  SuiteResult r{"metric-axioms", 0, 0.0, true, {}};
  for (std::size_t i = 0; i < cases; ++i) {
    const Space space = i % 4 == 3 ? random_finite_space(rng, uniform_index(rng, 2, 6)) : random_normed_space(rng);
    const auto a = random_measure(space, rng, 5);
    const auto b = random_measure(space, rng, 5);
    const auto c = random_measure(space, rng, 5);
    const double ab = lp_distance(a, b).value;
    const double sym = std::abs(ab - lp_distance(b, a).value);
    const double tri = std::max(0.0, lp_distance(a, c).value - ab - lp_distance(b, c).value);
    r.worst = std::max({r.worst, sym, tri});
    r.passed = r.passed && sym <= 1e-9 && tri <= 1e-9;
    ++r.cases;
  }
  return r;
}

inline SuiteResult suite_diameter(Rng& rng, std::size_t cases) {
  SuiteResult r{"diameter-bound", 0, 0.0, true, {}};
  for (std::size_t i = 0; i < cases; ++i) {
    const std::size_t n = uniform_index(rng, 2, 6);
    const double a = uniform(rng, 0.05, 0.45);
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    double diam = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = 0; q < p; ++q) diam = std::max(diam, dist[p][q] = dist[q][p] = uniform(rng, a, 2.0 * a));
    }
    const Space space = Space::finite(dist);
    const double value = lp_distance(random_measure(space, rng, n), random_measure(space, rng, n)).value;
    r.worst = std::max(r.worst, std::max(0.0, value - diam));
    r.passed = r.passed && value <= diam;
    ++r.cases;
  }
  return r;
}

inline SuiteResult suite_three_point_example() {
  SuiteResult r{"three-point-example", 0, 0.0, true, {}};
  const double t = 1.0 / 3.0;
  const Space space = Space::finite({{0, t, t}, {t, 0, t}, {t, t, 0}});
  const auto mu = make_measure(space, {{Point::index(0), 0.5}, {Point::index(1), 0.5}});
  const auto nu = make_measure(space, {{Point::index(1), 0.5}, {Point::index(2), 0.5}});
  for (std::size_t i = 0; i < 3; ++i) {
    for (const auto* m : {&mu, &nu}) {
      const double w = witness(*m, Point::index(i));
      const double dev = std::abs(w - t);
      r.worst = std::max(r.worst, dev);
      r.passed = r.passed && w == t && lp_distance(dirac(space, Point::index(i)), *m, Method::Brute).value == t;
      ++r.cases;
    }
  }
  return r;
}

inline SuiteResult suite_scaling(Rng& rng, std::size_t cases) {
  SuiteResult r{"scaling-identity", 0, 0.0, true, {}};
  static constexpr double kScales[] = {0.25, 0.5, 2.0};
  for (std::size_t i = 0; i < cases; ++i) {
    const Space space = random_normed_space(rng);
    const auto mu = random_measure(space, rng, 6);
    const auto nu = random_measure(space, rng, 6);
    const double s = kScales[i % 3];
    const double direct = s_lp_distance(mu, nu, s).value;
    const double via_scaled = s * lp_distance(detail::rescale(mu, 1.0 / s), detail::rescale(nu, 1.0 / s)).value;
    const double unit_gap = std::abs(s_lp_distance(mu, nu, 1.0).value - lp_distance(mu, nu).value);
    r.worst = std::max({r.worst, std::abs(direct - via_scaled), unit_gap});
    r.passed = r.passed && std::abs(direct - via_scaled) <= 1e-9 && unit_gap == 0.0;
    ++r.cases;
  }
  return r;
}

/// Random grid configuration (ties between distances are common on the grid).
struct RingInstance {
  DiscreteMeasure theta;
  Point probe;
  std::vector<Atom> detected;
  DiscreteMeasure remainder;  // normalised undetected part
  double residual_weight;
};

inline RingInstance random_ring_instance(Rng& rng) {
  while (true) {
    const Space space = random_normed_space(rng, 3);
    const auto d = space.as_normed().dim;
    auto grid_point = [&] {
      std::vector<double> x(d);
      for (auto& v : x) v = 0.25 * static_cast<double>(static_cast<long long>(uniform_index(rng, 0, 8)) - 4);
      return Point::coords(std::move(x));
    };
    const std::size_t n = uniform_index(rng, 2, 7);
    std::vector<Point> pts;
    for (std::size_t tries = 0; pts.size() < n && tries < 200; ++tries) {
      Point p = grid_point();
      if (std::none_of(pts.begin(), pts.end(), [&](const Point& q) { return q == p; })) pts.push_back(std::move(p));
    }
    if (pts.size() < 2) continue;
    const auto w = random_weights(rng, pts.size());
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < pts.size(); ++i) atoms.push_back(Atom{pts[i], w[i]});
    const auto theta = make_measure(space, atoms);

    const Point probe = grid_point();
    std::vector<Atom> detected;
    std::vector<Atom> rest;
    for (const auto& a : atoms) {
      const bool can_detect = raw_distance(space, a.point, probe) > 0.0;
      (can_detect && std::bernoulli_distribution(0.6)(rng) ? detected : rest).push_back(a);
    }
    if (rest.empty() || detected.empty()) continue;
    double wt = 0.0;
    for (const auto& a : rest) wt += a.weight;
    std::vector<Atom> normalised;
    double partial = 0.0;
    for (std::size_t i = 0; i < rest.size(); ++i) {
      const double v = i + 1 == rest.size() ? 1.0 - partial : rest[i].weight / wt;
      partial += v;
      normalised.push_back(Atom{rest[i].point, v});
    }
    return RingInstance{theta, probe, detected, make_measure(space, normalised), wt};
  }
}

inline SuiteResult suite_residual_witness(Rng& rng, std::size_t cases) {
  SuiteResult r{"residual-witness", 0, 0.0, true, {}};
  for (std::size_t i = 0; i < cases; ++i) {
    const auto inst = random_ring_instance(rng);
    auto oracle = DistanceOracle::for_hidden(inst.theta);
    const auto state = PeelState::from_detected(inst.theta.space(), inst.probe, inst.detected);
    const double via_oracle = residual_witness(oracle, state).value;
    const double direct = s_witness(inst.remainder, inst.probe, state.residual_weight());
    const double dev = std::abs(via_oracle - direct);
    bool chain = true;
    for (std::size_t k = 2; k <= state.k(); ++k) chain = chain && (!is_Pr(oracle, state, k) || is_Pr(oracle, state, k - 1));
    r.worst = std::max(r.worst, dev);
    r.passed = r.passed && dev <= 1e-9 && chain;
    ++r.cases;
  }
  return r;
}

inline SuiteResult suite_plateau(Rng& rng, std::size_t cases) {
  SuiteResult r{"plateau-extraction", 0, 0.0, true, {}};
  for (std::size_t i = 0; i < cases; ++i) {
    const Space space = Space::normed(2 + i % 2, 2.0);
    const auto theta = random_measure(space, rng, 5);
    const auto support = theta.support();
    const auto vertices = hull_vertices(space, support);
    const auto& v = vertices[uniform_index(rng, 0, vertices.size() - 1)];
    std::vector<Point> others;
    double weight = 0.0;
    for (const auto& a : theta.atoms()) {
      if (a.point == v) {
        weight = a.weight;
      } else {
        others.push_back(a.point);
      }
    }
    auto oracle = DistanceOracle::for_hidden(theta);
    const auto prof = witness_profile(oracle, exposing_direction(space, v, others), ProfileGrid{1.0 / 32.0, 0.0});
    const double dev = std::abs(prof.lambda_hat - weight);
    r.worst = std::max(r.worst, dev);
    r.passed = r.passed && dev <= 1e-6;
    ++r.cases;
  }
  return r;
}

inline SuiteResult suite_reconstruction(Rng& rng, std::size_t cases) {
  SuiteResult r{"reconstruction", 0, 0.0, true, {}};
  for (std::size_t i = 0; i < cases; ++i) {
    const Space space = Space::normed(2 + i % 2, 2.0);
    const auto theta = random_measure(space, rng, 6);
    auto oracle = DistanceOracle::for_hidden(theta);
    const auto result = peel_reconstruct(oracle, theta.support());
    double dev = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) dev = std::max(dev, std::abs(result.measure[k].weight - theta[k].weight));
    r.worst = std::max(r.worst, dev);
    r.passed = r.passed && dev <= 1e-6;
    ++r.cases;
  }
  return r;
}

inline SuiteResult suite_isometry(Rng& rng, std::size_t cases) {
  SuiteResult r{"isometry-invariance", 0, 0.0, true, {}};
  for (std::size_t i = 0; i < cases; ++i) {
    const Space space = random_normed_space(rng, 3);
    const auto psi = random_affine_isometry(space, rng());
    std::vector<DiscreteMeasure> measures;
    for (int k = 0; k < 4; ++k) measures.push_back(random_measure(space, rng, 5));
    const auto report = check_invariance(psi, measures);
    const auto point_map = induced_point_map([&](const DiscreteMeasure& m) { return pushforward(m, psi); }, space);
    double round_trip = 0.0;
    for (int k = 0; k < 10; ++k) {
      const Point x = random_point(space, rng);
      round_trip = std::max(round_trip, raw_distance(space, point_map(x), psi(x)));
    }
    r.worst = std::max({r.worst, report.max_deviation, round_trip});
    r.passed = r.passed && report.passed && round_trip <= 1e-12;
    ++r.cases;
  }
  return r;
}

/// Runs every suite, printing one line each. Returns true iff all pass.
inline bool run_selftest(const SelftestConfig& cfg, std::ostream& out) {
  Rng rng(cfg.seed);
  DistanceOptions opt;
  if (cfg.inject_fault) opt.cross_check_tol = -1.0;
  const std::size_t n = std::max<std::size_t>(1, cfg.cases);
  const std::size_t heavy = std::max<std::size_t>(1, n / 5);

  struct Suite {
    const char* name;
    std::function<SuiteResult()> run;
  };
  const std::vector<Suite> suites = {
      {"oracle-equivalence", [&] { return suite_oracle_equivalence(rng, n, opt); }},
      {"dirac-formula", [&] { return suite_dirac_formula(rng, n); }},
      {"unit-distance", [&] { return suite_unit_distance(rng, n); }},
      {"metric-axioms", [&] { return suite_metric_axioms(rng, n); }},
      {"diameter-bound", [&] { return suite_diameter(rng, n); }},
      {"three-point-example", [] { return suite_three_point_example(); }},
      {"scaling-identity", [&] { return suite_scaling(rng, n); }},
      {"residual-witness", [&] { return suite_residual_witness(rng, n); }},
      {"plateau-extraction", [&] { return suite_plateau(rng, heavy); }},
      {"reconstruction", [&] { return suite_reconstruction(rng, heavy); }},
      {"isometry-invariance", [&] { return suite_isometry(rng, heavy); }},
  };

  std::size_t passed = 0;
  for (const auto& suite : suites) {
    SuiteResult res;
    try {
      res = suite.run();
    } catch (const Error& e) {
      res = SuiteResult{suite.name, 0, 0.0, false, e.what()};
    }
    out << "suite " << res.name << ": cases=" << res.cases << " worst=" << format12(res.worst) << ' '
        << (res.passed ? "PASS" : "FAIL");
    if (!res.note.empty()) out << " (" << res.note << ')';
    out << '\n';
    passed += res.passed ? 1 : 0;
  }
  out << "selftest: " << passed << '/' << suites.size() << " suites passed\n";
  return passed == suites.size();
}

}  // namespace lpm::cli
