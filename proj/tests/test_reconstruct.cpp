#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lpm/cli/selftest.hpp"
#include "lpm/core/random.hpp"
#include "lpm/reconstruct/hull.hpp"
#include "lpm/reconstruct/peel.hpp"
#include "lpm/reconstruct/profile.hpp"
#include "lpm/reconstruct/simplex.hpp"
#include "oracles.hpp"

namespace {

using lpm::ErrorCode;
using lpm::Point;
using lpm::Space;

Point pt(std::vector<double> v) { return Point::coords(std::move(v)); }

const Space kLine = Space::normed(1, 2.0);
const Space kPlane = Space::normed(2, 2.0);

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const lpm::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an lpm::Error";
  return ErrorCode::InvalidArgument;
}

TEST(Simplex, SolvesSmallProgram) {
  // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3.
  lpm::LinearProgram lp(2);
  lp.set_objective(Eigen::Vector2d(3, 2));
  lp.add_row(Eigen::Vector2d(1, 1), lpm::RowSense::LessEqual, 4);
  lp.add_row(Eigen::Vector2d(1, 3), lpm::RowSense::LessEqual, 6);
  lp.add_row(Eigen::Vector2d(1, 0), lpm::RowSense::LessEqual, 3);
  const auto sol = lp.solve();
  ASSERT_EQ(sol.status, lpm::LpStatus::Optimal);
  EXPECT_NEAR(sol.objective, 11.0, 1e-12);
  EXPECT_NEAR(sol.x(0), 3.0, 1e-12);
  EXPECT_NEAR(sol.x(1), 1.0, 1e-12);
}

TEST(Simplex, HandlesEqualityAndGreaterRows) {
  // min x + y (as max -x - y) s.t. x + 2y >= 2, x - y = 0.5.
  lpm::LinearProgram lp(2);
  lp.set_objective(Eigen::Vector2d(-1, -1));
  lp.add_row(Eigen::Vector2d(1, 2), lpm::RowSense::GreaterEqual, 2);
  lp.add_row(Eigen::Vector2d(1, -1), lpm::RowSense::Equal, 0.5);
  const auto sol = lp.solve();
  ASSERT_EQ(sol.status, lpm::LpStatus::Optimal);
  EXPECT_NEAR(sol.x(0), 1.0, 1e-12);
  EXPECT_NEAR(sol.x(1), 0.5, 1e-12);
}

TEST(Simplex, DetectsInfeasibleAndUnbounded) {
  lpm::LinearProgram bad(1);
  bad.add_row(Eigen::VectorXd::Ones(1), lpm::RowSense::LessEqual, -1);
  EXPECT_EQ(bad.solve().status, lpm::LpStatus::Infeasible);
  lpm::LinearProgram open(1);
  open.set_objective(Eigen::VectorXd::Ones(1));
  open.add_row(Eigen::VectorXd::Ones(1), lpm::RowSense::GreaterEqual, 1);
  EXPECT_EQ(open.solve().status, lpm::LpStatus::Unbounded);
}

TEST(Hull, Vertices) {
  const auto v = lpm::hull_vertices(kPlane, {pt({0, 0}), pt({1, 0}), pt({0, 1}), pt({0.25, 0.25})});
  EXPECT_EQ(v, (std::vector<Point>{pt({0, 0}), pt({1, 0}), pt({0, 1})}));
  EXPECT_EQ(lpm::hull_vertices(kPlane, {pt({0, 0}), pt({1, 1})}).size(), 2u);
  EXPECT_EQ(lpm::hull_vertices(kLine, {pt({0}), pt({0.5}), pt({1})}), (std::vector<Point>{pt({0}), pt({1})}));
  EXPECT_EQ(code_of([] { lpm::hull_vertices(Space::finite({{0, 1}, {1, 0}}), {Point::index(0)}); }),
            ErrorCode::NoConvexStructure);
}

TEST(ExposingRay, Examples) {
  const auto ray = lpm::exposing_direction(kPlane, pt({0, 0}), {pt({1, 0}), pt({0, 1})});
  EXPECT_NEAR(ray.direction[0], -1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(ray.direction[1], -1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_TRUE(lpm::verify_ray(kPlane, ray, {pt({1, 0}), pt({0, 1})}));

  const auto line_ray = lpm::exposing_direction(kLine, pt({0}), {pt({1})});
  EXPECT_EQ(line_ray.direction, std::vector<double>{-1.0});

  EXPECT_EQ(code_of([] { lpm::exposing_direction(kPlane, pt({0.25, 0.25}), {pt({0, 0}), pt({1, 0}), pt({0, 1})}); }),
            ErrorCode::NotAVertex);
}

TEST(ExposingRay, FallsBackToSeparatingFunctional) {
  // The direction away from the centroid runs towards (-1, 0.1)'s side; the
  // vertex (0, 0) is only barely exposed.
  const std::vector<Point> others{pt({-1, 0.05}), pt({1, 0.05}), pt({0, 3})};
  const auto ray = lpm::exposing_direction(kPlane, pt({0, 0}), others);
  EXPECT_TRUE(lpm::verify_ray(kPlane, ray, others));
}

TEST(ExposingRay, RandomVerticesInSeveralNorms) {
  lpm::Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    const double p = std::vector<double>{1.0, 2.0, lpm::kInfNorm}[static_cast<std::size_t>(i % 3)];
    const auto space = Space::normed(2 + static_cast<std::size_t>(i % 2), p);
    const auto mu = lpm::random_measure(space, rng, 6);
    const auto support = mu.support();
    for (const auto& v : lpm::hull_vertices(space, support)) {
      std::vector<Point> others;
      for (const auto& q : support) {
        if (!(q == v)) others.push_back(q);
      }
      try {
        const auto ray = lpm::exposing_direction(space, v, others);
        EXPECT_TRUE(lpm::verify_ray(space, ray, others));
      } catch (const lpm::Error& e) {
        // Only the verified-ray failure is acceptable for non-Euclidean norms.
        EXPECT_EQ(e.code(), ErrorCode::RayVerificationFailed);
        EXPECT_NE(p, 2.0);
      }
    }
  }
}

TEST(Oracle, CountsCalls) {
  auto oracle = lpm::DistanceOracle::for_hidden(lpm::dirac(kLine, pt({0})));
  EXPECT_EQ(oracle.calls(), 0u);
  EXPECT_DOUBLE_EQ(oracle(lpm::dirac(kLine, pt({0.3}))), 0.3);
  EXPECT_EQ(oracle.calls(), 1u);
}

TEST(Profile, PlateauExample) {
  const auto theta = lpm::make_measure(kPlane, {{pt({0, 0}), 0.25}, {pt({2, 0}), 0.75}});
  auto oracle = lpm::DistanceOracle::for_hidden(theta);
  const lpm::ExposingRay ray{pt({0, 0}), {-1.0, 0.0}, std::nullopt};
  const auto prof = lpm::witness_profile(oracle, ray);
  EXPECT_NEAR(prof.plateau_value, 0.75, 1e-12);
  EXPECT_NEAR(prof.lambda_hat, 0.25, 1e-6);
  for (const auto& [t, w] : prof.samples) {
    EXPECT_NEAR(w, std::min(1.0, std::max(t, 0.75)), 1e-12) << "t = " << t;
    EXPECT_NEAR(w, oracle::witness(theta, ray.at(t)), 1e-12);
  }
}

TEST(Profile, ScaledPlateauExample) {
  const auto theta = lpm::make_measure(kPlane, {{pt({0, 0}), 0.25}, {pt({2, 0}), 0.75}});
  const lpm::ExposingRay ray{pt({0, 0}), {-1.0, 0.0}, std::nullopt};
  const auto prof = lpm::witness_profile(lpm::known_s_witness(theta, 0.5), ray, 0.5);
  EXPECT_NEAR(prof.plateau_value, 0.375, 1e-12);
  EXPECT_NEAR(prof.lambda_hat, 0.25, 1e-6);
  for (const auto& [t, w] : prof.samples) EXPECT_NEAR(w, oracle::witness(theta, ray.at(t), 0.5), 1e-12);
}

TEST(Profile, DiracHasFullWeight) {
  auto oracle = lpm::DistanceOracle::for_hidden(lpm::dirac(kPlane, pt({1, 1})));
  const auto ray = lpm::exposing_direction(kPlane, pt({1, 1}), {});
  const auto prof = lpm::witness_profile(oracle, ray);
  EXPECT_EQ(prof.lambda_hat, 1.0);
  for (const auto& [t, w] : prof.samples) EXPECT_NEAR(w, std::min(1.0, t), 1e-12);
  EXPECT_EQ(lpm::plateau_weight(oracle, ray), 1.0);
}

TEST(Profile, PlateauWeightOnTheLine) {
  auto oracle = lpm::DistanceOracle::for_hidden(lpm::make_measure(kLine, {{pt({0}), 0.5}, {pt({1}), 0.5}}));
  EXPECT_NEAR(lpm::plateau_weight(oracle, lpm::ExposingRay{pt({0}), {-1.0}, std::nullopt}), 0.5, 1e-6);
}

TEST(Profile, NonExposingRayIsRejected) {
  // Walking from (0,0) towards the heavy atom: W drops below t.
  auto oracle = lpm::DistanceOracle::for_hidden(lpm::make_measure(kPlane, {{pt({0, 0}), 0.25}, {pt({0.5, 0}), 0.75}}));
  EXPECT_EQ(code_of([&] { lpm::witness_profile(oracle, lpm::ExposingRay{pt({0, 0}), {1.0, 0.0}, std::nullopt}); }),
            ErrorCode::ProfileShapeMismatch);
}

TEST(Peel, BuildEta) {
  const auto state = lpm::PeelState::from_detected(kLine, pt({0}), {{pt({1}), 0.25}});
  EXPECT_TRUE(lpm::build_eta(state, 0).same_as(lpm::dirac(kLine, pt({0}))));
  EXPECT_TRUE(lpm::build_eta(state, 1).same_as(lpm::make_measure(kLine, {{pt({1}), 0.25}, {pt({0}), 0.75}})));

  const auto full = lpm::PeelState::from_detected(kLine, pt({0}), {{pt({1}), 0.25}, {pt({-2}), 0.75}});
  EXPECT_EQ(full.residual_weight(), 0.0);
  EXPECT_EQ(code_of([&] { lpm::build_eta(full, 2); }), ErrorCode::DegenerateEta);
}

TEST(Peel, RingsGroupEqualDistances) {
  const auto state = lpm::PeelState::from_detected(kPlane, pt({0, 0}),
                                                   {{pt({1, 0}), 0.1}, {pt({0, 2}), 0.2}, {pt({0, -1}), 0.3}});
  ASSERT_EQ(state.k(), 2u);
  EXPECT_EQ(state.rings()[0].radius, 2.0);
  EXPECT_EQ(state.rings()[1].radius, 1.0);
  EXPECT_EQ(state.rings()[1].atoms.size(), 2u);
  EXPECT_NEAR(state.residual_weight(), 0.4, 1e-15);
  EXPECT_EQ(code_of([] { lpm::PeelState::from_detected(kLine, pt({0}), {{pt({0}), 0.5}}); }), ErrorCode::InvalidArgument);
}

TEST(Peel, PropertyPr) {
  const auto theta = lpm::make_measure(kLine, {{pt({1}), 0.25}, {pt({0}), 0.75}});
  auto oracle = lpm::DistanceOracle::for_hidden(theta);
  const auto state = lpm::PeelState::from_detected(kLine, pt({0}), {{pt({1}), 0.25}});
  EXPECT_TRUE(lpm::is_Pr(oracle, state, 1));

  auto far = lpm::DistanceOracle::for_hidden(lpm::make_measure(kLine, {{pt({0.5}), 0.25}, {pt({5}), 0.75}}));
  const auto near_state = lpm::PeelState::from_detected(kLine, pt({0}), {{pt({0.5}), 0.25}});
  EXPECT_FALSE(lpm::is_Pr(far, near_state, 1));

  const auto wide = lpm::PeelState::from_detected(kLine, pt({0}), {{pt({1.5}), 0.25}});
  EXPECT_TRUE(lpm::is_Pr(far, wide, 1));
}

TEST(Peel, ResidualWitnessHandExample) {
  const auto theta = lpm::make_measure(kLine, {{pt({1}), 0.25}, {pt({0}), 0.75}});
  auto oracle = lpm::DistanceOracle::for_hidden(theta);
  const auto state = lpm::PeelState::from_detected(kLine, pt({0}), {{pt({1}), 0.25}});
  const auto r = lpm::residual_witness(oracle, state);
  EXPECT_EQ(r.branch, 1u);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.value, lpm::s_witness(lpm::dirac(kLine, pt({0})), pt({0}), 0.75));
  EXPECT_LE(oracle.calls(), 2u);
}

TEST(Peel, ResidualWitnessWithoutRingsIsTheWitness) {
  const auto theta = lpm::make_measure(kLine, {{pt({1}), 0.25}, {pt({0}), 0.75}});
  auto oracle = lpm::DistanceOracle::for_hidden(theta);
  const auto state = lpm::PeelState::from_detected(kLine, pt({-0.4}), {});
  EXPECT_DOUBLE_EQ(lpm::residual_witness(oracle, state).value, lpm::witness(theta, pt({-0.4})));
}

TEST(Peel, ResidualWitnessMatchesDirectComputation) {
  lpm::Rng rng(404);
  for (int i = 0; i < 300; ++i) {
    const auto inst = lpm::cli::random_ring_instance(rng);
    auto oracle = lpm::DistanceOracle::for_hidden(inst.theta);
    const auto state = lpm::PeelState::from_detected(inst.theta.space(), inst.probe, inst.detected);
    const auto r = lpm::residual_witness(oracle, state);
    EXPECT_NEAR(r.value, oracle::witness(inst.remainder, inst.probe, inst.residual_weight), 1e-9) << "instance " << i;
    EXPECT_LE(oracle.calls(), state.k() + 1);
    for (std::size_t k = 2; k <= state.k(); ++k) {
      if (lpm::is_Pr(oracle, state, k)) EXPECT_TRUE(lpm::is_Pr(oracle, state, k - 1));
    }
  }
}

TEST(Peel, EmptyResidual) {
  auto oracle = lpm::DistanceOracle::for_hidden(lpm::make_measure(kLine, {{pt({1}), 0.25}, {pt({2}), 0.75}}));
  const auto state = lpm::PeelState::from_detected(kLine, pt({0}), {{pt({1}), 0.25}, {pt({2}), 0.75}});
  const auto r = lpm::residual_witness(oracle, state);
  EXPECT_TRUE(r.empty_residual);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(oracle.calls(), 0u);
}

TEST(Reconstruct, ThreeAtomExample) {
  const auto theta = lpm::make_measure(kPlane, {{pt({0, 0}), 0.2}, {pt({1, 0}), 0.3}, {pt({0, 1}), 0.5}});
  auto oracle = lpm::DistanceOracle::for_hidden(theta);
  const auto r = lpm::peel_reconstruct(oracle, theta.support());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.measure[i].weight, theta[i].weight, 1e-6);
  EXPECT_EQ(r.peel_stages, 1u);
  EXPECT_EQ(r.oracle_calls, oracle.calls());
  EXPECT_LE(r.closing_deviation, 1e-6);
}

TEST(Reconstruct, DiracIsExact) {
  const auto theta = lpm::dirac(kPlane, pt({0.3, -2}));
  auto oracle = lpm::DistanceOracle::for_hidden(theta);
  const auto r = lpm::peel_reconstruct(oracle, theta.support());
  EXPECT_TRUE(r.measure.same_as(theta));
  EXPECT_EQ(r.peel_stages, 0u);
  EXPECT_EQ(r.oracle_calls, 0u);
}

TEST(Reconstruct, TwoAtomsUseTheClosedForm) {
  const auto theta = lpm::make_measure(kPlane, {{pt({0, 0}), 0.35}, {pt({0.4, 0.1}), 0.65}});
  auto oracle = lpm::DistanceOracle::for_hidden(theta);
  const auto r = lpm::peel_reconstruct(oracle, theta.support());
  EXPECT_EQ(r.peel_stages, 0u);
  EXPECT_NEAR(r.measure[0].weight, 0.35, 1e-12);
  EXPECT_NEAR(r.measure[1].weight, 0.65, 1e-12);
}

TEST(Reconstruct, CollinearSupport) {
  const auto theta = lpm::make_measure(kPlane, {{pt({0, 0}), 0.2}, {pt({2, 0}), 0.3}, {pt({1, 0}), 0.5}});
  auto oracle = lpm::DistanceOracle::for_hidden(theta);
  const auto r = lpm::peel_reconstruct(oracle, theta.support());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.measure[i].weight, theta[i].weight, 1e-9);
}

TEST(Reconstruct, RandomMeasures) {
  lpm::Rng rng(99);
  for (int i = 0; i < 60; ++i) {
    const auto space = Space::normed(2 + static_cast<std::size_t>(i % 2), 2.0);
    const auto theta = lpm::random_measure(space, rng, 6);
    auto oracle = lpm::DistanceOracle::for_hidden(theta);
    const auto r = lpm::peel_reconstruct(oracle, theta.support());
    for (std::size_t k = 0; k < theta.size(); ++k) EXPECT_NEAR(r.measure[k].weight, theta[k].weight, 1e-6);
  }
}

TEST(Reconstruct, WrongSupportFails) {
  const auto theta = lpm::make_measure(kPlane, {{pt({0, 0}), 0.2}, {pt({1, 0}), 0.3}, {pt({0, 1}), 0.5}});
  auto oracle = lpm::DistanceOracle::for_hidden(theta);
  const auto code = code_of([&] { lpm::peel_reconstruct(oracle, {pt({0, 0}), pt({1, 0}), pt({3, 3})}); });
  EXPECT_FALSE(lpm::is_input_error(code));
}

TEST(Reconstruct, RejectsBadSupport) {
  const auto theta = lpm::dirac(kPlane, pt({0, 0}));
  auto oracle = lpm::DistanceOracle::for_hidden(theta);
  EXPECT_EQ(code_of([&] { lpm::peel_reconstruct(oracle, {}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { lpm::peel_reconstruct(oracle, {pt({0, 0}), pt({0, 0})}); }), ErrorCode::DuplicatePoint);
  auto finite = lpm::DistanceOracle::for_hidden(lpm::dirac(Space::finite({{0, 1}, {1, 0}}), Point::index(0)));
  EXPECT_EQ(code_of([&] { lpm::peel_reconstruct(finite, {Point::index(0)}); }), ErrorCode::NoConvexStructure);
}

TEST(Reconstruct, ExperimentalSupportSearchFindsSeparatedAtoms) {
  const auto theta = lpm::make_measure(kLine, {{pt({0}), 0.4}, {pt({1}), 0.6}});
  auto oracle = lpm::DistanceOracle::for_hidden(theta);
  const auto found = lpm::experimental_support_search(oracle, -0.5, 1.5, 0.25);
  ASSERT_FALSE(found.empty());
  bool has_heavy = false;
  for (const auto& p : found) has_heavy = has_heavy || std::abs(p.coordinates()[0] - 1.0) < 1e-12;
  EXPECT_TRUE(has_heavy);
}

}  // namespace
