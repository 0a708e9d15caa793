#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "lpm/core/json_io.hpp"
#include "lpm/core/measure.hpp"
#include "lpm/core/random.hpp"
#include "lpm/core/space.hpp"

namespace {

using lpm::Atom;
using lpm::ErrorCode;
using lpm::Point;
using lpm::Space;

Point pt(std::vector<double> v) { return Point::coords(std::move(v)); }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const lpm::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an lpm::Error";
  return ErrorCode::InvalidArgument;
}

TEST(Space, ParsesEuclideanPlane) {
  const auto s = lpm::parse_space(R"({"type":"normed","dim":2,"p":2})");
  ASSERT_TRUE(s.is_normed());
  EXPECT_EQ(s.as_normed().dim, 2u);
  EXPECT_EQ(s.as_normed().p, 2.0);
}

TEST(Space, ParsesThreePointSpace) {
  const auto s = lpm::parse_space(
      R"({"type":"finite","dist":[[0,0.3333333333333333,0.3333333333333333],[0.3333333333333333,0,0.3333333333333333],[0.3333333333333333,0.3333333333333333,0]]})");
  ASSERT_TRUE(s.is_finite());
  EXPECT_EQ(s.as_finite().size(), 3u);
  EXPECT_DOUBLE_EQ(lpm::distance(s, Point::index(0), Point::index(1)), 1.0 / 3.0);
}

TEST(Space, ParsesInfinityNorm) {
  EXPECT_TRUE(std::isinf(lpm::parse_space(R"({"type":"normed","dim":3,"p":"inf"})").as_normed().p));
}

TEST(Space, RejectsInvalidDescriptions) {
  EXPECT_EQ(code_of([] { lpm::parse_space(R"({"type":"finite","dist":[[0,1],[2,0]]})"); }), ErrorCode::AsymmetricMatrix);
  EXPECT_EQ(code_of([] { lpm::parse_space(R"({"type":"finite","dist":[[0,1],[1,0],[1,1]]})"); }),
            ErrorCode::NonSquareMatrix);
  EXPECT_EQ(code_of([] { lpm::parse_space(R"({"type":"finite","dist":[[1,1],[1,0]]})"); }), ErrorCode::NonzeroDiagonal);
  EXPECT_EQ(code_of([] { lpm::parse_space(R"({"type":"finite","dist":[[0,0],[0,0]]})"); }),
            ErrorCode::NonPositiveOffDiagonal);
  EXPECT_EQ(code_of([] { lpm::parse_space(R"({"type":"finite","dist":[[0,1,5],[1,0,1],[5,1,0]]})"); }),
            ErrorCode::TriangleViolation);
  EXPECT_EQ(code_of([] { lpm::parse_space(R"({"type":"normed","dim":2,"p":0.5})"); }), ErrorCode::InvalidNorm);
  EXPECT_EQ(code_of([] { lpm::parse_space(R"({"type":"normed","dim":0,"p":2})"); }), ErrorCode::InvalidNorm);
  EXPECT_EQ(code_of([] { lpm::parse_space(R"({"type":"normed","dim":2,"p":2,"extra":1})"); }), ErrorCode::UnknownField);
  EXPECT_EQ(code_of([] { lpm::parse_space("{not json"); }), ErrorCode::MalformedInput);
  EXPECT_EQ(code_of([] { lpm::parse_space(R"({"type":"banach"})"); }), ErrorCode::MalformedInput);
}

TEST(Distance, NormsAndFiniteMetric) {
  EXPECT_DOUBLE_EQ(lpm::distance(Space::normed(2, 2.0), pt({0, 0}), pt({3, 4})), 5.0);
  EXPECT_DOUBLE_EQ(lpm::distance(Space::normed(2, lpm::kInfNorm), pt({0, 0}), pt({3, 4})), 4.0);
  EXPECT_DOUBLE_EQ(lpm::distance(Space::normed(2, 1.0), pt({0, 0}), pt({3, 4})), 7.0);
  EXPECT_NEAR(lpm::distance(Space::normed(2, 3.0), pt({0, 0}), pt({3, 4})), std::cbrt(27.0 + 64.0), 1e-12);
}

TEST(Distance, RejectsForeignPoints) {
  const auto plane = Space::normed(2, 2.0);
  EXPECT_EQ(code_of([&] { lpm::distance(plane, pt({0}), pt({1, 1})); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([&] { lpm::distance(plane, Point::index(0), pt({1, 1})); }), ErrorCode::DimensionMismatch);
  const auto three = Space::finite({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  EXPECT_EQ(code_of([&] { lpm::distance(three, Point::index(0), Point::index(3)); }), ErrorCode::IndexOutOfRange);
}

TEST(Measure, ConstructionAndValidation) {
  const auto line = Space::normed(1, 2.0);
  const auto mu = lpm::make_measure(line, {{pt({0}), 0.5}, {pt({1}), 0.5}});
  EXPECT_EQ(mu.size(), 2u);
  EXPECT_FALSE(mu.is_dirac());

  EXPECT_EQ(code_of([&] { lpm::make_measure(line, {{pt({0}), 0.5}, {pt({1}), 0.6}}); }), ErrorCode::WeightSumMismatch);
  EXPECT_EQ(code_of([&] { lpm::make_measure(line, {{pt({0}), 1.5}, {pt({1}), -0.5}}); }), ErrorCode::NonPositiveWeight);
  EXPECT_EQ(code_of([&] { lpm::make_measure(line, {{pt({0}), 0.5}, {pt({0}), 0.5}}); }), ErrorCode::DuplicatePoint);
  EXPECT_EQ(code_of([&] { lpm::make_measure(line, {}); }), ErrorCode::MalformedInput);

  const auto merged = lpm::make_measure(line, {{pt({0}), 0.5}, {pt({0}), 0.5}}, lpm::DuplicatePolicy::Merge);
  ASSERT_TRUE(merged.is_dirac());
  EXPECT_EQ(merged[0].weight, 1.0);
}

TEST(Measure, SameAsIgnoresAtomOrder) {
  const auto line = Space::normed(1, 2.0);
  const auto a = lpm::make_measure(line, {{pt({0}), 0.25}, {pt({1}), 0.75}});
  const auto b = lpm::make_measure(line, {{pt({1}), 0.75}, {pt({0}), 0.25}});
  const auto c = lpm::make_measure(line, {{pt({1}), 0.5}, {pt({0}), 0.5}});
  EXPECT_TRUE(a.same_as(b));
  EXPECT_FALSE(a.same_as(c));
}

TEST(Measure, SupportDistance) {
  const auto line = Space::normed(1, 2.0);
  EXPECT_EQ(lpm::support_distance(lpm::dirac(line, pt({0})), lpm::dirac(line, pt({3}))), 3.0);
  EXPECT_EQ(lpm::support_distance(lpm::make_measure(line, {{pt({0}), 0.5}, {pt({1}), 0.5}}), lpm::dirac(line, pt({1}))),
            0.0);
  const double t = 1.0 / 3.0;
  const auto three = Space::finite({{0, t, t}, {t, 0, t}, {t, t, 0}});
  const auto mu = lpm::make_measure(three, {{Point::index(0), 0.5}, {Point::index(1), 0.5}});
  const auto nu = lpm::make_measure(three, {{Point::index(1), 0.5}, {Point::index(2), 0.5}});
  EXPECT_EQ(lpm::support_distance(mu, nu), 0.0);
  EXPECT_EQ(code_of([&] { lpm::support_distance(mu, lpm::dirac(line, pt({0}))); }), ErrorCode::SpaceMismatch);
}

TEST(Json, MeasureRoundTrip) {
  const auto j = lpm::json::parse(
      R"({"space":{"type":"normed","dim":2,"p":"inf"},"atoms":[{"point":[0,1],"weight":0.25},{"point":[2,0],"weight":0.75}]})");
  const auto mu = lpm::measure_from_json(j);
  const auto back = lpm::measure_from_json(lpm::measure_to_json(mu));
  EXPECT_TRUE(mu.same_as(back));
  EXPECT_TRUE(mu.space() == back.space());
}

TEST(Json, FiniteMeasureUsesIndices) {
  const auto j = lpm::json::parse(
      R"({"space":{"type":"finite","dist":[[0,1],[1,0]]},"atoms":[{"point":1,"weight":1}]})");
  const auto mu = lpm::measure_from_json(j);
  EXPECT_EQ(mu[0].point.index(), 1u);
}

TEST(Json, RejectsUnknownAtomFields) {
  const auto j = lpm::json::parse(
      R"({"space":{"type":"normed","dim":1,"p":2},"atoms":[{"point":[0],"weight":1,"label":"a"}]})");
  EXPECT_EQ(code_of([&] { lpm::measure_from_json(j); }), ErrorCode::UnknownField);
}

TEST(Json, FormatsTwelveSignificantDigits) {
  EXPECT_EQ(lpm::format12(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(lpm::format12(0.5), "0.5");
  EXPECT_EQ(lpm::round12(2.0 / 3.0), 0.666666666667);
}

TEST(Random, GeneratorsAreDeterministicAndValid) {
  lpm::Rng a(42);
  lpm::Rng b(42);
  for (int i = 0; i < 50; ++i) {
    const auto sa = lpm::random_normed_space(a);
    const auto sb = lpm::random_normed_space(b);
    ASSERT_TRUE(sa == sb);
    EXPECT_TRUE(lpm::random_measure(sa, a, 6).same_as(lpm::random_measure(sb, b, 6)));
    const auto fa = lpm::random_finite_space(a, 5);
    EXPECT_TRUE(fa == lpm::random_finite_space(b, 5));
  }
}

TEST(Random, EmpiricalMeasureSumsToOne) {
  lpm::Rng rng(3);
  const auto line = Space::normed(1, 2.0);
  const auto target = lpm::make_measure(line, {{pt({0}), 0.5}, {pt({1}), 0.5}});
  const auto single = lpm::sample_empirical(target, 1, rng);
  EXPECT_TRUE(single.is_dirac());
  const auto many = lpm::sample_empirical(target, 1000, rng);
  double total = 0.0;
  for (const auto& a : many.atoms()) total += a.weight;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

}  // namespace
