#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lpm/core/json_io.hpp"
#include "lpm/core/measure.hpp"
#include "lpm/error.hpp"
#include "lpm/lpmetric/distance.hpp"

namespace lpm {

inline constexpr double kOrthogonalityTolerance = 1e-10;
inline constexpr double kIsometrySpotCheckTolerance = 1e-10;
inline constexpr int kIsometrySpotChecks = 100;
inline constexpr double kFitResidualTolerance = 1e-8;
inline constexpr double kInvarianceTolerance = 1e-9;

/// x -> L x + t, with no isometry guarantee.
struct AffineMap {
  Eigen::MatrixXd linear;
  Eigen::VectorXd translation;

  [[nodiscard]] Point operator()(const Point& x) const {
    const auto c = x.coordinates();
    if (static_cast<Eigen::Index>(c.size()) != linear.cols()) fail(ErrorCode::DimensionMismatch, "point dimension");
    const Eigen::VectorXd y = linear * Eigen::Map<const Eigen::VectorXd>(c.data(), linear.cols()) + translation;
    return Point::coords(std::vector<double>(y.data(), y.data() + y.size()));
  }
};

namespace detail {

inline bool is_signed_permutation(const Eigen::MatrixXd& m, double tol) {
  const auto d = m.rows();
  for (Eigen::Index i = 0; i < d; ++i) {
    int row_nonzero = 0;
    int col_nonzero = 0;
    for (Eigen::Index j = 0; j < d; ++j) {
      for (const double v : {m(i, j), m(j, i)}) {
        if (std::abs(v) > tol && std::abs(std::abs(v) - 1.0) > tol) return false;
      }
      row_nonzero += std::abs(m(i, j)) > tol ? 1 : 0;
      col_nonzero += std::abs(m(j, i)) > tol ? 1 : 0;
    }
    if (row_nonzero != 1 || col_nonzero != 1) return false;
  }
  return true;
}

}  // namespace detail

/// Surjective affine isometry of a normed space: orthogonal linear part for
/// l2, signed permutation otherwise.
class AffineIsometry {
 public:
  static AffineIsometry create(const Space& space, Eigen::MatrixXd linear, Eigen::VectorXd translation) {
    if (!space.is_normed()) fail(ErrorCode::NoConvexStructure, "affine isometries need a normed space");
    const auto d = static_cast<Eigen::Index>(space.as_normed().dim);
    if (linear.rows() != d || linear.cols() != d || translation.size() != d) {
      fail(ErrorCode::DimensionMismatch, "isometry shape does not match the space dimension");
    }
    if (!linear.allFinite() || !translation.allFinite()) fail(ErrorCode::MalformedInput, "non-finite isometry entry");
    const double p = space.as_normed().p;
    if (p == 2.0) {
      const double dev = (linear.transpose() * linear - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
      if (dev > kOrthogonalityTolerance) {
        fail(ErrorCode::NotAnIsometry, "linear part is not orthogonal (deviation " + format12(dev) + ")");
      }
    } else if (!detail::is_signed_permutation(linear, kOrthogonalityTolerance)) {
      fail(ErrorCode::NotAnIsometry, "linear part is not a signed permutation");
    }
    AffineIsometry psi(space, AffineMap{std::move(linear), std::move(translation)});
    psi.spot_check();
    return psi;
  }

  static AffineIsometry identity(const Space& space) {
    const auto d = static_cast<Eigen::Index>(space.as_normed().dim);
    return create(space, Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d));
  }

  [[nodiscard]] const Space& space() const noexcept { return space_; }
  [[nodiscard]] const AffineMap& map() const noexcept { return map_; }
  [[nodiscard]] const Eigen::MatrixXd& linear() const noexcept { return map_.linear; }
  [[nodiscard]] const Eigen::VectorXd& translation() const noexcept { return map_.translation; }

  [[nodiscard]] Point operator()(const Point& x) const {
    space_.check_point(x);
    return map_(x);
  }

  /// psi^{-1}(y) = L^T (y - t).
  [[nodiscard]] AffineIsometry inverse() const {
    const Eigen::MatrixXd lt = map_.linear.transpose();
    return AffineIsometry(space_, AffineMap{lt, -lt * map_.translation});
  }

 private:
  AffineIsometry(Space space, AffineMap map) : space_(std::move(space)), map_(std::move(map)) {}

  void spot_check() const {
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto d = space_.as_normed().dim;
    auto draw = [&] {
      std::vector<double> v(d);
      for (auto& c : v) c = gauss(rng);
      return Point::coords(std::move(v));
    };
    for (int i = 0; i < kIsometrySpotChecks; ++i) {
      const Point a = draw();
      const Point b = draw();
      const double before = raw_distance(space_, a, b);
      const double after = raw_distance(space_, map_(a), map_(b));
      if (std::abs(after - before) > kIsometrySpotCheckTolerance * std::max(1.0, before)) {
        fail(ErrorCode::NotAnIsometry, "distance changed from " + format12(before) + " to " + format12(after));
      }
    }
  }

  Space space_;
  AffineMap map_;
};

/// Atoms mapped pointwise, weights unchanged. Atoms that collide are merged.
inline DiscreteMeasure pushforward(const DiscreteMeasure& mu, const AffineMap& f) {
  if (!mu.space().is_normed()) fail(ErrorCode::NoConvexStructure, "push-forward needs a normed space");
  if (static_cast<Eigen::Index>(mu.space().as_normed().dim) != f.linear.cols()) {
    fail(ErrorCode::DimensionMismatch, "map dimension does not match the measure's space");
  }
  std::vector<Atom> atoms;
  atoms.reserve(mu.size());
  for (const auto& a : mu.atoms()) atoms.push_back(Atom{f(a.point), a.weight});
  return make_measure(mu.space(), std::move(atoms), DuplicatePolicy::Merge);
}

inline DiscreteMeasure pushforward(const DiscreteMeasure& mu, const AffineIsometry& psi) {
  if (!(mu.space() == psi.space())) fail(ErrorCode::SpaceMismatch, "measure and isometry live on different spaces");
  return pushforward(mu, psi.map());
}

using MeasureMap = std::function<DiscreteMeasure(const DiscreteMeasure&)>;
using PointMap = std::function<Point(const Point&)>;

/// x -> the unique atom of action(delta_x).
inline PointMap induced_point_map(MeasureMap action, Space space) {
  return [action = std::move(action), space = std::move(space)](const Point& x) {
    const DiscreteMeasure image = action(dirac(space, x));
    if (!image.is_dirac()) {
      fail(ErrorCode::NonDiracImage, "image of a Dirac measure has " + std::to_string(image.size()) + " atoms");
    }
    return image[0].point;
  };
}

/// phi_psi(mu)(A) = phi(mu)(psi[A]), that is mu -> (psi^{-1})# phi(mu).
inline MeasureMap conjugate(MeasureMap phi, const AffineIsometry& psi) {
  return [phi = std::move(phi), inv = psi.inverse()](const DiscreteMeasure& mu) { return pushforward(phi(mu), inv); };
}

struct InvarianceReport {
  std::size_t measures = 0;
  std::size_t pairs = 0;
  double max_deviation = 0.0;
  std::size_t worst_i = 0;
  std::size_t worst_j = 0;
  bool passed = true;
};

/// max over pairs i < j of |pi(mu_i, mu_j) - pi(f# mu_i, f# mu_j)|.
/// Pairs are split across `threads`; the report does not depend on the split.
inline InvarianceReport check_invariance_of(const AffineMap& f, const std::vector<DiscreteMeasure>& measures,
                                            std::size_t threads = 1, Method method = Method::Flow) {
  std::vector<DiscreteMeasure> images;
  images.reserve(measures.size());
  for (const auto& mu : measures) images.push_back(pushforward(mu, f));

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < measures.size(); ++i) {
    for (std::size_t j = i + 1; j < measures.size(); ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> dev(pairs.size(), 0.0);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t k = begin; k < pairs.size(); k += stride) {
      const auto [i, j] = pairs[k];
      dev[k] = std::abs(lp_distance(measures[i], measures[j], method).value -
                        lp_distance(images[i], images[j], method).value);
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, pairs.size()));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w, threads);
  }

  InvarianceReport report;
  report.measures = measures.size();
  report.pairs = pairs.size();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (dev[k] > report.max_deviation) {
      report.max_deviation = dev[k];
      report.worst_i = pairs[k].first;
      report.worst_j = pairs[k].second;
    }
  }
  report.passed = report.max_deviation <= kInvarianceTolerance;
  return report;
}

inline InvarianceReport check_invariance(const AffineIsometry& psi, const std::vector<DiscreteMeasure>& measures,
                                         std::size_t threads = 1, Method method = Method::Flow) {
  for (const auto& mu : measures) {
    if (!(mu.space() == psi.space())) fail(ErrorCode::SpaceMismatch, "measure and isometry live on different spaces");
  }
  return check_invariance_of(psi.map(), measures, threads, method);
}

/// Least-squares affine fit of y ~ L x + t, accepted only if it is an isometry.
inline AffineIsometry fit_affine_isometry(const Space& space, const std::vector<std::pair<Point, Point>>& pairs) {
  if (!space.is_normed()) fail(ErrorCode::NoConvexStructure, "fitting needs a normed space");
  const auto d = static_cast<Eigen::Index>(space.as_normed().dim);
  const auto n = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd a(n, d + 1);
  Eigen::MatrixXd y(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [src, dst] = pairs[static_cast<std::size_t>(i)];
    space.check_point(src);
    space.check_point(dst);
    for (Eigen::Index k = 0; k < d; ++k) {
      a(i, k) = src.coordinates()[static_cast<std::size_t>(k)];
      y(i, k) = dst.coordinates()[static_cast<std::size_t>(k)];
    }
    a(i, d) = 1.0;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (n < d + 1 || qr.rank() < d + 1) {
    fail(ErrorCode::DegenerateConfiguration, "source points are not affinely independent");
  }
  const Eigen::MatrixXd sol = qr.solve(y);
  const double residual = (a * sol - y).cwiseAbs().maxCoeff();
  if (residual > kFitResidualTolerance) {
    fail(ErrorCode::NotAnIsometry, "affine fit residual " + format12(residual));
  }
  return AffineIsometry::create(space, sol.topRows(d).transpose(), sol.row(d).transpose());
}

/// Deterministic in `seed`: Haar-style orthogonal part for l2, signed
/// permutation otherwise, plus a standard Gaussian translation.
inline AffineIsometry random_affine_isometry(const Space& space, std::uint64_t seed) {
  if (!space.is_normed()) fail(ErrorCode::NoConvexStructure, "random isometries need a normed space");
  const auto d = static_cast<Eigen::Index>(space.as_normed().dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd linear = Eigen::MatrixXd::Zero(d, d);
  if (space.as_normed().p == 2.0) {
    Eigen::MatrixXd g(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) g(i, j) = gauss(rng);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    linear = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < d; ++j) {
      if (r(j, j) < 0.0) linear.col(j) *= -1.0;
    }
  } else {
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    for (std::size_t i = perm.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(perm[i - 1], perm[pick(rng)]);
    }
    std::bernoulli_distribution flip(0.5);
    for (Eigen::Index i = 0; i < d; ++i) linear(i, perm[static_cast<std::size_t>(i)]) = flip(rng) ? -1.0 : 1.0;
  }
  Eigen::VectorXd translation(d);
  for (Eigen::Index i = 0; i < d; ++i) translation(i) = gauss(rng);
  return AffineIsometry::create(space, std::move(linear), std::move(translation));
}

inline AffineIsometry isometry_from_json(const Space& space, const json& j) {
  detail::expect_object(j, "isometry");
  detail::reject_unknown_fields(j, {"linear", "translation"}, "isometry");
  const auto rows = detail::require_matrix(detail::require_field(j, "linear", "isometry"), "linear");
  const auto t = detail::require_vector(detail::require_field(j, "translation", "isometry"), "translation");
  Eigen::MatrixXd linear(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) fail(ErrorCode::MalformedInput, "ragged linear part");
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      linear(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  return AffineIsometry::create(space, std::move(linear),
                                Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size())));
}

inline json isometry_to_json(const AffineIsometry& psi) {
  json linear = json::array();
  for (Eigen::Index i = 0; i < psi.linear().rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < psi.linear().cols(); ++k) row.push_back(psi.linear()(i, k));
    linear.push_back(std::move(row));
  }
  json t = json::array();
  for (Eigen::Index i = 0; i < psi.translation().size(); ++i) t.push_back(psi.translation()(i));
  return json{{"linear", std::move(linear)}, {"translation", std::move(t)}};
}

}  // namespace lpm
