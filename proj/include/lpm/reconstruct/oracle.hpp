#pragma once

#include <cstddef>
#include <functional>
#include <utility>

#include "lpm/core/measure.hpp"
#include "lpm/lpmetric/distance.hpp"

namespace lpm {

/// Black-box access to nu -> pi(nu, theta) for a fixed hidden theta. Counts
/// calls; not thread-safe.
class DistanceOracle {
 public:
  using Fn = std::function<double(const DiscreteMeasure&)>;

  DistanceOracle(Space space, Fn fn) : space_(std::move(space)), fn_(std::move(fn)) {}

  /// Oracle backed by an explicitly known hidden measure (test mode).
  static DistanceOracle for_hidden(DiscreteMeasure hidden, Method method = Method::Flow) {
    Space space = hidden.space();
    return DistanceOracle(std::move(space), [theta = std::move(hidden), method](const DiscreteMeasure& nu) {
      return lp_distance(nu, theta, method).value;
    });
  }

  double operator()(const DiscreteMeasure& nu) {
    ++calls_;
    return fn_(nu);
  }

  [[nodiscard]] std::size_t calls() const noexcept { return calls_; }
  [[nodiscard]] const Space& space() const noexcept { return space_; }

 private:
  Space space_;
  Fn fn_;
  std::size_t calls_ = 0;
};

/// A (possibly s-scaled) witness function evaluated pointwise.
using WitnessFn = std::function<double(const Point&)>;

/// x -> pi(delta_x, theta) through the oracle.
inline WitnessFn oracle_witness(DistanceOracle& oracle) {
  return [&oracle](const Point& x) { return oracle(dirac(oracle.space(), x)); };
}

/// x -> pi_s(delta_x, theta) for a known measure.
inline WitnessFn known_s_witness(const DiscreteMeasure& theta, double s) {
  return [theta, s](const Point& x) { return s_witness(theta, x, s); };
}

}  // namespace lpm
