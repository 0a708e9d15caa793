#pragma once

// Command implementations behind the `lpm` executable. Each command writes to
// the given streams and returns the process exit code:
//   0 success, 1 verification or reconstruction failure, 2 input error.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lpm/cli/selftest.hpp"
#include "lpm/core/json_io.hpp"
#include "lpm/core/random.hpp"
#include "lpm/isometry/affine.hpp"
#include "lpm/lpmetric/distance.hpp"
#include "lpm/reconstruct/peel.hpp"
#include "lpm/reconstruct/profile.hpp"

namespace lpm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerification = 1;
inline constexpr int kExitInput = 2;

inline int exit_code_for(const Error& e) { return is_input_error(e.code()) ? kExitInput : kExitVerification; }

/// lo:hi:step, applied to every coordinate.
struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;

  [[nodiscard]] std::size_t count() const { return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1; }
  [[nodiscard]] double at(std::size_t i) const { return lo + step * static_cast<double>(i); }
};

inline double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::MalformedInput, what + ": \"" + text + "\" is not a number");
  }
  if (used != text.size() || !std::isfinite(v)) fail(ErrorCode::MalformedInput, what + ": \"" + text + "\" is not a number");
  return v;
}

inline std::vector<double> parse_list(const std::string& text, char sep, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(parse_double(item, what));
  if (out.empty()) fail(ErrorCode::MalformedInput, what + " is empty");
  return out;
}

inline GridSpec parse_grid(const std::string& text) {
  const auto v = parse_list(text, ':', "grid");
  if (v.size() != 3) fail(ErrorCode::MalformedInput, "grid must be lo:hi:step");
  GridSpec g{v[0], v[1], v[2]};
  if (!(g.step > 0.0) || g.hi < g.lo) fail(ErrorCode::MalformedInput, "grid needs step > 0 and hi >= lo");
  if (g.count() > 1'000'000) fail(ErrorCode::MalformedInput, "grid has too many points");
  return g;
}

/// "a,b,..." for normed spaces, a point index for finite ones.
inline Point parse_point(const Space& space, const std::string& text) {
  Point p;
  if (space.is_finite()) {
    const double v = parse_double(text, "point index");
    if (v < 0.0 || v != std::floor(v)) fail(ErrorCode::MalformedInput, "point index must be a non-negative integer");
    p = Point::index(static_cast<std::size_t>(v));
  } else {
    p = Point::coords(parse_list(text, ',', "point"));
  }
  space.check_point(p);
  return p;
}

inline json rounded(const DiscreteMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms()) atoms.push_back(json{{"point", point_to_json(a.point, true)}, {"weight", round12(a.weight)}});
  return json{{"space", space_to_json(mu.space())}, {"atoms", std::move(atoms)}};
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------- dist

struct DistConfig {
  std::string mu;
  std::string nu;
  Method method = Method::Flow;
  double s = 1.0;
  DistanceOptions options;
};

inline int cmd_dist(const DistConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto mu = read_measure_file(cfg.mu);
  const auto nu = read_measure_file(cfg.nu);
  require_same_space(mu, nu);
  if (cfg.method != Method::Both) {
    out << format12(s_lp_distance(mu, nu, cfg.s, cfg.method, cfg.options).value) << '\n';
    return kExitOk;
  }
  const double brute = s_lp_distance_bruteforce(mu, nu, cfg.s, cfg.options).value;
  const double flow = s_lp_distance_flow(mu, nu, cfg.s, cfg.options).value;
  const double delta = std::abs(brute - flow);
  out << "brute " << format12(brute) << '\n' << "flow " << format12(flow) << '\n' << "delta " << format12(delta) << '\n';
  if (delta > cfg.options.cross_check_tol) {
    err << "error: " << to_string(ErrorCode::CrossCheckDivergence) << '\n';
    return kExitVerification;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- witness

struct WitnessConfig {
  std::string measure;
  std::vector<std::string> points;
  std::optional<std::string> grid;
  bool all_points = false;
  double s = 1.0;
};

inline int cmd_witness(const WitnessConfig& cfg, std::ostream& out, std::ostream&) {
  const auto mu = read_measure_file(cfg.measure);
  const Space& space = mu.space();
  std::vector<Point> queries;
  for (const auto& p : cfg.points) queries.push_back(parse_point(space, p));
  if (cfg.all_points) {
    if (space.is_finite()) {
      for (std::size_t i = 0; i < space.as_finite().size(); ++i) queries.push_back(Point::index(i));
    } else {
      for (const auto& a : mu.atoms()) queries.push_back(a.point);
    }
  }
  if (cfg.grid) {
    if (space.is_finite()) fail(ErrorCode::NoConvexStructure, "grids need a normed space");
    const auto g = parse_grid(*cfg.grid);
    const auto dim = space.as_normed().dim;
    std::size_t total = 1;
    for (std::size_t k = 0; k < dim; ++k) {
      total *= g.count();
      if (total > 1'000'000) fail(ErrorCode::MalformedInput, "grid has too many points");
    }
    for (std::size_t f = 0; f < total; ++f) {
      std::vector<double> x(dim);
      std::size_t rest = f;
      for (std::size_t k = dim; k-- > 0;) {
        x[k] = g.at(rest % g.count());
        rest /= g.count();
      }
      queries.push_back(Point::coords(std::move(x)));
    }
  }
  if (queries.empty()) fail(ErrorCode::InvalidArgument, "no query points (use --point, --grid or --all-points)");

  if (space.is_finite()) {
    out << "x,W\n";
  } else {
    for (std::size_t k = 0; k < space.as_normed().dim; ++k) out << 'x' << k + 1 << ',';
    out << "W\n";
  }
  for (const auto& q : queries) {
    if (q.is_index()) {
      out << q.index();
    } else {
      for (std::size_t k = 0; k < q.dim(); ++k) out << (k ? "," : "") << format12(q.coordinates()[k]);
    }
    out << ',' << format12(s_witness(mu, q, cfg.s)) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- profile

struct ProfileConfig {
  std::string measure;
  std::size_t vertex = 0;
  std::optional<std::string> direction;
  double s = 1.0;
  double step = 1.0 / 64.0;
  double extent = 0.0;
  std::optional<std::string> out;
};

inline int cmd_profile(const ProfileConfig& cfg, std::ostream& out, std::ostream&) {
  const auto theta = read_measure_file(cfg.measure);
  const Space& space = theta.space();
  lpm::detail::require_normed(space, "profile");
  if (cfg.vertex >= theta.size()) fail(ErrorCode::IndexOutOfRange, "vertex selects atom " + std::to_string(cfg.vertex));
  if (!(cfg.s > 0.0)) fail(ErrorCode::InvalidArgument, "s must be positive");
  const Point& vertex = theta[cfg.vertex].point;
  std::vector<Point> others;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (i != cfg.vertex) others.push_back(theta[i].point);
  }
  if (in_convex_hull(vertex, others)) fail(ErrorCode::NotAVertex, "atom " + std::to_string(cfg.vertex));

  ExposingRay ray;
  if (cfg.direction) {
    auto u = parse_list(*cfg.direction, ',', "direction");
    if (u.size() != vertex.dim()) fail(ErrorCode::DimensionMismatch, "direction has the wrong dimension");
    const double norm = lp_norm(u, space.as_normed().p);
    if (!(norm > 0.0)) fail(ErrorCode::InvalidArgument, "direction must be nonzero");
    for (auto& v : u) v /= norm;
    ray = ExposingRay{vertex, u, std::nullopt};
    if (!verify_ray(space, ray, others)) fail(ErrorCode::RayVerificationFailed, "the given direction is not exposing");
  } else {
    ray = exposing_direction(space, vertex, others);
  }

  auto oracle = DistanceOracle::for_hidden(theta);
  const WitnessFn w = cfg.s == 1.0 ? oracle_witness(oracle) : known_s_witness(theta, cfg.s);
  const auto prof = witness_profile(w, ray, cfg.s, ProfileGrid{cfg.step, cfg.extent});

  std::ostringstream csv;
  csv << "t,W\n";
  for (const auto& [t, value] : prof.samples) csv << format12(t) << ',' << format12(value) << '\n';
  if (cfg.out) {
    write_text_file(*cfg.out, csv.str());
  } else {
    out << csv.str();
  }
  json direction = json::array();
  for (double v : ray.direction) direction.push_back(round12(v));
  const json summary{{"plateau", round12(prof.plateau_value)},
                     {"lambda_hat", round12(prof.lambda_hat)},
                     {"breakpoint", round12(prof.breakpoint)},
                     {"plateau_length", round12(prof.plateau_length)},
                     {"s", round12(cfg.s)},
                     {"direction", direction}};
  out << summary.dump() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- reconstruct

struct ReconstructConfig {
  std::string hidden;
  std::optional<std::string> support;
  bool support_search = false;
  std::optional<std::string> grid;
  std::size_t support_cap = 12;
};

inline std::vector<Point> read_support_file(const Space& space, const std::string& path) {
  const json j = read_json_file(path);
  lpm::detail::expect_object(j, "support");
  lpm::detail::reject_unknown_fields(j, {"points"}, "support");
  const auto& pts = lpm::detail::require_field(j, "points", "support");
  if (!pts.is_array()) fail(ErrorCode::MalformedInput, "support.points must be an array");
  std::vector<Point> out;
  for (const auto& p : pts) out.push_back(point_from_json(space, p));
  return out;
}

inline int cmd_reconstruct(const ReconstructConfig& cfg, std::ostream& out, std::ostream&) {
  const auto hidden = read_measure_file(cfg.hidden);
  const Space& space = hidden.space();
  auto oracle = DistanceOracle::for_hidden(hidden);

  std::vector<Point> support;
  json report;
  if (cfg.support_search) {
    if (!cfg.grid) fail(ErrorCode::InvalidArgument, "support search needs --grid lo:hi:step");
    const auto g = parse_grid(*cfg.grid);
    support = experimental_support_search(oracle, g.lo, g.hi, g.step);
    json cands = json::array();
    for (const auto& p : support) cands.push_back(point_to_json(p, true));
    report["support_search"] = {{"candidates", cands}, {"oracle_calls", oracle.calls()}};
    if (support.empty()) fail(ErrorCode::ReconstructionFailure, "support search found no candidates");
  } else {
    support = cfg.support ? read_support_file(space, *cfg.support) : hidden.support();
  }

  const auto result = peel_reconstruct(oracle, support, cfg.support_cap);

  // Per hidden atom: |recovered weight - hidden weight| (recovered weight 0 if absent).
  json errors = json::array();
  double max_error = 0.0;
  auto weight_at = [](const DiscreteMeasure& m, const Point& x) {
    for (const auto& a : m.atoms()) {
      if (raw_distance(m.space(), a.point, x) == 0.0) return a.weight;
    }
    return 0.0;
  };
  for (const auto& a : hidden.atoms()) {
    const double e = std::abs(weight_at(result.measure, a.point) - a.weight);
    max_error = std::max(max_error, e);
    errors.push_back(json{{"point", point_to_json(a.point, true)}, {"error", round12(e)}});
  }
  for (const auto& a : result.measure.atoms()) {
    if (weight_at(hidden, a.point) == 0.0) {
      max_error = std::max(max_error, a.weight);
      errors.push_back(json{{"point", point_to_json(a.point, true)}, {"error", round12(a.weight)}});
    }
  }
  const bool passed = max_error <= kReconstructionTolerance;
  report["recovered"] = rounded(result.measure);
  report["errors"] = errors;
  report["max_error"] = round12(max_error);
  report["oracle_calls"] = oracle.calls();
  report["peel_stages"] = result.peel_stages;
  report["peel_order"] = result.peel_order;
  report["passed"] = passed;
  out << report.dump(2) << '\n';
  if (cfg.support_search) return kExitOk;
  return passed ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------- invariance

struct InvarianceConfig {
  std::string measures_dir;
  std::optional<std::string> isometry;
  bool random_isometry = false;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
};

inline std::vector<std::pair<std::string, DiscreteMeasure>> read_measure_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(ErrorCode::InvalidArgument, dir + " is not a directory");
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) fail(ErrorCode::InvalidArgument, dir + " contains no .json measures");
  std::vector<std::pair<std::string, DiscreteMeasure>> out;
  for (const auto& f : files) out.emplace_back(fs::path(f).filename().string(), read_measure_file(f));
  return out;
}

inline int cmd_invariance(const InvarianceConfig& cfg, std::ostream& out, std::ostream&) {
  const auto loaded = read_measure_dir(cfg.measures_dir);
  std::vector<DiscreteMeasure> measures;
  json names = json::array();
  for (const auto& [name, mu] : loaded) {
    if (!measures.empty()) require_same_space(measures.front(), mu);
    measures.push_back(mu);
    names.push_back(name);
  }
  const Space& space = measures.front().space();
  if (cfg.isometry.has_value() == cfg.random_isometry) {
    fail(ErrorCode::InvalidArgument, "give exactly one of --isometry or --random-isometry");
  }
  if (cfg.random_isometry && !cfg.seed) fail(ErrorCode::InvalidArgument, "--random-isometry needs --seed");
  if (cfg.threads == 0) fail(ErrorCode::InvalidArgument, "--threads must be positive");
  const AffineIsometry psi =
      cfg.isometry ? isometry_from_json(space, read_json_file(*cfg.isometry)) : random_affine_isometry(space, *cfg.seed);

  const auto report = check_invariance(psi, measures, cfg.threads);
  const json j{{"measures", names},
               {"pairs", report.pairs},
               {"max_deviation", round12(report.max_deviation)},
               {"worst_pair", json::array({names[report.worst_i], names[report.worst_j]})},
               {"tolerance", kInvarianceTolerance},
               {"passed", report.passed}};
  out << j.dump(2) << '\n';
  return report.passed ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------- sample

struct SampleConfig {
  std::string target;
  long long n = 0;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
};

inline int cmd_sample(const SampleConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.n <= 0) fail(ErrorCode::InvalidArgument, "--n must be positive");
  const auto target = read_measure_file(cfg.target);
  Rng rng(cfg.seed);
  const auto empirical = sample_empirical(target, static_cast<std::size_t>(cfg.n), rng);
  const double value = lp_distance(empirical, target).value;
  json j{{"n", cfg.n}, {"seed", cfg.seed}, {"atoms", empirical.size()}, {"distance", round12(value)}};
  if (cfg.out) {
    write_text_file(*cfg.out, measure_to_json(empirical).dump(2) + "\n");
  } else {
    j["empirical"] = rounded(empirical);
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- selftest

inline int cmd_selftest(const SelftestConfig& cfg, std::ostream& out, std::ostream&) {
  return run_selftest(cfg, out) ? kExitOk : kExitVerification;
}

}  // namespace lpm::cli
