#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lpm/core/measure.hpp"
#include "lpm/core/space.hpp"
#include "lpm/error.hpp"

namespace lpm {

using json = nlohmann::json;

namespace detail {

inline void expect_object(const json& j, std::string_view what) {
  if (!j.is_object()) fail(ErrorCode::MalformedInput, std::string(what) + " must be a JSON object");
}

inline void reject_unknown_fields(const json& j, std::initializer_list<std::string_view> allowed,
                                  std::string_view what) {
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) fail(ErrorCode::UnknownField, std::string(what) + " has unknown field \"" + key + "\"");
  }
}

inline const json& require_field(const json& j, const char* key, std::string_view what) {
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::MalformedInput, std::string(what) + " lacks field \"" + key + "\"");
  return *it;
}

inline double require_number(const json& j, std::string_view what) {
  if (!j.is_number()) fail(ErrorCode::MalformedInput, std::string(what) + " must be a number");
  return j.get<double>();
}

inline std::vector<double> require_vector(const json& j, std::string_view what) {
  if (!j.is_array()) fail(ErrorCode::MalformedInput, std::string(what) + " must be an array");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(require_number(e, what));
  return v;
}

inline std::vector<std::vector<double>> require_matrix(const json& j, std::string_view what) {
  if (!j.is_array()) fail(ErrorCode::MalformedInput, std::string(what) + " must be an array of rows");
  std::vector<std::vector<double>> m;
  m.reserve(j.size());
  for (const auto& row : j) m.push_back(require_vector(row, what));
  return m;
}

}  // namespace detail

/// Rounds to 12 significant digits, the precision used for every printed number.
inline double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::stod(buf);
}

inline std::string format12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline Space space_from_json(const json& j) {
  detail::expect_object(j, "space");
  const auto& type = detail::require_field(j, "type", "space");
  if (!type.is_string()) fail(ErrorCode::MalformedInput, "space.type must be a string");
  const auto kind = type.get<std::string>();
  if (kind == "normed") {
    detail::reject_unknown_fields(j, {"type", "dim", "p"}, "space");
    const auto& dim = detail::require_field(j, "dim", "space");
    if (!dim.is_number_integer() || dim.get<long long>() < 1) {
      fail(ErrorCode::InvalidNorm, "space.dim must be a positive integer");
    }
    const auto& pj = detail::require_field(j, "p", "space");
    double p = 0.0;
    if (pj.is_string()) {
      const auto s = pj.get<std::string>();
      if (s != "inf" && s != "INF") fail(ErrorCode::InvalidNorm, "space.p string must be \"inf\"");
      p = kInfNorm;
    } else {
      p = detail::require_number(pj, "space.p");
    }
    return Space::normed(static_cast<std::size_t>(dim.get<long long>()), p);
  }
  if (kind == "finite") {
    detail::reject_unknown_fields(j, {"type", "dist"}, "space");
    return Space::finite(detail::require_matrix(detail::require_field(j, "dist", "space"), "space.dist"));
  }
  fail(ErrorCode::MalformedInput, "space.type must be \"normed\" or \"finite\"");
}

/// Parses and validates a space description such as
/// {"type":"normed","dim":2,"p":2} or {"type":"finite","dist":[[0,1],[1,0]]}.
inline Space parse_space(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::MalformedInput, e.what());
  }
  return space_from_json(j);
}

inline json space_to_json(const Space& space) {
  if (space.is_normed()) {
    const auto& n = space.as_normed();
    json p = std::isinf(n.p) ? json("inf") : json(n.p);
    return json{{"type", "normed"}, {"dim", n.dim}, {"p", p}};
  }
  return json{{"type", "finite"}, {"dist", space.as_finite().dist}};
}

inline Point point_from_json(const Space& space, const json& j) {
  Point p;
  if (j.is_number_integer() && space.is_finite()) {
    if (j.get<long long>() < 0) fail(ErrorCode::IndexOutOfRange, "negative point index");
    p = Point::index(static_cast<std::size_t>(j.get<long long>()));
  } else if (j.is_array()) {
    p = Point::coords(detail::require_vector(j, "point"));
  } else {
    fail(ErrorCode::MalformedInput, "point must be a coordinate array or an index");
  }
  space.check_point(p);
  return p;
}

inline json point_to_json(const Point& p, bool round = false) {
  if (p.is_index()) return json(p.index());
  json arr = json::array();
  for (double v : p.coordinates()) arr.push_back(round ? round12(v) : v);
  return arr;
}

inline DiscreteMeasure measure_from_json(const json& j, DuplicatePolicy duplicates = DuplicatePolicy::Reject) {
  detail::expect_object(j, "measure");
  detail::reject_unknown_fields(j, {"space", "atoms"}, "measure");
  const Space space = space_from_json(detail::require_field(j, "space", "measure"));
  const auto& atoms_json = detail::require_field(j, "atoms", "measure");
  if (!atoms_json.is_array()) fail(ErrorCode::MalformedInput, "measure.atoms must be an array");
  std::vector<Atom> atoms;
  for (const auto& a : atoms_json) {
    detail::expect_object(a, "atom");
    detail::reject_unknown_fields(a, {"point", "weight"}, "atom");
    atoms.push_back(Atom{point_from_json(space, detail::require_field(a, "point", "atom")),
                         detail::require_number(detail::require_field(a, "weight", "atom"), "atom.weight")});
  }
  return make_measure(space, std::move(atoms), duplicates);
}

inline json measure_to_json(const DiscreteMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms()) atoms.push_back(json{{"point", point_to_json(a.point)}, {"weight", a.weight}});
  return json{{"space", space_to_json(mu.space())}, {"atoms", atoms}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::MalformedInput, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::MalformedInput, path + ": " + e.what());
  }
}

inline DiscreteMeasure read_measure_file(const std::string& path) { return measure_from_json(read_json_file(path)); }

}  // namespace lpm
