#pragma once

// JSON encodings of tensors, graphs, labelings, relations, symmetry
// generators and results (nlohmann::json).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tensorbounds/errors.hpp"
#include "tensorbounds/exponent.hpp"
#include "tensorbounds/graph.hpp"
#include "tensorbounds/relations.hpp"
#include "tensorbounds/restriction_lab.hpp"
#include "tensorbounds/subrank.hpp"
#include "tensorbounds/tensor.hpp"
#include "tensorbounds/tightness.hpp"

namespace tb::io {

using Json = nlohmann::ordered_json;

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument("malformed JSON in '" + path + "': " + e.what());
  }
}

namespace detail {

template <class T>
T get(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidArgument(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("bad field '") + key + "': " + e.what());
  }
}

}  // namespace detail

// --- tensors -----------------------------------------------------------------

inline Json to_json(const SparseTensor& t) {
  Json entries = Json::array();
  for (std::size_t n = 0; n < t.size(); ++n) entries.push_back({{"point", t.point(n)}, {"coeff", to_string(t.coeff(n))}});
  return {{"arity", t.arity()}, {"dims", t.dims()}, {"entries", entries}};
}

inline SparseTensor tensor_from_json(const Json& j) {
  const auto arity = detail::get<std::size_t>(j, "arity");
  const auto dims = detail::get<std::vector<Index>>(j, "dims");
  if (dims.size() != arity) throw InvalidArgument("dims length does not match arity");
  const auto& entries = j.at("entries");
  if (!entries.is_array()) throw InvalidArgument("entries must be an array");
  std::vector<std::pair<Point, Rational>> e;
  for (const auto& x : entries) {
    auto p = detail::get<Point>(x, "point");
    Rational c = 1;
    if (x.contains("coeff")) {
      const auto& cj = x.at("coeff");
      if (cj.is_string()) c = parse_rational(cj.get<std::string>());
      else if (cj.is_number_integer()) c = Rational(cj.get<long>());
      else throw InvalidArgument("coeff must be an integer or a \"p/q\" string");
    }
    e.emplace_back(std::move(p), c);
  }
  return SparseTensor(dims, std::move(e));
}

inline Graph graph_from_json(const Json& j) {
  const auto n = detail::get<std::size_t>(j, "vertices");
  const auto edges = detail::get<std::vector<std::vector<std::size_t>>>(j, "edges");
  std::vector<Graph::Edge> e;
  for (const auto& x : edges) {
    if (x.size() != 2) throw InvalidArgument("edges must be pairs");
    e.emplace_back(x[0], x[1]);
  }
  return Graph(n, std::move(e));
}

inline Json to_json(const Graph& g) {
  Json edges = Json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back({u, v});
  return {{"vertices", g.vertex_count()}, {"edges", edges}};
}

inline Labeling labeling_from_json(const Json& j) {
  try {
    return j.get<Labeling>();
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("labeling must be an array of integer arrays: ") + e.what());
  }
}

inline Json to_json(const EquivRelation& r) { return {{"axis", r.axis}, {"classes", r.classes}}; }

inline std::vector<SymmetryGenerator> generators_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("symmetry must be an array of generators");
  std::vector<SymmetryGenerator> out;
  for (const auto& g : j) {
    SymmetryGenerator s;
    s.leg_perm = detail::get<std::vector<std::size_t>>(g, "leg_perm");
    if (g.contains("symbol_maps")) s.symbol_maps = detail::get<std::vector<std::vector<Index>>>(g, "symbol_maps");
    out.push_back(std::move(s));
  }
  return out;
}

// --- number formatting -------------------------------------------------------

/// Decimal rounding used for printed floats; 0 digits means full precision.
struct Precision {
  int digits = 6;
  double operator()(double x) const {
    if (digits <= 0 || !std::isfinite(x)) return x;
    const double s = std::pow(10.0, digits);
    const double r = std::round(x * s) / s;
    return r == 0 ? 0.0 : r;
  }
};

/// Recognizes a few closed forms: integers, h(1/k), log2(p/q) and log2(p/q)/d.
inline std::optional<std::string> closed_form(double x, double tol = 1e-9) {
  if (!std::isfinite(x)) return std::nullopt;
  if (std::abs(x - std::round(x)) < tol) return std::to_string(static_cast<long long>(std::round(x)));
  for (int k = 3; k <= 64; ++k)
    if (std::abs(x - binary_entropy(1.0 / k)) < tol) return "h(1/" + std::to_string(k) + ")";
  for (int d = 1; d <= 6; ++d)
    for (int q = 1; q <= 64; ++q)
      for (int p = 1; p <= 64; ++p) {
        if (std::gcd(p, q) != 1 || p == q) continue;
        if (std::abs(x * d - std::log2(static_cast<double>(p) / q)) < tol) {
          std::string s = q == 1 ? "log2(" + std::to_string(p) + ")" : "log2(" + std::to_string(p) + "/" + std::to_string(q) + ")";
          return d == 1 ? s : s + "/" + std::to_string(d);
        }
      }
  return std::nullopt;
}

inline Json closed_form_json(double x) {
  auto c = closed_form(x);
  return c ? Json(*c) : Json(nullptr);
}

inline Json rounded(const std::vector<double>& v, const Precision& pr) {
  Json a = Json::array();
  for (double x : v) a.push_back(pr(x));
  return a;
}

// --- results -----------------------------------------------------------------

inline Json to_json(const RelationEval& e, const Precision& pr) {
  return {{"axis", e.relation.axis},   {"classes", e.relation.classes}, {"rank", e.rank},
          {"max_hq", pr(e.max_hq)},    {"dual_gap", e.dual_gap},        {"penalty", pr(e.penalty)},
          {"penalty_closed_form", closed_form_json(e.penalty)}};
}

/// Certificate: value, witnesses and the distinct (penalty, rank) levels with
/// the bound each would give on its own.
inline Json to_json(const BoundCertificate& c, const Precision& pr) {
  Json j;
  j["bound"] = pr(c.value);
  j["closed_form"] = closed_form_json(c.value);
  j["recomputed_bound"] = pr(c.strategy == "maximin" ? c.value : recompute_bound(c));
  j["arity"] = c.arity;
  j["strategy"] = c.strategy;
  j["h_p"] = pr(c.h_p);
  j["max_penalty"] = pr(c.max_penalty);
  j["relation_count"] = c.relation_count;
  j["enumeration"] = c.strategy == "maximin" ? "none" : to_string(c.enumeration);
  j["symmetry"] = {{"order", c.symmetry_order}, {"applied", c.symmetry_applied}};
  j["worst_relation"] = c.worst ? to_json(c.evaluations[*c.worst], pr) : Json(nullptr);
  Json levels = Json::array();
  const double k2 = c.arity >= 2 ? static_cast<double>(c.arity - 2) : 0.0;
  for (std::size_t i = 0; i < c.evaluations.size();) {
    std::size_t j2 = i;
    while (j2 < c.evaluations.size() && c.evaluations[j2].rank == c.evaluations[i].rank &&
           std::abs(c.evaluations[j2].penalty - c.evaluations[i].penalty) < 1e-9)
      ++j2;
    const double pen = c.evaluations[i].penalty;
    levels.push_back({{"penalty", pr(pen)},
                      {"penalty_closed_form", closed_form_json(pen)},
                      {"rank", c.evaluations[i].rank},
                      {"count", j2 - i},
                      {"bound_if_worst", pr(c.h_p - k2 * pen)},
                      {"bound_if_worst_closed_form", closed_form_json(c.h_p - k2 * pen)}});
    i = j2;
  }
  j["penalty_levels"] = levels;
  j["labeling"] = c.labeling;
  j["p"] = rounded(c.p, pr);
  return j;
}

inline Json to_json(const TableRow& r, const Precision& pr) {
  return {{"k", r.k},
          {"omega_lower", pr(r.omega_lower)},
          {"omega_upper", pr(r.omega_upper)},
          {"edges", r.edges},
          {"tau_lower", pr(r.tau_lower)},
          {"tau_upper", pr(r.tau_upper)},
          {"lower_source", r.lower_source},
          {"upper_source", r.upper_source}};
}

inline Json to_json(const ExperimentReport& r, const Precision& pr) {
  Json trials = Json::array();
  for (const auto& t : r.per_trial)
    trials.push_back({{"trial", t.trial},
                      {"modulus", t.modulus},
                      {"b_size", t.b_size},
                      {"survivors", t.survivors},
                      {"collisions", t.collisions},
                      {"diagonal", t.diagonal},
                      {"rate", pr(t.rate)}});
  Json j;
  j["N"] = r.n;
  j["trials"] = r.trials;
  j["psi_size"] = r.psi_size;
  j["best_rate"] = pr(r.best_rate);
  j["best_size"] = r.best_size;
  j["target_bound"] = r.target_bound ? Json(pr(*r.target_bound)) : Json(nullptr);
  j["per_trial"] = trials;
  return j;
}

}  // namespace tb::io
