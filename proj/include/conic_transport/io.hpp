// conic-transport - measure transport for cone geometries
// Copyright 2026 The conic-transport Contributors
// Licensed under Apache 2.0

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "conic_transport/errors.hpp"
#include "conic_transport/gauss_image.hpp"
#include "conic_transport/geometry.hpp"
#include "conic_transport/pseudo_cone.hpp"
#include "conic_transport/rochet.hpp"
#include "conic_transport/transport.hpp"

namespace conic_transport {

using Json = nlohmann::json;

namespace io_detail {

inline void require_object(const Json& j, const char* what) {
  if (!j.is_object()) throw SchemaError(std::string(what) + ": expected a JSON object");
}

// Strict field policy: every listed required key present, nothing else
// except the listed optional keys.
inline void check_keys(const Json& j, const char* what,
                       std::initializer_list<const char*> required,
                       std::initializer_list<const char*> optional = {}) {
  require_object(j, what);
  for (const char* k : required)
    if (!j.contains(k))
      throw SchemaError(std::string(what) + ": missing field '" + k + "'");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = false;
    for (const char* k : required)
      if (key == k) { known = true; break; }
    for (const char* k : optional)
      if (key == k) { known = true; break; }
    if (!known) throw SchemaError(std::string(what) + ": unknown field '" + key + "'");
  }
}

inline vec::Vector parse_coords(const Json& j, const char* what) {
  if (!j.is_array() || j.size() < 2)
    throw SchemaError(std::string(what) + ": expected an array of >= 2 numbers");
  vec::Vector v;
  for (const auto& x : j) {
    if (!x.is_number()) throw SchemaError(std::string(what) + ": expected numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace io_detail

inline Json cone_to_json(const ConeSpec& cone) {
  Json j;
  j["dim"] = cone.dim();
  if (cone.is_circular()) {
    j["variant"] = "circular";
    j["axis"] = cone.circular_data().axis.coords();
    j["half_angle"] = cone.circular_data().half_angle;
  } else {
    j["variant"] = "polyhedral";
    Json gens = Json::array();
    for (const auto& g : cone.polyhedral_data().generators) gens.push_back(g.coords());
    j["generators"] = gens;
  }
  return j;
}

inline ConeSpec cone_from_json(const Json& j) {
  io_detail::require_object(j, "cone");
  const std::string variant = j.value("variant", "");
  if (variant == "circular") {
    io_detail::check_keys(j, "cone", {"variant", "axis", "half_angle", "dim"});
    UnitVector axis(io_detail::parse_coords(j.at("axis"), "cone.axis"));
    ConeSpec cone = ConeSpec::circular(std::move(axis), j.at("half_angle").get<double>());
    if (j.at("dim").get<std::size_t>() != cone.dim())
      throw SchemaError("cone: dim does not match axis length");
    return cone;
  }
  if (variant == "polyhedral") {
    io_detail::check_keys(j, "cone", {"variant", "generators", "dim"});
    std::vector<UnitVector> gens;
    for (const auto& g : j.at("generators"))
      gens.push_back(UnitVector(io_detail::parse_coords(g, "cone.generators[]")));
    ConeSpec cone = ConeSpec::polyhedral(std::move(gens));
    if (j.at("dim").get<std::size_t>() != cone.dim())
      throw SchemaError("cone: dim does not match generator length");
    return cone;
  }
  throw SchemaError("cone: variant must be 'circular' or 'polyhedral'");
}

inline Json pseudo_cone_to_json(const PseudoCone& K) {
  Json j;
  j["cone"] = cone_to_json(K.cone());
  Json facets = Json::array();
  for (const auto& f : K.facets()) {
    Json jf;
    jf["u"] = f.normal.coords();
    jf["b"] = f.offset;
    facets.push_back(jf);
  }
  j["facets"] = facets;
  return j;
}

inline PseudoCone pseudo_cone_from_json(const Json& j) {
  io_detail::check_keys(j, "pseudo_cone", {"cone", "facets"});
  ConeSpec cone = cone_from_json(j.at("cone"));
  std::vector<Facet> facets;
  for (const auto& jf : j.at("facets")) {
    io_detail::check_keys(jf, "facet", {"u", "b"});
    facets.push_back({UnitVector(io_detail::parse_coords(jf.at("u"), "facet.u")),
                      jf.at("b").get<double>()});
  }
  return PseudoCone(std::move(cone), std::move(facets));
}

inline Json measure_to_json(const DiscreteMeasure& m) {
  Json j;
  j["region"] = m.region().which() == RegionKind::OmegaC ? "omega_c" : "omega_c_dual";
  j["cone"] = cone_to_json(m.region().cone());
  Json atoms = Json::array();
  for (const auto& a : m.atoms()) {
    Json ja;
    ja["p"] = a.point.coords();
    ja["w"] = a.weight;
    atoms.push_back(ja);
  }
  j["atoms"] = atoms;
  return j;
}

inline DiscreteMeasure measure_from_json(const Json& j) {
  io_detail::check_keys(j, "measure", {"region", "cone", "atoms"});
  const std::string region = j.at("region").get<std::string>();
  RegionKind kind;
  if (region == "omega_c")
    kind = RegionKind::OmegaC;
  else if (region == "omega_c_dual")
    kind = RegionKind::OmegaCDual;
  else
    throw SchemaError("measure: region must be 'omega_c' or 'omega_c_dual'");
  ConeSpec cone = cone_from_json(j.at("cone"));
  std::vector<Atom> atoms;
  for (const auto& ja : j.at("atoms")) {
    io_detail::check_keys(ja, "atom", {"p", "w"});
    atoms.push_back({UnitVector(io_detail::parse_coords(ja.at("p"), "atom.p")),
                     ja.at("w").get<double>()});
  }
  return DiscreteMeasure(SphericalRegion(kind, std::move(cone)), std::move(atoms));
}

inline Json pairing_to_json(const Pairing& S) {
  Json pairs = Json::array();
  for (const auto& p : S.pairs()) {
    Json jp;
    jp["v"] = p.v.coords();
    jp["u"] = p.u.coords();
    pairs.push_back(jp);
  }
  Json j;
  j["pairs"] = pairs;
  return j;
}

inline Pairing pairing_from_json(const Json& j) {
  io_detail::check_keys(j, "pairing", {"pairs"});
  std::vector<VUPair> pairs;
  for (const auto& jp : j.at("pairs")) {
    io_detail::check_keys(jp, "pair", {"v", "u"});
    pairs.push_back({UnitVector(io_detail::parse_coords(jp.at("v"), "pair.v")),
                     UnitVector(io_detail::parse_coords(jp.at("u"), "pair.u"))});
  }
  return Pairing(std::move(pairs));
}

inline Json plan_to_json(const TransportPlan& plan, const DualPotentials& duals,
                         double total_cost) {
  Json entries = Json::array();
  for (const auto& e : plan.entries()) {
    Json je;
    je["j"] = e.source;
    je["i"] = e.target;
    je["mass"] = e.mass;
    entries.push_back(je);
  }
  Json j;
  j["entries"] = entries;
  j["total_cost"] = total_cost;
  j["phi"] = duals.phi;
  j["psi"] = duals.psi;
  return j;
}

struct PlanDocument {
  TransportPlan plan;
  DualPotentials potentials;
  double total_cost = 0.0;
};

inline PlanDocument plan_from_json(const Json& j, std::size_t sources, std::size_t targets) {
  io_detail::check_keys(j, "plan", {"entries", "total_cost", "phi", "psi"});
  std::vector<PlanEntry> entries;
  for (const auto& je : j.at("entries")) {
    io_detail::check_keys(je, "plan.entry", {"j", "i", "mass"});
    entries.push_back({je.at("j").get<std::size_t>(), je.at("i").get<std::size_t>(),
                       je.at("mass").get<double>()});
  }
  DualPotentials duals{j.at("phi").get<std::vector<double>>(),
                       j.at("psi").get<std::vector<double>>()};
  return {TransportPlan(sources, targets, std::move(entries)), std::move(duals),
          j.at("total_cost").get<double>()};
}

inline Json monotonicity_report_to_json(const MonotonicityReport& rep,
                                        const std::string& method) {
  Json j;
  j["method"] = method;
  j["monotone"] = rep.monotone;
  if (std::isfinite(rep.worst_gap))
    j["worst_gap"] = rep.worst_gap;
  else
    j["worst_gap"] = nullptr;
  j["worst_cycle"] = rep.worst_cycle;
  return j;
}

inline Json containment_report_to_json(const ContainmentReport& rep) {
  Json per_pair = Json::array();
  for (const auto& p : rep.per_pair) {
    Json jp;
    jp["ok"] = p.ok;
    jp["gap"] = p.gap;
    per_pair.push_back(jp);
  }
  Json j;
  j["ok"] = rep.ok;
  j["worst_violation"] = rep.worst_violation;
  j["per_pair"] = per_pair;
  return j;
}

inline Json solution_to_json(const GaussImageSolution& sol) {
  Json j;
  j["mu"] = measure_to_json(sol.mu);
  j["nu"] = measure_to_json(sol.nu);
  j["pseudo_cone"] = pseudo_cone_to_json(sol.cone_K);
  j["plan"] = plan_to_json(sol.plan, sol.potentials, sol.total_cost);
  Json support = Json::array();
  for (const auto& e : sol.plan.entries()) {
    Json jp;
    jp["v"] = sol.nu.point(e.target).coords();
    jp["u"] = sol.mu.point(e.source).coords();
    support.push_back(jp);
  }
  j["support_pairs"] = support;
  return j;
}

struct SolutionDocument {
  GaussImageSolution solution;
};

inline GaussImageSolution solution_from_json(const Json& j) {
  io_detail::check_keys(j, "solution", {"mu", "nu", "pseudo_cone", "plan", "support_pairs"},
                        {"certification", "pushforward"});
  DiscreteMeasure mu = measure_from_json(j.at("mu"));
  DiscreteMeasure nu = measure_from_json(j.at("nu"));
  PseudoCone K = pseudo_cone_from_json(j.at("pseudo_cone"));
  PlanDocument plan = plan_from_json(j.at("plan"), mu.size(), nu.size());
  return {std::move(mu),   std::move(nu),          std::move(K),
          std::move(plan.plan), std::move(plan.potentials), plan.total_cost};
}

inline Json optimality_report_to_json(const OptimalityReport& rep) {
  Json j;
  j["plan_trials"] = rep.plan_trials;
  j["map_trials"] = rep.map_trials;
  if (std::isfinite(rep.min_gap))
    j["min_gap"] = rep.min_gap;
  else
    j["min_gap"] = nullptr;
  j["ok"] = rep.ok;
  return j;
}

inline Json pushforward_report_to_json(const PushforwardReport& rep) {
  Json j;
  j["per_target_mass"] = rep.per_target_mass;
  j["tv_gap"] = rep.tv_gap;
  j["targets_per_source"] = rep.targets_per_source;
  j["split_sources"] = rep.split_sources;
  j["merged_sources"] = rep.merged_sources;
  return j;
}

/// Fixed float formatting for CSV artifacts (17 significant digits).
inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string format_coords(const vec::Vector& v, char sep = ';') {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(sep);
    out += format_double(v[i]);
  }
  return out;
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw SchemaError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write file: " + path);
  out << text;
}

// ---------------------------------------------------------------------------
// Planar cross sections of bd K for plotting.

struct SectionPlane {
  vec::Vector point;
  vec::Vector basis1;
  vec::Vector basis2;
};

struct SectionPoint {
  double s = 0.0;
  double t = 0.0;
  std::string label;  // "facet_<i>", "cone", or "clip"
};

namespace io_detail {

inline std::string classify_boundary(const PseudoCone& K, const vec::Vector& x) {
  double best = std::numeric_limits<double>::infinity();
  std::string label = "cone";
  const double nx = vec::norm(x);
  for (std::size_t i = 0; i < K.facet_count(); ++i) {
    const double slack =
        std::abs(-K.facets()[i].offset - vec::dot(x, K.facets()[i].normal.coords()));
    if (slack < best) {
      best = slack;
      label = "facet_" + std::to_string(i);
    }
  }
  double cone_slack;
  if (K.cone().is_circular()) {
    const auto& c = K.cone().circular_data();
    cone_slack = std::abs(vec::dot(x, c.axis.coords()) - nx * std::cos(c.half_angle));
  } else {
    cone_slack = std::numeric_limits<double>::infinity();
    for (const auto& w : K.cone().facet_normals())
      cone_slack = std::min(cone_slack, std::abs(vec::dot(x, w.coords())));
  }
  return cone_slack < best ? "cone" : label;
}

}  // namespace io_detail

/// Traces bd K ∩ plane as a polyline by marching `resolution` rays from an
/// interior point of the section; unbounded directions stop at the clip
/// radius and are labeled "clip".
inline std::vector<SectionPoint> export_section(const PseudoCone& K,
                                                const SectionPlane& plane,
                                                std::size_t resolution,
                                                double clip_radius = 0.0) {
  const std::size_t n = K.cone().dim();
  if (n != 2 && n != 3)
    throw UnsupportedDimension("export_section: requires n=2 or n=3");
  if (resolution < 8) throw DomainError("export_section: resolution must be >= 8");
  if (plane.point.size() != n || plane.basis1.size() != n || plane.basis2.size() != n)
    throw DomainError("export_section: plane dimension mismatch");
  auto embed = [&](double s, double t) {
    vec::Vector x = plane.point;
    x = vec::axpy(s, plane.basis1, x);
    x = vec::axpy(t, plane.basis2, x);
    return x;
  };
  double max_b = 0.0;
  for (const auto& f : K.facets()) max_b = std::max(max_b, f.offset);
  const double scale = 1.0 + vec::norm(plane.point) + 10.0 * max_b;
  if (clip_radius <= 0.0) clip_radius = 4.0 * scale;

  // interior point of the section: centroid of feasible grid samples
  double cs = 0.0, ct = 0.0;
  std::size_t hits = 0;
  for (const double radius : {scale / 64.0, scale / 16.0, scale / 4.0, scale}) {
    for (int a = -24; a <= 24; ++a)
      for (int b = -24; b <= 24; ++b) {
        const double s = radius * a / 24.0, t = radius * b / 24.0;
        if (contains(K, embed(s, t))) {
          cs += s;
          ct += t;
          ++hits;
        }
      }
    if (hits > 0) break;
  }
  if (hits == 0) throw EmptySection("export_section: plane misses the body");
  cs /= static_cast<double>(hits);
  ct /= static_cast<double>(hits);

  std::vector<SectionPoint> out;
  out.reserve(resolution);
  for (std::size_t k = 0; k < resolution; ++k) {
    const double ang = 6.283185307179586 * static_cast<double>(k) /
                       static_cast<double>(resolution);
    const double ds = std::cos(ang), dt = std::sin(ang);
    if (contains(K, embed(cs + clip_radius * ds, ct + clip_radius * dt))) {
      out.push_back({cs + clip_radius * ds, ct + clip_radius * dt, "clip"});
      continue;
    }
    double lo = 0.0, hi = clip_radius;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (contains(K, embed(cs + mid * ds, ct + mid * dt)))
        lo = mid;
      else
        hi = mid;
    }
    const double r = 0.5 * (lo + hi);
    const vec::Vector x = embed(cs + r * ds, ct + r * dt);
    out.push_back({cs + r * ds, ct + r * dt, io_detail::classify_boundary(K, x)});
  }
  return out;
}

inline std::string section_to_csv(const std::vector<SectionPoint>& pts) {
  std::string csv = "s,t,label\n";
  for (const auto& p : pts)
    csv += format_double(p.s) + "," + format_double(p.t) + "," + p.label + "\n";
  return csv;
}

}  // namespace conic_transport
