// conic-transport - measure transport for cone geometries
// Copyright 2026 The conic-transport Contributors
// Licensed under Apache 2.0
//
// Command-line surface: cost evaluation, region sampling, pseudo-cone
// queries, monotonicity checks, the Rochet construction, the discrete Gauss
// image solver, and cross-section export.
//
// Exit codes: 0 success, 1 verification failure, 2 construction/domain
// error, 3 I/O or schema error.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "conic_transport/gauss_image.hpp"
#include "conic_transport/io.hpp"
#include "conic_transport/pseudo_cone.hpp"
#include "conic_transport/rochet.hpp"
#include "conic_transport/transport.hpp"

namespace ct = conic_transport;

namespace {

struct Tolerances {
  double monotone = ct::kMonotoneTolerance;
  double subdiff = 1e-8;
};

Tolerances parse_tolerances(const std::vector<std::string>& overrides) {
  Tolerances t;
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ct::SchemaError("--tol expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const double value = std::stod(kv.substr(eq + 1));
    if (!(value > 0.0)) throw ct::SchemaError("--tol " + key + " must be positive");
    if (key == "monotone")
      t.monotone = value;
    else if (key == "subdiff")
      t.subdiff = value;
    else
      throw ct::SchemaError("--tol: unknown tolerance '" + key + "'");
  }
  return t;
}

ct::UnitVector parse_vector_arg(const std::string& csv) {
  std::vector<double> coords;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) coords.push_back(std::stod(item));
  return ct::UnitVector(std::move(coords));
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text;
  else
    ct::write_text_file(out_path, text);
}

ct::PseudoCone load_pseudo_cone(const std::string& path) {
  const ct::Json j = ct::load_json_file(path);
  if (j.is_object() && j.contains("pseudo_cone")) {
    ct::io_detail::check_keys(j, "build-cone document", {"pseudo_cone"},
                              {"a", "b", "verify"});
    return ct::pseudo_cone_from_json(j.at("pseudo_cone"));
  }
  return ct::pseudo_cone_from_json(j);
}

int run(int argc, char** argv) {
  CLI::App app{"conic-transport: discrete optimal transport on cone geometries"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "random seed (fallback: CONIC_TRANSPORT_SEED)")
      ->envname("CONIC_TRANSPORT_SEED");
  std::vector<std::string> tol_overrides;
  app.add_option("--tol", tol_overrides, "tolerance override key=value (monotone, subdiff)");

  // cost
  auto* cost_cmd = app.add_subcommand("cost", "evaluate log|<u,v>| for one pair");
  std::string cone_path, u_arg, v_arg;
  cost_cmd->add_option("--cone", cone_path, "cone JSON file")->required();
  cost_cmd->add_option("--u", u_arg, "u coordinates, comma separated")->required();
  cost_cmd->add_option("--v", v_arg, "v coordinates, comma separated")->required();

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "sample unit vectors from a region");
  std::string sample_cone, sample_region_name = "omega_c", sample_out;
  std::size_t sample_count = 1;
  sample_cmd->add_option("--cone", sample_cone, "cone JSON file")->required();
  sample_cmd->add_option("--region", sample_region_name, "omega_c or omega_c_dual");
  sample_cmd->add_option("--count", sample_count, "number of samples")->required();
  sample_cmd->add_option("--out", sample_out, "output file (default: stdout)");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "radial/support/alpha_star queries as CSV");
  std::string eval_cone, eval_queries, eval_out;
  eval_cmd->add_option("--pseudo-cone", eval_cone, "pseudo-cone JSON file")->required();
  eval_cmd->add_option("--queries", eval_queries, "query JSON file")->required();
  eval_cmd->add_option("--out", eval_out, "output CSV (default: stdout)");

  // check-monotone
  auto* mono_cmd = app.add_subcommand("check-monotone", "c-cyclic monotonicity check");
  std::string mono_pairs, mono_cone, mono_method = "cycles", mono_out;
  mono_cmd->add_option("--pairs", mono_pairs, "pairing JSON file")->required();
  mono_cmd->add_option("--cone", mono_cone, "cone JSON file")->required();
  mono_cmd->add_option("--method", mono_method, "brute or cycles");
  mono_cmd->add_option("--out", mono_out, "report file (default: stdout)");

  // build-cone
  auto* build_cmd = app.add_subcommand("build-cone", "Rochet construction from a pairing");
  std::string build_pairs, build_cone_path, build_out;
  std::size_t build_base = 0;
  build_cmd->add_option("--pairs", build_pairs, "pairing JSON file")->required();
  build_cmd->add_option("--cone", build_cone_path, "cone JSON file")->required();
  build_cmd->add_option("--base", build_base, "base pair index");
  build_cmd->add_option("--out", build_out, "output file (default: stdout)");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "discrete Gauss image problem");
  std::string solve_mu, solve_nu, solve_out;
  std::size_t solve_certify = 0;
  solve_cmd->add_option("--mu", solve_mu, "source measure JSON")->required();
  solve_cmd->add_option("--nu", solve_nu, "target measure JSON")->required();
  solve_cmd->add_option("--out", solve_out, "solution file (default: stdout)");
  solve_cmd->add_option("--certify", solve_certify, "competitor trials for certification");

  // compare-costs
  auto* cmp_cmd = app.add_subcommand("compare-costs", "evaluate a transport map vs optimum");
  std::string cmp_sol, cmp_map;
  cmp_cmd->add_option("--sol", cmp_sol, "solution JSON from solve")->required();
  cmp_cmd->add_option("--map", cmp_map, "map JSON {\"assign\":[...]}")->required();

  // export-section
  auto* sec_cmd = app.add_subcommand("export-section", "planar cross section of bd K");
  std::string sec_cone, sec_plane, sec_out;
  std::size_t sec_resolution = 256;
  double sec_clip = 0.0;
  sec_cmd->add_option("--pseudo-cone", sec_cone, "pseudo-cone JSON file")->required();
  sec_cmd->add_option("--plane", sec_plane, "plane JSON {point, basis}")->required();
  sec_cmd->add_option("--resolution", sec_resolution, "points along the trace");
  sec_cmd->add_option("--clip", sec_clip, "clip radius for unbounded directions");
  sec_cmd->add_option("--out", sec_out, "output CSV (default: stdout)");

  CLI11_PARSE(app, argc, argv);
  const Tolerances tol = parse_tolerances(tol_overrides);

  if (cost_cmd->parsed()) {
    const ct::ConeSpec cone = ct::cone_from_json(ct::load_json_file(cone_path));
    const double c = ct::cost(parse_vector_arg(u_arg), parse_vector_arg(v_arg), cone);
    std::cout << ct::format_double(c) << "\n";
    return 0;
  }

  if (sample_cmd->parsed()) {
    const ct::ConeSpec cone = ct::cone_from_json(ct::load_json_file(sample_cone));
    ct::RegionKind kind;
    if (sample_region_name == "omega_c")
      kind = ct::RegionKind::OmegaC;
    else if (sample_region_name == "omega_c_dual")
      kind = ct::RegionKind::OmegaCDual;
    else
      throw ct::SchemaError("--region must be omega_c or omega_c_dual");
    const auto samples =
        ct::sample_region(ct::SphericalRegion(kind, cone), sample_count, seed);
    ct::Json j;
    j["region"] = sample_region_name;
    j["seed"] = seed;
    ct::Json arr = ct::Json::array();
    for (const auto& s : samples) arr.push_back(s.coords());
    j["samples"] = arr;
    emit(sample_out, j.dump(2) + "\n");
    return 0;
  }

  if (eval_cmd->parsed()) {
    const ct::PseudoCone K = load_pseudo_cone(eval_cone);
    const ct::Json q = ct::load_json_file(eval_queries);
    ct::io_detail::check_keys(q, "queries", {"queries"});
    std::string csv = "kind,query,value\n";
    for (const auto& jq : q.at("queries")) {
      ct::io_detail::check_keys(jq, "query", {"kind", "p"});
      const std::string kind = jq.at("kind").get<std::string>();
      ct::UnitVector p(ct::io_detail::parse_coords(jq.at("p"), "query.p"));
      const std::string pstr = ct::format_coords(p.coords());
      if (kind == "radial") {
        csv += "radial," + pstr + "," + ct::format_double(ct::radial(K, p)) + "\n";
      } else if (kind == "support") {
        csv += "support," + pstr + "," + ct::format_double(ct::support_abs(K, p)) + "\n";
      } else if (kind == "alpha_star") {
        const ct::GaussImage img = ct::reverse_gauss(K, p);
        csv += "alpha_star," + pstr + "," + ct::format_coords(img.candidates[0].coords()) + "\n";
        for (std::size_t k = 1; k < img.candidates.size(); ++k)
          csv += "alpha_star_alt," + pstr + "," +
                 ct::format_coords(img.candidates[k].coords()) + "\n";
      } else {
        throw ct::SchemaError("query kind must be radial, support, or alpha_star");
      }
    }
    emit(eval_out, csv);
    return 0;
  }

  if (mono_cmd->parsed()) {
    const ct::ConeSpec cone = ct::cone_from_json(ct::load_json_file(mono_cone));
    const ct::Pairing S = ct::pairing_from_json(ct::load_json_file(mono_pairs));
    ct::MonotonicityReport rep;
    if (mono_method == "brute")
      rep = ct::check_monotone_bruteforce_report(S, cone, tol.monotone);
    else if (mono_method == "cycles")
      rep = ct::check_monotone_cycles_report(S, cone, tol.monotone);
    else
      throw ct::SchemaError("--method must be brute or cycles");
    emit(mono_out, ct::monotonicity_report_to_json(rep, mono_method).dump(2) + "\n");
    return rep.monotone ? 0 : 1;
  }

  if (build_cmd->parsed()) {
    const ct::ConeSpec cone = ct::cone_from_json(ct::load_json_file(build_cone_path));
    const ct::Pairing S = ct::pairing_from_json(ct::load_json_file(build_pairs));
    const ct::RochetPotential P = ct::build_potential(S, build_base, cone);
    const ct::PseudoCone K = ct::build_cone(P, S, cone);
    const ct::ContainmentReport rep = ct::verify_containment(S, K, tol.subdiff);
    ct::Json j;
    j["pseudo_cone"] = ct::pseudo_cone_to_json(K);
    j["a"] = P.a;
    j["b"] = P.b;
    j["verify"] = ct::containment_report_to_json(rep);
    emit(build_out, j.dump(2) + "\n");
    return rep.ok ? 0 : 1;
  }

  if (solve_cmd->parsed()) {
    const ct::DiscreteMeasure mu = ct::measure_from_json(ct::load_json_file(solve_mu));
    const ct::DiscreteMeasure nu = ct::measure_from_json(ct::load_json_file(solve_nu));
    const ct::GaussImageSolution sol = ct::solve_gauss_image(mu, nu);
    ct::Json j = ct::solution_to_json(sol);
    j["pushforward"] = ct::pushforward_report_to_json(ct::pushforward_report(sol));
    if (solve_certify > 0)
      j["certification"] =
          ct::optimality_report_to_json(ct::certify_optimality(sol, solve_certify, seed));
    emit(solve_out, j.dump(2) + "\n");
    return 0;
  }

  if (cmp_cmd->parsed()) {
    const ct::GaussImageSolution sol = ct::solution_from_json(ct::load_json_file(cmp_sol));
    const ct::Json jm = ct::load_json_file(cmp_map);
    ct::io_detail::check_keys(jm, "map", {"assign"});
    const auto assign = jm.at("assign").get<std::vector<std::size_t>>();
    if (assign.size() != sol.mu.size())
      throw ct::SchemaError("map: assign length must match the mu atom count");
    std::vector<double> pushed(sol.nu.size(), 0.0);
    double map_cost = 0.0;
    const auto C = ct::cost_matrix(sol.mu, sol.nu);
    for (std::size_t j = 0; j < assign.size(); ++j) {
      if (assign[j] >= sol.nu.size()) throw ct::SchemaError("map: target index out of range");
      pushed[assign[j]] += sol.mu.weight(j);
      map_cost += sol.mu.weight(j) * C[j][assign[j]];
    }
    bool feasible = true;
    for (std::size_t i = 0; i < sol.nu.size(); ++i)
      feasible = feasible && std::abs(pushed[i] - sol.nu.weight(i)) <= 1e-9;
    ct::Json j;
    j["feasible"] = feasible;
    j["map_cost"] = map_cost;
    j["optimal_cost"] = sol.total_cost;
    j["gap"] = map_cost - sol.total_cost;
    std::cout << j.dump(2) << "\n";
    return feasible ? 0 : 1;
  }

  if (sec_cmd->parsed()) {
    const ct::PseudoCone K = load_pseudo_cone(sec_cone);
    const ct::Json jp = ct::load_json_file(sec_plane);
    ct::io_detail::check_keys(jp, "plane", {"point", "basis"});
    const auto& jb = jp.at("basis");
    if (!jb.is_array() || jb.size() != 2)
      throw ct::SchemaError("plane: basis must hold exactly two vectors");
    ct::SectionPlane plane{ct::io_detail::parse_coords(jp.at("point"), "plane.point"),
                           ct::io_detail::parse_coords(jb[0], "plane.basis[0]"),
                           ct::io_detail::parse_coords(jb[1], "plane.basis[1]")};
    const auto pts = ct::export_section(K, plane, sec_resolution, sec_clip);
    emit(sec_out, ct::section_to_csv(pts));
    return 0;
  }

  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ct::NotMonotone& e) {
    ct::Json j;
    j["error"] = "not_monotone";
    j["message"] = e.what();
    j["cycle"] = e.cycle();
    j["cycle_weight"] = e.cycle_weight();
    std::cout << j.dump(2) << "\n";
    return 2;
  } catch (const ct::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 3;
  } catch (const ct::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
