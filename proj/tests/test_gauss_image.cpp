// conic-transport - measure transport for cone geometries
// Copyright 2026 The conic-transport Contributors
// Licensed under Apache 2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "conic_transport/gauss_image.hpp"
#include "conic_transport/rochet.hpp"
#include "support/oracles.hpp"

using namespace conic_transport;
using Catch::Approx;

namespace {

const double kPi = 3.14159265358979323846;

ConeSpec quarter2d() { return ConeSpec::circular(UnitVector({0.0, 1.0}), kPi / 4.0); }

DiscreteMeasure one_atom(const ConeSpec& cone, RegionKind kind, UnitVector p) {
  return DiscreteMeasure(SphericalRegion(kind, cone), {{std::move(p), 1.0}});
}

// mu uniform on sampled u_j, nu uniform on the antipodes -u_j (valid for the
// quarter cone, where -Omega_{C_dual} = Omega_C exactly)
std::pair<DiscreteMeasure, DiscreteMeasure> antipodal_pair(const ConeSpec& cone,
                                                           std::size_t count,
                                                           std::uint64_t seed) {
  const SphericalRegion dual_region(RegionKind::OmegaCDual, cone);
  std::vector<UnitVector> us;
  std::uint64_t attempt = seed;
  while (us.size() < count) {
    const auto cand = sample_region(dual_region, 1, attempt++);
    bool close = false;
    for (const auto& u : us)
      if (angular_distance(u, cand[0]) < 1e-3) close = true;
    if (!close) us.push_back(cand[0]);
  }
  std::vector<UnitVector> vs;
  for (const auto& u : us) vs.push_back(negated(u));
  return {oracles::uniform_measure(dual_region, us),
          oracles::uniform_measure(SphericalRegion(RegionKind::OmegaC, cone), vs)};
}

}  // namespace

TEST_CASE("solve_gauss_image on forced 1x1 instances") {
  const ConeSpec c = quarter2d();
  SECTION("antipodal pair: unit facet, zero cost") {
    const auto sol = solve_gauss_image(one_atom(c, RegionKind::OmegaCDual, UnitVector({0.0, -1.0})),
                                       one_atom(c, RegionKind::OmegaC, UnitVector({0.0, 1.0})));
    REQUIRE(sol.cone_K.facet_count() == 1);
    REQUIRE(sol.cone_K.facets()[0].offset == Approx(1.0).margin(1e-15));
    REQUIRE(sol.plan.entries().size() == 1);
    REQUIRE(sol.plan.entries()[0].mass == Approx(1.0));
    REQUIRE(sol.total_cost == Approx(0.0).margin(1e-15));
  }
  SECTION("generic pair: cost log cos 0.6 and contact membership") {
    const UnitVector v({std::sin(0.6), std::cos(0.6)});
    const auto sol = solve_gauss_image(one_atom(c, RegionKind::OmegaCDual, UnitVector({0.0, -1.0})),
                                       one_atom(c, RegionKind::OmegaC, v));
    REQUIRE(sol.total_cost == Approx(std::log(std::cos(0.6))).margin(1e-14));
    REQUIRE(in_pseudo_subdifferential(sol.cone_K, v, UnitVector({0.0, -1.0}), 1e-8));
  }
}

TEST_CASE("solve_gauss_image invariants on random rational instances") {
  SplitMix64 rng(112358);
  for (int trial = 0; trial < 8; ++trial) {
    const ConeSpec cone = oracles::random_circular_cone(2 + trial % 2, rng);
    const auto mu = oracles::random_rational_measure(
        SphericalRegion(RegionKind::OmegaCDual, cone), 4 + trial % 3, rng);
    const auto nu = oracles::random_rational_measure(
        SphericalRegion(RegionKind::OmegaC, cone), 3 + trial % 2, rng);
    const auto sol = solve_gauss_image(mu.measure, nu.measure);

    // facet normals are exactly the mu atoms, gauge max b = 1
    REQUIRE(sol.cone_K.facet_count() == mu.measure.size());
    double max_b = 0.0;
    for (std::size_t j = 0; j < mu.measure.size(); ++j) {
      REQUIRE(angular_distance(sol.cone_K.facets()[j].normal, mu.measure.point(j)) == 0.0);
      max_b = std::max(max_b, sol.cone_K.facets()[j].offset);
      const double phi_max_offset =
          std::exp(sol.potentials.phi[j] -
                   *std::max_element(sol.potentials.phi.begin(), sol.potentials.phi.end()));
      REQUIRE(sol.cone_K.facets()[j].offset == Approx(phi_max_offset).margin(1e-15));
    }
    REQUIRE(max_b == Approx(1.0).margin(1e-15));

    // support entries live in the pseudo-subdifferential
    for (const auto& e : sol.plan.entries())
      REQUIRE(in_pseudo_subdifferential(sol.cone_K, nu.measure.point(e.target),
                                        mu.measure.point(e.source), 1e-8));

    // log radial = -psi + shared constant
    double c0 = 0.0;
    for (std::size_t i = 0; i < nu.measure.size(); ++i) {
      const double c = -std::log(radial(sol.cone_K, nu.measure.point(i))) -
                       sol.potentials.psi[i];
      if (i == 0)
        c0 = c;
      else
        REQUIRE(c == Approx(c0).margin(1e-8));
    }

    // discrete duality chain with equality: sum_j mu_j log hbar(u_j) -
    // sum_i nu_i log rho(v_i) = total cost (constants cancel since both
    // measures have unit mass)
    double lhs = 0.0;
    for (std::size_t j = 0; j < mu.measure.size(); ++j)
      lhs += mu.measure.weight(j) * std::log(sol.cone_K.facets()[j].offset);
    for (std::size_t i = 0; i < nu.measure.size(); ++i)
      lhs -= nu.measure.weight(i) * std::log(radial(sol.cone_K, nu.measure.point(i)));
    REQUIRE(lhs == Approx(sol.total_cost).margin(1e-7));
  }
}

TEST_CASE("solve_gauss_image matches the brute-force oracle at 6x4") {
  SplitMix64 rng(161803);
  const ConeSpec cone = oracles::random_circular_cone(3, rng, kPi / 4.0);
  // unit weights: 6 sources of 1 unit, 4 targets splitting the same 6 units
  const SphericalRegion rd(RegionKind::OmegaCDual, cone);
  const SphericalRegion rc(RegionKind::OmegaC, cone);
  const auto us = sample_region(rd, 6, 21);
  std::vector<Atom> mu_atoms;
  for (const auto& u : us) mu_atoms.push_back({u, 1.0 / 6.0});
  const DiscreteMeasure mu(rd, std::move(mu_atoms));
  const auto vs = sample_region(rc, 4, 22);
  const std::vector<std::size_t> tgt_counts = {2, 2, 1, 1};
  std::vector<Atom> nu_atoms;
  for (std::size_t i = 0; i < 4; ++i)
    nu_atoms.push_back({vs[i], static_cast<double>(tgt_counts[i]) / 6.0});
  const DiscreteMeasure nu(rc, std::move(nu_atoms));

  const auto sol = solve_gauss_image(mu, nu);
  const auto C = cost_matrix(mu, nu);
  std::vector<std::size_t> src_units = {0, 1, 2, 3, 4, 5}, tgt_units;
  for (std::size_t i = 0; i < 4; ++i)
    tgt_units.insert(tgt_units.end(), tgt_counts[i], i);
  REQUIRE(sol.total_cost ==
          Approx(oracles::brute_force_assignment(C, src_units, tgt_units, 6)).margin(1e-12));
}

TEST_CASE("certify_optimality") {
  SplitMix64 rng(271828);
  const ConeSpec cone = quarter2d();
  SECTION("zero trials trivially pass") {
    const auto [mu, nu] = antipodal_pair(cone, 4, 1);
    const auto sol = solve_gauss_image(mu, nu);
    const auto rep = certify_optimality(sol, 0, 7);
    REQUIRE(rep.ok);
    REQUIRE(rep.plan_trials == 0);
  }
  SECTION("antipodal instance: the negation map costs exactly zero") {
    const auto [mu, nu] = antipodal_pair(cone, 8, 3);
    const auto sol = solve_gauss_image(mu, nu);
    // T(u) = -u pairs atom j with target j: a feasible competitor map
    const auto C = cost_matrix(mu, nu);
    double negation_cost = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j)
      negation_cost += mu.weight(j) * C[j][j];
    REQUIRE(negation_cost == Approx(0.0).margin(1e-12));
    REQUIRE(sol.total_cost <= negation_cost + 1e-12);
    REQUIRE(sol.total_cost < -1e-6);  // generic atoms: strictly better than 0
    const auto rep = certify_optimality(sol, 50, 11);
    REQUIRE(rep.ok);
    REQUIRE(rep.min_gap >= -1e-9);
    REQUIRE(rep.map_trials == 50);  // uniform weights expand to a common unit
  }
  SECTION("random 8x5 instance with 50 competitors") {
    const ConeSpec c3 = oracles::random_circular_cone(3, rng);
    const auto mu = oracles::random_rational_measure(
        SphericalRegion(RegionKind::OmegaCDual, c3), 8, rng);
    const auto nu = oracles::random_rational_measure(
        SphericalRegion(RegionKind::OmegaC, c3), 5, rng);
    const auto sol = solve_gauss_image(mu.measure, nu.measure);
    const auto rep = certify_optimality(sol, 50, 13);
    REQUIRE(rep.ok);
    REQUIRE(rep.plan_trials == 50);
    REQUIRE(rep.min_gap >= -1e-9);
  }
}

TEST_CASE("pushforward_report") {
  const ConeSpec cone = quarter2d();
  SECTION("marginals hold to 1e-10 and generic uniform instances do not split") {
    const auto [mu, nu] = antipodal_pair(cone, 6, 17);
    const auto sol = solve_gauss_image(mu, nu);
    const auto rep = pushforward_report(sol);
    REQUIRE(rep.tv_gap <= 1e-10);
    REQUIRE(rep.split_sources == 0);  // permutation plan in generic position
    for (std::size_t i = 0; i < nu.size(); ++i)
      REQUIRE(rep.per_target_mass[i] == Approx(nu.weight(i)).margin(1e-12));
  }
  SECTION("two sources forced onto one target merge") {
    const DiscreteMeasure mu(
        SphericalRegion(RegionKind::OmegaCDual, cone),
        {{UnitVector::normalized({0.1, -1.0}), 0.5}, {UnitVector::normalized({-0.2, -1.0}), 0.5}});
    const auto sol =
        solve_gauss_image(mu, one_atom(cone, RegionKind::OmegaC, UnitVector({0.0, 1.0})));
    const auto rep = pushforward_report(sol);
    REQUIRE(rep.tv_gap <= 1e-10);
    REQUIRE(rep.split_sources == 0);
    REQUIRE(rep.merged_sources == 2);
  }
}

TEST_CASE("dilation gauge: rescaled offsets change no verdicts") {
  SplitMix64 rng(37);
  const ConeSpec cone = oracles::random_circular_cone(3, rng, kPi / 4.0);
  const auto mu = oracles::random_rational_measure(
      SphericalRegion(RegionKind::OmegaCDual, cone), 5, rng);
  const auto nu = oracles::random_rational_measure(
      SphericalRegion(RegionKind::OmegaC, cone), 4, rng);
  const auto sol = solve_gauss_image(mu.measure, nu.measure);
  for (const double lambda : {0.5, 3.0}) {
    const PseudoCone KL = dilate(sol.cone_K, lambda);
    for (const auto& e : sol.plan.entries())
      REQUIRE(in_pseudo_subdifferential(KL, nu.measure.point(e.target),
                                        mu.measure.point(e.source), 1e-8));
    // radial scales exactly; the plan and cost do not involve the dilate
    for (std::size_t i = 0; i < nu.measure.size(); ++i)
      REQUIRE(radial(KL, nu.measure.point(i)) ==
              Approx(lambda * radial(sol.cone_K, nu.measure.point(i))).epsilon(1e-12));
  }
}

TEST_CASE("plan support feeds back through the Rochet construction") {
  SplitMix64 rng(977);
  for (int trial = 0; trial < 4; ++trial) {
    const ConeSpec cone = oracles::random_circular_cone(2 + trial % 2, rng);
    const auto mu = oracles::random_rational_measure(
        SphericalRegion(RegionKind::OmegaCDual, cone), 5, rng);
    const auto nu = oracles::random_rational_measure(
        SphericalRegion(RegionKind::OmegaC, cone), 4, rng);
    const auto sol = solve_gauss_image(mu.measure, nu.measure);

    std::vector<VUPair> support;
    for (const auto& e : sol.plan.entries())
      support.push_back({nu.measure.point(e.target), mu.measure.point(e.source)});
    const Pairing S(std::move(support));
    REQUIRE(check_monotone_cycles(S, cone));

    const RochetPotential P = build_potential(S, 0, cone);
    const PseudoCone R = build_cone(P, S, cone);
    REQUIRE(verify_containment(S, R, 1e-8).ok);
    // within each connected component of the support graph the pairing is
    // tight-connected, so the rebuilt cone reproduces radial ratios there;
    // a nondegenerate optimum has a single component
    const auto comp = oracles::support_components_by_target(sol.plan);
    std::map<std::size_t, double> factor;
    for (std::size_t i = 0; i < nu.measure.size(); ++i) {
      const double ratio =
          radial(R, nu.measure.point(i)) / radial(sol.cone_K, nu.measure.point(i));
      auto [it, fresh] = factor.emplace(comp[i], ratio);
      if (!fresh) REQUIRE(ratio == Approx(it->second).epsilon(1e-7));
    }
  }
}
