// conic-transport - measure transport for cone geometries
// Copyright 2026 The conic-transport Contributors
// Licensed under Apache 2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "conic_transport/geometry.hpp"
#include "support/oracles.hpp"

using namespace conic_transport;
using Catch::Approx;

namespace {

const double kPi = 3.14159265358979323846;

ConeSpec cone2d_quarter() {
  return ConeSpec::circular(UnitVector({0.0, 1.0}), kPi / 4.0);
}

}  // namespace

TEST_CASE("UnitVector enforces the norm invariant") {
  REQUIRE_THROWS_AS(UnitVector({1.0, 1.0}), DomainError);
  REQUIRE_THROWS_AS(UnitVector({1.0}), DomainError);
  const UnitVector v = UnitVector::normalized({3.0, 4.0});
  REQUIRE(v[0] == Approx(0.6));
  REQUIRE(v[1] == Approx(0.8));
  REQUIRE_THROWS_AS(UnitVector::normalized({0.0, 0.0}), DomainError);
}

TEST_CASE("dual_cone of circular cones flips the axis and complements the angle") {
  SECTION("n=2, quarter angle is self-complementary") {
    const ConeSpec d = dual_cone(cone2d_quarter());
    REQUIRE(d.is_circular());
    REQUIRE(d.circular_data().axis[1] == Approx(-1.0));
    REQUIRE(d.circular_data().half_angle == Approx(kPi / 4.0));
  }
  SECTION("n=3, pi/6 becomes pi/3") {
    const ConeSpec c = ConeSpec::circular(UnitVector({0.0, 0.0, 1.0}), kPi / 6.0);
    const ConeSpec d = dual_cone(c);
    REQUIRE(d.circular_data().axis[2] == Approx(-1.0));
    REQUIRE(d.circular_data().half_angle == Approx(kPi / 3.0));
  }
}

TEST_CASE("dual_cone of a polyhedral cone exposes interior membership") {
  const double s = std::sqrt(0.5);
  const ConeSpec c = ConeSpec::polyhedral(
      {UnitVector({s, s}), UnitVector({-s, s})});
  const ConeSpec d = dual_cone(c);
  // (0,-1) makes a strictly negative product with both generators
  REQUIRE(vec::dot({0.0, -1.0}, c.polyhedral_data().generators[0].coords()) < 0.0);
  REQUIRE(vec::dot({0.0, -1.0}, c.polyhedral_data().generators[1].coords()) < 0.0);
  REQUIRE(d.in_interior({0.0, -1.0}));
  REQUIRE_FALSE(d.in_interior({0.0, 1.0}));
}

TEST_CASE("degenerate cones are rejected") {
  REQUIRE_THROWS_AS(ConeSpec::circular(UnitVector({0.0, 1.0}), 0.0), DegenerateCone);
  REQUIRE_THROWS_AS(ConeSpec::circular(UnitVector({0.0, 1.0}), kPi / 2.0), DegenerateCone);
  // contains the x-axis line: not pointed
  REQUIRE_THROWS_AS(ConeSpec::polyhedral({UnitVector({1.0, 0.0}), UnitVector({-1.0, 0.0}),
                                          UnitVector({0.0, 1.0})}),
                    DegenerateCone);
  // rank deficient
  REQUIRE_THROWS_AS(ConeSpec::polyhedral({UnitVector({1.0, 0.0}), UnitVector({1.0, 0.0})}),
                    DegenerateCone);
}

TEST_CASE("in_interior follows the strict angular test") {
  const ConeSpec c = cone2d_quarter();
  REQUIRE(c.in_interior({0.0, 1.0}));
  const double s = std::sqrt(0.5);
  REQUIRE_FALSE(c.in_interior({s, s}));  // boundary ray
  REQUIRE(c.in_interior({0.1, 1.0}));    // about 5.7 degrees off axis
  REQUIRE_FALSE(c.in_interior({0.0, 0.0}));
  REQUIRE_FALSE(c.in_interior({1.0, 0.0}));
}

TEST_CASE("polyhedral membership in n=4 falls back to LP feasibility") {
  std::vector<UnitVector> gens;
  for (const double a : {-0.5, 0.5})
    for (const double b : {-0.5, 0.5})
      for (const double c : {-0.5, 0.5})
        gens.push_back(UnitVector::normalized({a, b, c, 1.0}));
  const ConeSpec cone = ConeSpec::polyhedral(gens);
  REQUIRE(cone.contains({0.0, 0.0, 0.0, 1.0}));
  REQUIRE(cone.contains(gens[3].coords()));
  REQUIRE_FALSE(cone.contains({0.0, 0.0, 0.0, -1.0}));
  REQUIRE_FALSE(cone.contains({1.0, 0.0, 0.0, 0.0}));
  REQUIRE_THROWS_AS(cone.in_interior({0.0, 0.0, 0.0, 1.0}), UnsupportedDimension);
  REQUIRE_THROWS_AS(cone.dual(), UnsupportedDimension);
}

TEST_CASE("cost matches direct evaluation and the antipodal zero") {
  const ConeSpec c = cone2d_quarter();
  const UnitVector u({0.0, -1.0});
  SECTION("antipodal pair has cost zero") {
    REQUIRE(cost(u, UnitVector({0.0, 1.0}), c) == Approx(0.0).margin(1e-15));
  }
  SECTION("direct evaluations") {
    // (s,s) sits on the boundary ray of the quarter cone, so evaluate the
    // same pair on a wider cone where it is strictly interior
    const ConeSpec wide = ConeSpec::circular(UnitVector({0.0, 1.0}), kPi / 3.0);
    const double s = std::sqrt(0.5);
    REQUIRE(cost(u, UnitVector({s, s}), wide) == Approx(std::log(s)).margin(1e-15));
    REQUIRE(cost(u, UnitVector({std::sin(0.3), std::cos(0.3)}), c) ==
            Approx(std::log(std::cos(0.3))).margin(1e-15));
  }
  SECTION("domain violations raise") {
    REQUIRE_THROWS_AS(cost(u, UnitVector({0.0, -1.0}), c), DomainError);
    REQUIRE_THROWS_AS(cost(UnitVector({0.0, 1.0}), UnitVector({0.0, 1.0}), c), DomainError);
  }
  SECTION("near-orthogonal pairs inside the open regions raise") {
    const double a = kPi / 4.0 - 1e-13;
    const UnitVector v({std::sin(a), std::cos(a)});
    const UnitVector w({std::sin(a), -std::cos(a)});
    REQUIRE(c.in_interior(v.coords()));
    REQUIRE(c.dual().in_interior(w.coords()));
    REQUIRE_THROWS_AS(cost(w, v, c), NearOrthogonal);
  }
}

TEST_CASE("sample_region postconditions") {
  const ConeSpec c = cone2d_quarter();
  SECTION("single draw lands strictly inside") {
    const auto pts = sample_region(SphericalRegion(RegionKind::OmegaC, c), 1, 7);
    REQUIRE(pts.size() == 1);
    REQUIRE(c.in_interior(pts[0].coords()));
  }
  SECTION("dual-region batch keeps the angular margin") {
    const SphericalRegion region(RegionKind::OmegaCDual, c);
    const auto pts = sample_region(region, 100, 1);
    REQUIRE(pts.size() == 100);
    for (const auto& p : pts) {
      REQUIRE(region.contains(p));
      REQUIRE(region.boundary_margin(p) >= 1e-3 - 1e-12);
    }
  }
  SECTION("deterministic in the seed") {
    const SphericalRegion region(RegionKind::OmegaC, c);
    const auto a = sample_region(region, 25, 42);
    const auto b = sample_region(region, 25, 42);
    for (std::size_t k = 0; k < a.size(); ++k) {
      REQUIRE(a[k][0] == b[k][0]);
      REQUIRE(a[k][1] == b[k][1]);
    }
    const auto other = sample_region(region, 25, 43);
    bool all_equal = true;
    for (std::size_t k = 0; k < a.size(); ++k)
      all_equal = all_equal && a[k][0] == other[k][0];
    REQUIRE_FALSE(all_equal);
  }
  SECTION("polyhedral regions sample with margin") {
    const ConeSpec poly = ConeSpec::polyhedral(
        {UnitVector::normalized({1.0, 0.2, 1.0}), UnitVector::normalized({-1.0, 0.3, 1.0}),
         UnitVector::normalized({0.1, 1.0, 1.0}), UnitVector::normalized({0.0, -1.0, 1.0})});
    const SphericalRegion region(RegionKind::OmegaC, poly);
    for (const auto& p : sample_region(region, 50, 3))
      REQUIRE(region.boundary_margin(p) >= 1e-3 - 1e-12);
  }
}

TEST_CASE("duality involution preserves membership verdicts") {
  SplitMix64 rng(2024);
  std::vector<ConeSpec> cones;
  cones.push_back(cone2d_quarter());
  cones.push_back(ConeSpec::circular(UnitVector::normalized({0.3, -0.2, 0.9}), 0.6));
  cones.push_back(ConeSpec::polyhedral(
      {UnitVector::normalized({1.0, 0.1, 0.8}), UnitVector::normalized({-0.9, 0.2, 0.8}),
       UnitVector::normalized({0.05, 1.0, 0.9}), UnitVector::normalized({0.0, -1.0, 1.1})}));
  for (const auto& c : cones) {
    const ConeSpec cdd = c.dual().dual();
    std::size_t checked = 0;
    for (std::size_t k = 0; k < 1000; ++k) {
      vec::Vector x(c.dim());
      for (double& t : x) t = rng.gaussian();
      // skip the boundary sliver where the two exact representations may
      // disagree by rounding
      const UnitVector xv = UnitVector::normalized(x);
      if (std::abs(c.boundary_margin(xv)) < 1e-9) continue;
      REQUIRE(c.contains(x) == cdd.contains(x));
      REQUIRE(c.in_interior(x) == cdd.in_interior(x));
      ++checked;
    }
    REQUIRE(checked > 900);
  }
}

TEST_CASE("strict negativity of <u,v> across paired regions") {
  SplitMix64 rng(99);
  const ConeSpec cones[] = {
      cone2d_quarter(), ConeSpec::circular(UnitVector::normalized({0.1, 0.4, 1.0}), 0.5)};
  for (const auto& c : cones) {
    const auto us = sample_region(SphericalRegion(RegionKind::OmegaCDual, c), 100, rng.next());
    const auto vs = sample_region(SphericalRegion(RegionKind::OmegaC, c), 100, rng.next());
    for (const auto& u : us)
      for (const auto& v : vs) REQUIRE(dot(u, v) < 0.0);
  }
}

TEST_CASE("cost is nonpositive and vanishes only at antipodes") {
  const ConeSpec c = cone2d_quarter();
  const auto us = sample_region(SphericalRegion(RegionKind::OmegaCDual, c), 60, 5);
  const auto vs = sample_region(SphericalRegion(RegionKind::OmegaC, c), 60, 6);
  for (const auto& u : us)
    for (const auto& v : vs) {
      const double cc = cost(u, v, c);
      REQUIRE(cc <= 0.0);
      if (cc > -1e-18) REQUIRE(angular_distance(negated(u), v) < 1e-9);
    }
  for (const auto& u : us)
    REQUIRE(cost(u, negated(u), c) == Approx(0.0).margin(1e-15));
}
