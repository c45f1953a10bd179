// conic-transport - measure transport for cone geometries
// Copyright 2026 The conic-transport Contributors
// Licensed under Apache 2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "conic_transport/errors.hpp"
#include "conic_transport/geometry.hpp"
#include "conic_transport/random.hpp"

namespace conic_transport {

/// One halfspace {x : <x, normal> <= -offset} with normal strictly inside
/// Omega_{C_dual} and offset > 0.
struct Facet {
  UnitVector normal;
  double offset;
};

/// A C-pseudo-cone in facet form: K = C ∩ ∩_i {x : <x,u_i> <= -b_i}.
/// K is automatically nonempty, o ∉ K, and K + C = K ⊂ C.
class PseudoCone {
 public:
  PseudoCone(ConeSpec cone, std::vector<Facet> facets)
      : cone_(std::move(cone)), facets_(std::move(facets)) {
    if (facets_.empty()) throw DomainError("PseudoCone: needs at least one facet");
    const ConeSpec dual = cone_.dual();
    for (const auto& f : facets_) {
      if (f.normal.dim() != cone_.dim())
        throw DomainError("PseudoCone: facet dimension mismatch");
      if (!(f.offset > 0.0)) throw DomainError("PseudoCone: facet offset must be positive");
      if (!dual.in_interior(f.normal.coords()))
        throw DomainError("PseudoCone: facet normal not strictly inside Omega_{C_dual}");
    }
  }

  const ConeSpec& cone() const { return cone_; }
  const std::vector<Facet>& facets() const { return facets_; }
  std::size_t facet_count() const { return facets_.size(); }

 private:
  ConeSpec cone_;
  std::vector<Facet> facets_;
};

namespace detail {

// max_i b_i / |<v,u_i>| without the region membership check.
inline double radial_unchecked(const PseudoCone& K, const vec::Vector& v) {
  double best = 0.0;
  for (const auto& f : K.facets()) {
    const double d = -vec::dot(v, f.normal.coords());
    best = std::max(best, f.offset / d);
  }
  return best;
}

// |<u,v>| * rho_K(v); strictly positive on cl Omega_C for admissible u.
inline double support_objective(const PseudoCone& K, const UnitVector& u,
                                const vec::Vector& v) {
  return std::abs(vec::dot(u.coords(), v)) * radial_unchecked(K, v);
}

// Pull a unit vector back onto the cap {angle(v, axis) <= theta}.
inline vec::Vector clamp_to_cap(const vec::Vector& v, const UnitVector& axis,
                                double theta) {
  const double c = std::clamp(vec::dot(v, axis.coords()), -1.0, 1.0);
  const double ang = std::acos(c);
  if (ang <= theta) return v;
  const double s = std::sin(ang);
  vec::Vector out = vec::axpy(std::sin(theta) / s, v,
                              vec::scaled(axis.coords(), std::sin(ang - theta) / s));
  const double n = vec::norm(out);
  return vec::scaled(out, 1.0 / n);
}

// Orthonormal tangent basis at v.
inline std::vector<vec::Vector> tangent_basis(const vec::Vector& v) {
  const std::size_t n = v.size();
  std::vector<vec::Vector> basis;
  basis.push_back(vec::scaled(v, 1.0 / vec::norm(v)));
  for (std::size_t k = 0; k < n && basis.size() < n; ++k) {
    vec::Vector e(n, 0.0);
    e[k] = 1.0;
    for (const auto& b : basis) e = vec::axpy(-vec::dot(e, b), b, e);
    const double ne = vec::norm(e);
    if (ne > 1e-8) basis.push_back(vec::scaled(e, 1.0 / ne));
  }
  basis.erase(basis.begin());
  return basis;
}

struct GridConstants {
  static constexpr std::size_t kCoarsePoints = 10000;
  static constexpr std::size_t kRefineBasins = 50;
  static constexpr std::size_t kRefineIterations = 60;
};

// Coarse candidate directions covering the closed circular cap, boundary ring
// included. n=2: uniform arc; n=3: Fibonacci spiral; higher n: seeded random.
inline std::vector<vec::Vector> cap_grid(const ConeSpec& cone, std::size_t points) {
  const auto& c = cone.circular_data();
  const std::size_t n = cone.dim();
  std::vector<vec::Vector> out;
  out.reserve(points + 64);
  if (n == 2) {
    const vec::Vector perp = detail::rotate90(c.axis.coords());
    for (std::size_t k = 0; k < points; ++k) {
      const double t = -c.half_angle +
                       2.0 * c.half_angle * static_cast<double>(k) /
                           static_cast<double>(points - 1);
      out.push_back(vec::axpy(std::sin(t), perp,
                              vec::scaled(c.axis.coords(), std::cos(t))));
    }
    return out;
  }
  if (n == 3) {
    const auto tb = tangent_basis(c.axis.coords());
    const double golden = 2.399963229728653;  // 2*pi*(1 - 1/phi)
    const double zmin = std::cos(c.half_angle);
    for (std::size_t k = 0; k < points; ++k) {
      const double z = 1.0 - (1.0 - zmin) * (static_cast<double>(k) + 0.5) /
                                 static_cast<double>(points);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double psi = golden * static_cast<double>(k);
      vec::Vector v = vec::scaled(c.axis.coords(), z);
      v = vec::axpy(r * std::cos(psi), tb[0], v);
      v = vec::axpy(r * std::sin(psi), tb[1], v);
      out.push_back(vec::scaled(v, 1.0 / vec::norm(v)));
    }
    // explicit boundary ring: single-facet contacts often sit on bd C
    for (std::size_t k = 0; k < 256; ++k) {
      const double psi = 6.283185307179586 * static_cast<double>(k) / 256.0;
      vec::Vector v = vec::scaled(c.axis.coords(), std::cos(c.half_angle));
      v = vec::axpy(std::sin(c.half_angle) * std::cos(psi), tb[0], v);
      v = vec::axpy(std::sin(c.half_angle) * std::sin(psi), tb[1], v);
      out.push_back(vec::scaled(v, 1.0 / vec::norm(v)));
    }
    return out;
  }
  SplitMix64 rng(0x5eed5eed5eed5eedULL);  // fixed: queries must be deterministic
  while (out.size() < points) {
    const double phi = random_polar_angle(c.half_angle, n, rng);
    const vec::Vector t = random_tangent(c.axis, rng);
    out.push_back(vec::axpy(std::sin(phi), t, vec::scaled(c.axis.coords(), std::cos(phi))));
  }
  return out;
}

template <typename Objective>
inline vec::Vector refine_on_cap(const ConeSpec& cone, vec::Vector v, double radius,
                                 const Objective& f) {
  const auto& c = cone.circular_data();
  const double gold = 0.6180339887498949;
  double fv = f(v);
  const std::size_t dirs = cone.dim() - 1;
  const std::size_t sweeps =
      std::max<std::size_t>(1, GridConstants::kRefineIterations / (10 * dirs));
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
    const auto tb = tangent_basis(v);
    for (const auto& t : tb) {
      // golden-section over the geodesic-ish segment v + alpha*t
      double lo = -radius, hi = radius;
      auto eval = [&](double alpha) {
        vec::Vector w = vec::axpy(alpha, t, v);
        w = vec::scaled(w, 1.0 / vec::norm(w));
        w = clamp_to_cap(w, c.axis, c.half_angle);
        return std::make_pair(f(w), w);
      };
      double a = hi - gold * (hi - lo), b = lo + gold * (hi - lo);
      auto [fa, va] = eval(a);
      auto [fb, vb] = eval(b);
      for (std::size_t it = 0; it < 10; ++it) {
        if (fa < fb) {
          hi = b; b = a; fb = fa; vb = va;
          a = hi - gold * (hi - lo);
          std::tie(fa, va) = eval(a);
        } else {
          lo = a; a = b; fa = fb; va = vb;
          b = lo + gold * (hi - lo);
          std::tie(fb, vb) = eval(b);
        }
      }
      const auto& [fbest, vbest] = fa < fb ? std::tie(fa, va) : std::tie(fb, vb);
      if (fbest < fv) {
        fv = fbest;
        v = vbest;
      }
    }
    radius *= 0.5;
  }
  return v;
}

struct MinimizerResult {
  double value = std::numeric_limits<double>::infinity();
  std::vector<vec::Vector> candidates;  // refined points, best first
};

// Two-level minimization of f over the closed circular cap: coarse grid plus
// extra seeds, then local refinement of the best basins.
template <typename Objective>
inline MinimizerResult minimize_on_cap(const ConeSpec& cone, const Objective& f,
                                       const std::vector<vec::Vector>& extra_seeds) {
  std::vector<vec::Vector> pts = cap_grid(cone, GridConstants::kCoarsePoints);
  const std::size_t grid_size = pts.size();
  for (const auto& s : extra_seeds) pts.push_back(s);
  std::vector<std::pair<double, std::size_t>> scored(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) scored[k] = {f(pts[k]), k};
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const auto& c = cone.circular_data();
  const double spacing =
      cone.dim() == 2 ? 2.0 * c.half_angle / static_cast<double>(grid_size)
                      : 2.0 * c.half_angle / std::sqrt(static_cast<double>(grid_size));
  MinimizerResult res;
  const std::size_t basins = std::min<std::size_t>(GridConstants::kRefineBasins, scored.size());
  for (std::size_t k = 0; k < basins; ++k) {
    vec::Vector v = refine_on_cap(cone, pts[scored[k].second], 4.0 * spacing, f);
    const double fv = f(v);
    res.candidates.push_back(std::move(v));
    res.value = std::min(res.value, fv);
  }
  std::sort(res.candidates.begin(), res.candidates.end(),
            [&](const vec::Vector& a, const vec::Vector& b) { return f(a) < f(b); });
  return res;
}

struct LinearConstraint {
  vec::Vector normal;
  double bound;  // <x, normal> <= bound
};

inline std::vector<LinearConstraint> all_constraints(const PseudoCone& K) {
  std::vector<LinearConstraint> cs;
  for (const auto& f : K.facets()) cs.push_back({f.normal.coords(), -f.offset});
  for (const auto& w : K.cone().facet_normals()) cs.push_back({w.coords(), 0.0});
  return cs;
}

inline bool solve_square(const std::vector<vec::Vector>& rows, const vec::Vector& rhs,
                         vec::Vector& out) {
  const std::size_t n = rhs.size();
  std::vector<vec::Vector> a = rows;
  vec::Vector b = rhs;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-10) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double fct = a[r][col] / a[col][col];
      if (fct == 0.0) continue;
      for (std::size_t c2 = col; c2 < n; ++c2) a[r][c2] -= fct * a[col][c2];
      b[r] -= fct * b[col];
    }
  }
  out.assign(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) out[r] = b[r] / a[r][r];
  return true;
}

// Vertices of K for polyhedral ambient cones, n = 2 or 3: intersections of n
// active constraint planes that satisfy all other constraints.
inline std::vector<vec::Vector> enumerate_polyhedral_vertices(const PseudoCone& K) {
  const std::size_t n = K.cone().dim();
  if (n != 2 && n != 3)
    throw UnsupportedDimension("vertex enumeration requires n=2 or n=3");
  const auto cs = all_constraints(K);
  std::vector<vec::Vector> verts;
  auto feasible = [&](const vec::Vector& x) {
    const double scale = 1.0 + vec::norm(x);
    for (const auto& c : cs)
      if (vec::dot(x, c.normal) > c.bound + 1e-9 * scale) return false;
    return true;
  };
  auto push_unique = [&](const vec::Vector& x) {
    for (const auto& v : verts)
      if (vec::distance(v, x) < 1e-9 * (1.0 + vec::norm(x))) return;
    verts.push_back(x);
  };
  const std::size_t m = cs.size();
  if (n == 2) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) {
        vec::Vector x;
        if (!solve_square({cs[i].normal, cs[j].normal}, {cs[i].bound, cs[j].bound}, x))
          continue;
        if (feasible(x)) push_unique(x);
      }
  } else {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k) {
          vec::Vector x;
          if (!solve_square({cs[i].normal, cs[j].normal, cs[k].normal},
                            {cs[i].bound, cs[j].bound, cs[k].bound}, x))
            continue;
          if (feasible(x)) push_unique(x);
        }
  }
  return verts;
}

}  // namespace detail

/// Radial function rho_K(v) = min{r > 0 : rv in K} = max_i b_i/|<v,u_i>|.
inline double radial(const PseudoCone& K, const UnitVector& v) {
  if (!K.cone().in_interior(v.coords()))
    throw DomainError("radial: v is not strictly inside Omega_C");
  return detail::radial_unchecked(K, v.coords());
}

/// Membership x in K: inside C and on the far side of every facet.
inline bool contains(const PseudoCone& K, const vec::Vector& x) {
  if (!K.cone().contains(x)) return false;
  const double nx = vec::norm(x);
  for (const auto& f : K.facets())
    if (vec::dot(x, f.normal.coords()) > -f.offset + 1e-12 * (nx + f.offset)) return false;
  return true;
}

/// Scales every facet offset by lambda > 0; the dilate lambda*K.
inline PseudoCone dilate(const PseudoCone& K, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("dilate: lambda must be positive");
  std::vector<Facet> fs = K.facets();
  for (auto& f : fs) f.offset *= lambda;
  return PseudoCone(K.cone(), std::move(fs));
}

/// h_bar_K(u) = -sup{<u,y> : y in K} > 0. Exact vertex enumeration for
/// polyhedral cones (n=2,3); two-level grid minimization of |<u,v>| rho_K(v)
/// over the closed cap for circular cones.
inline double support_abs(const PseudoCone& K, const UnitVector& u) {
  if (!K.cone().dual().in_interior(u.coords()))
    throw DomainError("support_abs: u is not strictly inside Omega_{C_dual}");
  if (!K.cone().is_circular()) {
    const auto verts = detail::enumerate_polyhedral_vertices(K);
    if (verts.empty()) throw Error("support_abs: vertex enumeration found no vertex");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : verts) best = std::min(best, -vec::dot(u.coords(), x));
    return best;
  }
  auto f = [&](const vec::Vector& v) { return detail::support_objective(K, u, v); };
  std::vector<vec::Vector> seeds;
  const auto& c = K.cone().circular_data();
  seeds.push_back(detail::clamp_to_cap(vec::scaled(u.coords(), -1.0), c.axis, c.half_angle));
  return detail::minimize_on_cap(K.cone(), f, seeds).value;
}

/// Result of the reverse radial Gauss map. Unique means an isolated
/// minimizer strictly inside Omega_C; ties and contacts on K ∩ bd C (whose
/// normals belong to omega_K) are reported as ambiguous with the candidate
/// list.
struct GaussImage {
  bool unique = false;
  std::vector<UnitVector> candidates;  // best first, nonempty
  double value = 0.0;                  // attained min of |<u,v>| rho_K(v)

  const UnitVector& unique_direction() const {
    if (!unique) throw Error("GaussImage: result is ambiguous");
    return candidates.front();
  }
};

inline constexpr double kTieRelativeTolerance = 1e-9;
inline constexpr double kTieAngularSeparation = 1e-7;

namespace detail {

inline GaussImage cluster_minimizers(std::vector<std::pair<double, vec::Vector>> scored,
                                     const ConeSpec& cone) {
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  const double best = scored.front().first;
  GaussImage result;
  result.value = best;
  for (const auto& [val, v] : scored) {
    if (val > best * (1.0 + kTieRelativeTolerance) + 1e-300) break;
    UnitVector cand = UnitVector::normalized(v);
    bool merged = false;
    for (const auto& rep : result.candidates)
      if (angular_distance(rep, cand) <= kTieAngularSeparation) { merged = true; break; }
    if (!merged) result.candidates.push_back(std::move(cand));
    if (result.candidates.size() >= 64) break;
  }
  result.unique = result.candidates.size() == 1 &&
                  cone.boundary_margin(result.candidates.front()) > 1e-9;
  return result;
}

}  // namespace detail

/// Directions where several facet ratios tie for the radial maximum --
/// the vertex rays of the radial complex, used as exact contact candidates.
struct RadialVertex {
  UnitVector direction;
  std::vector<std::size_t> active;  // facets attaining the max ratio
  bool on_cone_boundary = false;
};

inline std::vector<RadialVertex> radial_complex_vertices(const PseudoCone& K) {
  const std::size_t n = K.cone().dim();
  if (n != 2 && n != 3)
    throw UnsupportedDimension("radial complex vertices require n=2 or n=3");
  std::vector<RadialVertex> out;
  const auto& facets = K.facets();

  auto classify = [&](const vec::Vector& vraw, bool boundary_hint) {
    if (!K.cone().contains(vraw)) return;
    vec::Vector v = vec::scaled(vraw, 1.0 / vec::norm(vraw));
    const double rho = detail::radial_unchecked(K, v);
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < facets.size(); ++i) {
      const double ratio = facets[i].offset / (-vec::dot(v, facets[i].normal.coords()));
      if (ratio >= rho * (1.0 - 1e-9)) active.push_back(i);
    }
    if (active.size() < 2 && !boundary_hint) return;
    UnitVector dir = UnitVector::normalized(v);
    const bool on_bd = !K.cone().in_interior(v) ||
                       K.cone().boundary_margin(dir) < 1e-9;
    for (const auto& existing : out)
      if (angular_distance(existing.direction, dir) < 1e-9) return;
    out.push_back({std::move(dir), std::move(active), on_bd});
  };

  if (!K.cone().is_circular()) {
    for (const auto& x : detail::enumerate_polyhedral_vertices(K)) classify(x, true);
    return out;
  }

  const auto& c = K.cone().circular_data();
  // Tie of facets i and j lies on the hyperplane <v, b_i u_j - b_j u_i> = 0.
  std::vector<vec::Vector> ties;
  std::vector<std::pair<std::size_t, std::size_t>> tie_idx;
  for (std::size_t i = 0; i < facets.size(); ++i)
    for (std::size_t j = i + 1; j < facets.size(); ++j) {
      vec::Vector m = vec::sub(vec::scaled(facets[j].normal.coords(), facets[i].offset),
                               vec::scaled(facets[i].normal.coords(), facets[j].offset));
      const double nm = vec::norm(m);
      if (nm < 1e-12) continue;
      ties.push_back(vec::scaled(m, 1.0 / nm));
      tie_idx.push_back({i, j});
    }

  if (n == 2) {
    for (const auto& m : ties) {
      const vec::Vector v = detail::rotate90(m);
      classify(v, false);
      classify(vec::scaled(v, -1.0), false);
    }
    // arc endpoints as boundary markers
    const vec::Vector perp = detail::rotate90(c.axis.coords());
    for (const double s : {-1.0, 1.0})
      classify(vec::axpy(s * std::sin(c.half_angle), perp,
                         vec::scaled(c.axis.coords(), std::cos(c.half_angle))),
               true);
    return out;
  }

  // n == 3: triple ties from pairs of tie planes
  for (std::size_t a = 0; a < ties.size(); ++a)
    for (std::size_t b = a + 1; b < ties.size(); ++b) {
      vec::Vector v = vec::cross3(ties[a], ties[b]);
      if (vec::norm(v) < 1e-12) continue;
      classify(v, false);
      classify(vec::scaled(v, -1.0), false);
    }
  // tie circle meeting the cap boundary
  const auto tb = detail::tangent_basis(c.axis.coords());
  for (const auto& m : ties) {
    const double A = vec::dot(tb[0], m) * std::sin(c.half_angle);
    const double B = vec::dot(tb[1], m) * std::sin(c.half_angle);
    const double rhs = -std::cos(c.half_angle) * vec::dot(c.axis.coords(), m);
    const double R = std::hypot(A, B);
    if (R < 1e-14 || std::abs(rhs) > R) continue;
    const double base = std::atan2(B, A), off = std::acos(std::clamp(rhs / R, -1.0, 1.0));
    for (const double psi : {base + off, base - off}) {
      vec::Vector v = vec::scaled(c.axis.coords(), std::cos(c.half_angle));
      v = vec::axpy(std::sin(c.half_angle) * std::cos(psi), tb[0], v);
      v = vec::axpy(std::sin(c.half_angle) * std::sin(psi), tb[1], v);
      classify(v, true);
    }
  }
  return out;
}

/// Minimizer(s) of |<u,v>| rho_K(v) over Omega_C: the reverse radial Gauss
/// map, with numerically tied contact sets reported as ambiguous.
inline GaussImage reverse_gauss(const PseudoCone& K, const UnitVector& u) {
  if (!K.cone().dual().in_interior(u.coords()))
    throw DomainError("reverse_gauss: u is not strictly inside Omega_{C_dual}");
  if (!K.cone().is_circular()) {
    const auto verts = detail::enumerate_polyhedral_vertices(K);
    if (verts.empty()) throw Error("reverse_gauss: no vertices found");
    std::vector<std::pair<double, vec::Vector>> scored;
    scored.reserve(verts.size());
    for (const auto& x : verts) scored.push_back({-vec::dot(u.coords(), x), x});
    return detail::cluster_minimizers(std::move(scored), K.cone());
  }
  auto f = [&](const vec::Vector& v) { return detail::support_objective(K, u, v); };
  std::vector<vec::Vector> seeds;
  const auto& c = K.cone().circular_data();
  seeds.push_back(detail::clamp_to_cap(vec::scaled(u.coords(), -1.0), c.axis, c.half_angle));
  if (K.cone().dim() <= 3)
    for (const auto& rv : radial_complex_vertices(K)) seeds.push_back(rv.direction.coords());
  auto res = detail::minimize_on_cap(K.cone(), f, seeds);
  std::vector<std::pair<double, vec::Vector>> scored;
  scored.reserve(res.candidates.size());
  for (auto& v : res.candidates) scored.push_back({f(v), std::move(v)});
  return detail::cluster_minimizers(std::move(scored), K.cone());
}

namespace detail {

inline constexpr double kFacetMatchDistance = 1e-9;

// Relative gap |<v,u>| rho_K(v) / h_bar_K(u) - 1 and membership verdict. When
// u coincides with a facet normal, h_bar >= b for that facet, so a gap within
// tolerance against b certifies membership without any global minimization.
struct SubdiffCheck {
  bool member = false;
  double gap = 0.0;
};

inline SubdiffCheck check_pseudo_subdifferential(const PseudoCone& K, const UnitVector& v,
                                                 const UnitVector& u, double tol) {
  const double lhs = std::abs(dot(v, u)) * radial(K, v);
  for (const auto& f : K.facets()) {
    if (vec::distance(u.coords(), f.normal.coords()) <= kFacetMatchDistance) {
      const double gap = lhs / f.offset - 1.0;
      if (gap <= tol) return {true, gap};
      break;
    }
  }
  const double rhs = support_abs(K, u);
  const double gap = lhs / rhs - 1.0;
  return {gap <= tol, gap};
}

}  // namespace detail

/// True iff u is an outer normal of K at rho_K(v) v, i.e. the contact point
/// attains the support value in direction u within relative tolerance.
inline bool in_pseudo_subdifferential(const PseudoCone& K, const UnitVector& v,
                                      const UnitVector& u, double tol = 1e-8) {
  if (!K.cone().in_interior(v.coords()))
    throw DomainError("in_pseudo_subdifferential: v not strictly inside Omega_C");
  if (!K.cone().dual().in_interior(u.coords()))
    throw DomainError("in_pseudo_subdifferential: u not strictly inside Omega_{C_dual}");
  return detail::check_pseudo_subdifferential(K, v, u, tol).member;
}

/// Facet indices whose removal leaves the radial function unchanged on a
/// probe grid (vertex-ray directions plus seeded random probes).
inline std::vector<std::size_t> redundant_facets(const PseudoCone& K,
                                                 std::size_t probe_count = 2048,
                                                 std::uint64_t seed = 0) {
  std::vector<vec::Vector> probes;
  if (K.cone().dim() <= 3)
    for (const auto& rv : radial_complex_vertices(K)) probes.push_back(rv.direction.coords());
  SphericalRegion region(RegionKind::OmegaC, K.cone());
  for (const auto& v : sample_region(region, probe_count, seed ^ 0x9d2c5680ULL))
    probes.push_back(v.coords());
  if (K.cone().is_circular()) {
    const auto& c = K.cone().circular_data();
    for (const auto& f : K.facets())
      probes.push_back(
          detail::clamp_to_cap(vec::scaled(f.normal.coords(), -1.0), c.axis, c.half_angle));
  }
  const std::size_t m = K.facet_count();
  std::vector<std::size_t> redundant;
  for (std::size_t i = 0; i < m; ++i) {
    bool needed = false;
    for (const auto& v : probes) {
      const double mine = K.facets()[i].offset / (-vec::dot(v, K.facets()[i].normal.coords()));
      double others = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        if (k == i) continue;
        others = std::max(others,
                          K.facets()[k].offset / (-vec::dot(v, K.facets()[k].normal.coords())));
      }
      if (mine > others * (1.0 + 1e-12)) {
        needed = true;
        break;
      }
    }
    if (!needed) redundant.push_back(i);
  }
  return redundant;
}

inline PseudoCone prune(const PseudoCone& K, std::size_t probe_count = 2048,
                        std::uint64_t seed = 0) {
  const auto drop = redundant_facets(K, probe_count, seed);
  if (drop.empty()) return K;
  std::vector<Facet> kept;
  std::size_t d = 0;
  for (std::size_t i = 0; i < K.facet_count(); ++i) {
    if (d < drop.size() && drop[d] == i) {
      ++d;
      continue;
    }
    kept.push_back(K.facets()[i]);
  }
  if (kept.empty()) kept.push_back(K.facets()[0]);
  return PseudoCone(K.cone(), std::move(kept));
}

/// Exact members of the pseudo-subdifferential: vertex-ray contacts plus
/// facet-interior contacts at random directions. Every returned (v,u) has u
/// attaining the radial maximum at v, so membership holds to machine
/// precision. n = 2 or 3.
inline std::vector<std::pair<UnitVector, UnitVector>> sample_subdifferential_pairs(
    const PseudoCone& K, std::size_t count, std::uint64_t seed) {
  std::vector<std::pair<UnitVector, UnitVector>> pool;
  auto push_unique = [&](const UnitVector& v, const UnitVector& u) {
    for (const auto& [pv, pu] : pool)
      if (angular_distance(pv, v) < 1e-9 && angular_distance(pu, u) < 1e-9) return;
    pool.push_back({v, u});
  };
  for (const auto& rv : radial_complex_vertices(K)) {
    if (rv.on_cone_boundary) continue;
    if (K.cone().boundary_margin(rv.direction) < 1e-4) continue;
    for (const std::size_t i : rv.active) push_unique(rv.direction, K.facets()[i].normal);
  }
  SphericalRegion region(RegionKind::OmegaC, K.cone());
  const auto draws = sample_region(region, 8 * count + 32, seed);
  for (const auto& v : draws) {
    double best = 0.0, second = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < K.facet_count(); ++i) {
      const double r =
          K.facets()[i].offset / (-vec::dot(v.coords(), K.facets()[i].normal.coords()));
      if (r > best) {
        second = best;
        best = r;
        arg = i;
      } else {
        second = std::max(second, r);
      }
    }
    if (second > best * (1.0 - 1e-9)) continue;  // numerically tied: skip
    push_unique(v, K.facets()[arg].normal);
  }
  SplitMix64 rng(seed ^ 0xabcdef12345678ULL);
  rng.shuffle(pool);
  if (pool.size() > count)
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(count), pool.end());
  return pool;
}

}  // namespace conic_transport
