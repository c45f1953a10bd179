// conic-transport - measure transport for cone geometries
// Copyright 2026 The conic-transport Contributors
// Licensed under Apache 2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "conic_transport/errors.hpp"
#include "conic_transport/random.hpp"

namespace conic_transport {

namespace vec {

using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

inline Vector scaled(const Vector& a, double t) {
  Vector r = a;
  for (double& x : r) x *= t;
  return r;
}

inline Vector add(const Vector& a, const Vector& b) {
  Vector r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

inline Vector sub(const Vector& a, const Vector& b) {
  Vector r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

inline Vector axpy(double t, const Vector& a, const Vector& b) {  // t*a + b
  Vector r = b;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += t * a[i];
  return r;
}

inline Vector cross3(const Vector& a, const Vector& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

inline double distance(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace vec

/// Unit direction in R^n, n >= 2. Construction enforces |norm - 1| <= 1e-12.
class UnitVector {
 public:
  explicit UnitVector(vec::Vector coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2) throw DomainError("UnitVector: dimension must be >= 2");
    const double n = vec::norm(coords_);
    if (std::abs(n - 1.0) > 1e-12)
      throw DomainError("UnitVector: norm deviates from 1 by more than 1e-12");
  }

  /// Rescales an arbitrary nonzero vector onto the sphere.
  static UnitVector normalized(vec::Vector coords) {
    const double n = vec::norm(coords);
    if (!(n > 1e-300)) throw DomainError("UnitVector: cannot normalize near-zero vector");
    for (double& x : coords) x /= n;
    return UnitVector(std::move(coords));
  }

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  const vec::Vector& coords() const { return coords_; }

 private:
  vec::Vector coords_;
};

inline double dot(const UnitVector& a, const UnitVector& b) {
  return vec::dot(a.coords(), b.coords());
}

inline UnitVector negated(const UnitVector& a) {
  return UnitVector(vec::scaled(a.coords(), -1.0));
}

/// Geodesic distance on the sphere, in radians.
inline double angular_distance(const UnitVector& a, const UnitVector& b) {
  return 2.0 * std::asin(std::min(1.0, 0.5 * vec::distance(a.coords(), b.coords())));
}

namespace detail {

// Phase-1 simplex feasibility for { G * lambda = rhs, lambda >= 0 } with a
// dense tableau and Bland's rule. Columns of G are the generators. Sizes here
// are tiny (n <= ~8, m <= ~64).
inline bool nonneg_combination_feasible(const std::vector<vec::Vector>& columns,
                                        vec::Vector rhs, double tol = 1e-9) {
  const std::size_t n = rhs.size();
  const std::size_t m = columns.size();
  // rows: n, vars: m structural + n artificial, plus RHS column.
  std::vector<vec::Vector> t(n, vec::Vector(m + n + 1, 0.0));
  for (std::size_t r = 0; r < n; ++r) {
    const double sign = rhs[r] < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < m; ++k) t[r][k] = sign * columns[k][r];
    t[r][m + r] = 1.0;
    t[r][m + n] = sign * rhs[r];
  }
  std::vector<std::size_t> basis(n);
  vec::Vector obj(m + n + 1, 0.0);  // reduced costs for phase-1 objective
  for (std::size_t r = 0; r < n; ++r) {
    basis[r] = m + r;
    for (std::size_t c = 0; c <= m + n; ++c) obj[c] -= t[r][c];
  }
  for (std::size_t r = 0; r < n; ++r) obj[m + r] = 0.0;

  const std::size_t max_iter = 400 * (m + n + 1);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    std::size_t enter = m + n;
    for (std::size_t c = 0; c < m + n; ++c) {
      if (obj[c] < -1e-11) {
        enter = c;
        break;  // Bland: smallest improving index
      }
    }
    if (enter == m + n) break;
    std::size_t leave = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < n; ++r) {
      if (t[r][enter] > 1e-11) {
        const double ratio = t[r][m + n] / t[r][enter];
        if (ratio < best - 1e-12 ||
            (ratio < best + 1e-12 && (leave == n || basis[r] < basis[leave]))) {
          best = ratio;
          leave = r;
        }
      }
    }
    if (leave == n) break;  // unbounded phase-1 cannot happen; stop defensively
    const double piv = t[leave][enter];
    for (double& x : t[leave]) x /= piv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == leave) continue;
      const double f = t[r][enter];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= m + n; ++c) t[r][c] -= f * t[leave][c];
    }
    const double fo = obj[enter];
    if (fo != 0.0)
      for (std::size_t c = 0; c <= m + n; ++c) obj[c] -= fo * t[leave][c];
    basis[leave] = enter;
  }
  double infeas = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    if (basis[r] >= m) infeas += t[r][m + n];
  return infeas <= tol;
}

// rank via modified Gram-Schmidt
inline std::size_t rank_of(const std::vector<vec::Vector>& vs, double tol = 1e-10) {
  std::vector<vec::Vector> basis;
  for (const auto& v : vs) {
    vec::Vector w = v;
    for (const auto& b : basis) w = vec::axpy(-vec::dot(w, b), b, w);
    const double n = vec::norm(w);
    if (n > tol) basis.push_back(vec::scaled(w, 1.0 / n));
  }
  return basis.size();
}

inline vec::Vector rotate90(const vec::Vector& v) {  // counterclockwise, n=2
  return {-v[1], v[0]};
}

}  // namespace detail

struct CircularCone {
  UnitVector axis;
  double half_angle;  // radians, strictly in (0, pi/2)
};

struct PolyhedralCone {
  std::vector<UnitVector> generators;
};

/// A pointed closed convex cone with nonempty interior: circular (any n) or
/// polyhedral (exact facet queries in n = 2, 3; membership-only above).
class ConeSpec {
 public:
  static ConeSpec circular(UnitVector axis, double half_angle) {
    if (!(half_angle > 0.0) || !(half_angle < 1.5707963267948966))
      throw DegenerateCone("circular cone: half_angle must lie strictly in (0, pi/2)");
    const std::size_t n = axis.dim();
    return ConeSpec(n, CircularCone{std::move(axis), half_angle});
  }

  static ConeSpec polyhedral(std::vector<UnitVector> generators) {
    if (generators.empty()) throw DegenerateCone("polyhedral cone: no generators");
    const std::size_t n = generators[0].dim();
    if (generators.size() < n)
      throw DegenerateCone("polyhedral cone: need at least dim generators");
    std::vector<vec::Vector> cols;
    cols.reserve(generators.size());
    for (const auto& g : generators) {
      if (g.dim() != n) throw DomainError("polyhedral cone: mixed dimensions");
      cols.push_back(g.coords());
    }
    if (detail::rank_of(cols) != n)
      throw DegenerateCone("polyhedral cone: generators do not span the space");
    // pointed iff 0 is not a convex combination of the (unit) generators
    std::vector<vec::Vector> aug = cols;
    for (auto& c : aug) c.push_back(1.0);
    vec::Vector rhs(n, 0.0);
    rhs.push_back(1.0);
    if (detail::nonneg_combination_feasible(aug, rhs))
      throw DegenerateCone("polyhedral cone: contains a line (not pointed)");
    ConeSpec c(n, PolyhedralCone{std::move(generators)});
    if (n <= 3) c.facet_normals_ = c.compute_facet_normals();
    return c;
  }

  std::size_t dim() const { return dim_; }
  bool is_circular() const { return std::holds_alternative<CircularCone>(data_); }
  const CircularCone& circular_data() const { return std::get<CircularCone>(data_); }
  const PolyhedralCone& polyhedral_data() const { return std::get<PolyhedralCone>(data_); }

  /// Outward unit facet normals w with C = {x : <x,w> <= 0}. Exact for
  /// polyhedral cones in n = 2, 3; not defined otherwise.
  const std::vector<UnitVector>& facet_normals() const {
    if (is_circular() || facet_normals_.empty())
      throw UnsupportedDimension("facet normals available only for polyhedral cones in n=2,3");
    return facet_normals_;
  }

  /// Non-strict membership x in C (relative slack 1e-12).
  bool contains(const vec::Vector& x) const {
    if (x.size() != dim_) throw DomainError("cone membership: dimension mismatch");
    const double nx = vec::norm(x);
    if (nx == 0.0) return true;
    if (is_circular()) {
      const auto& c = circular_data();
      return vec::dot(x, c.axis.coords()) >= nx * std::cos(c.half_angle) - 1e-12 * nx;
    }
    if (!facet_normals_.empty()) {
      for (const auto& w : facet_normals_)
        if (vec::dot(x, w.coords()) > 1e-12 * nx) return false;
      return true;
    }
    // high-dimensional polyhedral: LP feasibility of x = sum lambda_k g_k
    std::vector<vec::Vector> cols;
    for (const auto& g : polyhedral_data().generators) cols.push_back(g.coords());
    return detail::nonneg_combination_feasible(cols, vec::scaled(x, 1.0 / nx));
  }

  /// Strict interior membership. For circular: <x,axis> > |x| cos(theta);
  /// for polyhedral (n=2,3): every facet inequality strict.
  bool in_interior(const vec::Vector& x) const {
    if (x.size() != dim_) throw DomainError("cone membership: dimension mismatch");
    const double nx = vec::norm(x);
    if (nx == 0.0) return false;
    if (is_circular()) {
      const auto& c = circular_data();
      return vec::dot(x, c.axis.coords()) > nx * std::cos(c.half_angle);
    }
    if (facet_normals_.empty())
      throw UnsupportedDimension("interior test for polyhedral cones requires n=2,3");
    for (const auto& w : facet_normals_)
      if (vec::dot(x, w.coords()) >= 0.0) return false;
    return true;
  }

  /// Angular distance from a unit direction to the cone boundary (positive
  /// inside, negative outside).
  double boundary_margin(const UnitVector& v) const {
    if (is_circular()) {
      const auto& c = circular_data();
      const double ang = std::acos(std::clamp(dot(v, c.axis), -1.0, 1.0));
      return c.half_angle - ang;
    }
    if (facet_normals_.empty())
      throw UnsupportedDimension("boundary margin for polyhedral cones requires n=2,3");
    double m = std::numeric_limits<double>::infinity();
    for (const auto& w : facet_normals_) {
      const double s = std::clamp(vec::dot(v.coords(), w.coords()), -1.0, 1.0);
      m = std::min(m, std::asin(-s));
    }
    return m;
  }

  /// The dual cone C° = {x : <x,y> <= 0 for all y in C}.
  ConeSpec dual() const {
    if (is_circular()) {
      const auto& c = circular_data();
      return circular(negated(c.axis), 1.5707963267948966 - c.half_angle);
    }
    if (facet_normals_.empty())
      throw UnsupportedDimension("dual of a polyhedral cone requires n=2,3");
    return polyhedral(facet_normals_);
  }

  /// Any strictly interior unit direction.
  UnitVector interior_direction() const {
    if (is_circular()) return circular_data().axis;
    vec::Vector s(dim_, 0.0);
    for (const auto& g : polyhedral_data().generators) s = vec::add(s, g.coords());
    return UnitVector::normalized(std::move(s));
  }

 private:
  ConeSpec(std::size_t dim, std::variant<CircularCone, PolyhedralCone> data)
      : dim_(dim), data_(std::move(data)) {}

  std::vector<UnitVector> compute_facet_normals() const {
    const auto& gens = polyhedral_data().generators;
    std::vector<UnitVector> out;
    if (dim_ == 2) {
      // order generators by signed angle around an interior direction
      const UnitVector d = [&] {
        vec::Vector s(2, 0.0);
        for (const auto& g : gens) s = vec::add(s, g.coords());
        return UnitVector::normalized(std::move(s));
      }();
      const vec::Vector dp = detail::rotate90(d.coords());
      double lo = 1e300, hi = -1e300;
      std::size_t ilo = 0, ihi = 0;
      for (std::size_t k = 0; k < gens.size(); ++k) {
        const double ang =
            std::atan2(vec::dot(gens[k].coords(), dp), vec::dot(gens[k].coords(), d.coords()));
        if (ang < lo) { lo = ang; ilo = k; }
        if (ang > hi) { hi = ang; ihi = k; }
      }
      if (hi - lo < 1e-9) throw DegenerateCone("polyhedral cone in n=2 has empty interior");
      // outward normals of the two extreme rays
      out.push_back(UnitVector(detail::rotate90(gens[ihi].coords())));
      out.push_back(UnitVector(vec::scaled(detail::rotate90(gens[ilo].coords()), -1.0)));
      return out;
    }
    // n == 3: a facet normal is a generator cross product with all other
    // generators on one side.
    for (std::size_t i = 0; i < gens.size(); ++i) {
      for (std::size_t j = i + 1; j < gens.size(); ++j) {
        vec::Vector w = vec::cross3(gens[i].coords(), gens[j].coords());
        const double nw = vec::norm(w);
        if (nw < 1e-12) continue;
        w = vec::scaled(w, 1.0 / nw);
        bool all_neg = true, all_pos = true;
        for (const auto& g : gens) {
          const double s = vec::dot(g.coords(), w);
          if (s > 1e-11) all_neg = false;
          if (s < -1e-11) all_pos = false;
        }
        if (!all_neg && !all_pos) continue;
        if (all_pos) w = vec::scaled(w, -1.0);
        bool dup = false;
        for (const auto& existing : out)
          if (vec::distance(existing.coords(), w) < 1e-9) { dup = true; break; }
        if (!dup) out.push_back(UnitVector(std::move(w)));
      }
    }
    if (out.size() < 3) throw DegenerateCone("polyhedral cone in n=3 has empty interior");
    return out;
  }

  std::size_t dim_ = 0;
  std::variant<CircularCone, PolyhedralCone> data_;
  std::vector<UnitVector> facet_normals_;  // polyhedral, n=2,3 only
};

inline ConeSpec dual_cone(const ConeSpec& cone) { return cone.dual(); }

inline bool in_interior(const ConeSpec& cone, const vec::Vector& x) {
  return cone.in_interior(x);
}

/// Loose structural equality (same family, axis/generators within 1e-9).
inline bool same_cone(const ConeSpec& a, const ConeSpec& b) {
  if (a.dim() != b.dim() || a.is_circular() != b.is_circular()) return false;
  if (a.is_circular()) {
    return angular_distance(a.circular_data().axis, b.circular_data().axis) < 1e-9 &&
           std::abs(a.circular_data().half_angle - b.circular_data().half_angle) < 1e-12;
  }
  const auto& ga = a.polyhedral_data().generators;
  const auto& gb = b.polyhedral_data().generators;
  if (ga.size() != gb.size()) return false;
  for (std::size_t k = 0; k < ga.size(); ++k)
    if (angular_distance(ga[k], gb[k]) >= 1e-9) return false;
  return true;
}

enum class RegionKind { OmegaC, OmegaCDual };

/// Omega_C = S^{n-1} ∩ int C or Omega_{C°} = S^{n-1} ∩ int C°.
class SphericalRegion {
 public:
  SphericalRegion(RegionKind which, ConeSpec cone)
      : which_(which), cone_(std::move(cone)) {}

  RegionKind which() const { return which_; }
  const ConeSpec& cone() const { return cone_; }

  /// C itself for OmegaC, C° for OmegaCDual.
  ConeSpec effective_cone() const {
    return which_ == RegionKind::OmegaC ? cone_ : cone_.dual();
  }

  bool contains(const UnitVector& v) const {
    return effective_cone().in_interior(v.coords());
  }

  double boundary_margin(const UnitVector& v) const {
    return effective_cone().boundary_margin(v);
  }

 private:
  RegionKind which_;
  ConeSpec cone_;
};

inline constexpr double kNearOrthogonalThreshold = 1e-12;

/// Transport cost c(u,v) = log|<u,v>| for u in Omega_{C°}, v in Omega_C.
/// Always <= 0 on the admissible domain; symmetric in its arguments.
inline double cost(const UnitVector& u, const UnitVector& v, const ConeSpec& cone) {
  if (!cone.dual().in_interior(u.coords()))
    throw DomainError("cost: u is not strictly inside Omega_{C_dual}");
  if (!cone.in_interior(v.coords()))
    throw DomainError("cost: v is not strictly inside Omega_C");
  const double p = std::abs(dot(u, v));
  if (p < kNearOrthogonalThreshold)
    throw NearOrthogonal("cost: |<u,v>| below 1e-12; inputs touch the cost singularity");
  return std::log(p);
}

/// Cost without region validation, for bulk paths that validate inputs once.
inline double cost_unchecked(const UnitVector& u, const UnitVector& v) {
  const double p = std::abs(dot(u, v));
  if (p < kNearOrthogonalThreshold)
    throw NearOrthogonal("cost: |<u,v>| below 1e-12; inputs touch the cost singularity");
  return std::log(p);
}

inline constexpr double kSampleBoundaryMargin = 1e-3;

namespace detail {

// Random unit vector in the orthogonal complement of `axis`.
inline vec::Vector random_tangent(const UnitVector& axis, SplitMix64& rng) {
  const std::size_t n = axis.dim();
  while (true) {
    vec::Vector w(n);
    for (double& x : w) x = rng.gaussian();
    w = vec::axpy(-vec::dot(w, axis.coords()), axis.coords(), w);
    const double nw = vec::norm(w);
    if (nw > 1e-8) return vec::scaled(w, 1.0 / nw);
  }
}

// Polar angle with surface density proportional to sin^{n-2}, via rejection.
inline double random_polar_angle(double max_angle, std::size_t dim, SplitMix64& rng) {
  if (dim == 2) return rng.uniform(0.0, max_angle);
  const double peak = std::sin(std::min(max_angle, 1.5707963267948966));
  while (true) {
    const double phi = rng.uniform(0.0, max_angle);
    const double accept = std::pow(std::sin(phi) / peak, static_cast<double>(dim - 2));
    if (rng.uniform() <= accept) return phi;
  }
}

}  // namespace detail

/// Deterministic pseudorandom points strictly inside the region, each at
/// angular distance >= 1e-3 from the region boundary.
inline std::vector<UnitVector> sample_region(const SphericalRegion& region,
                                             std::size_t count, std::uint64_t seed) {
  if (count < 1) throw DomainError("sample_region: count must be >= 1");
  const ConeSpec eff = region.effective_cone();
  SplitMix64 rng(seed ^ 0xc0ffee1234abcdefULL);
  std::vector<UnitVector> out;
  out.reserve(count);
  if (eff.is_circular()) {
    const auto& c = eff.circular_data();
    const double span = c.half_angle - kSampleBoundaryMargin;
    if (!(span > 0.0))
      throw DomainError("sample_region: region narrower than the sampling margin");
    while (out.size() < count) {
      const double phi = detail::random_polar_angle(span, eff.dim(), rng);
      const vec::Vector t = detail::random_tangent(c.axis, rng);
      vec::Vector v = vec::axpy(std::sin(phi), t, vec::scaled(c.axis.coords(), std::cos(phi)));
      out.push_back(UnitVector::normalized(std::move(v)));
    }
    return out;
  }
  const auto& gens = eff.polyhedral_data().generators;
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 200000 * count)
      throw Error("sample_region: rejection sampling failed (cone too narrow?)");
    vec::Vector x(eff.dim(), 0.0);
    for (const auto& g : gens) {
      const double r = rng.uniform();
      x = vec::axpy(0.02 + r * r, g.coords(), x);
    }
    UnitVector v = UnitVector::normalized(std::move(x));
    if (eff.boundary_margin(v) >= kSampleBoundaryMargin) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace conic_transport
