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
#include "conic_transport/pseudo_cone.hpp"
#include "conic_transport/transport.hpp"

namespace conic_transport {

/// Chain-infimum potential of a c-cyclically monotone pairing: values a_i in
/// f_i(v) = log|<v,u_i>| + a_i, with b_i = exp(-a_i) the facet offsets.
struct RochetPotential {
  std::size_t base_index = 0;
  std::vector<double> a;  // one per pair of S
  std::vector<double> b;  // exp(-a)
};

namespace detail {

// Representative index per pair after deduplication at 1e-9 angular tolerance
// on both components.
inline std::vector<std::size_t> dedupe_pairs(const Pairing& S) {
  std::vector<std::size_t> rep(S.size());
  for (std::size_t i = 0; i < S.size(); ++i) {
    rep[i] = i;
    for (std::size_t k = 0; k < i; ++k) {
      if (rep[k] != k) continue;
      if (angular_distance(S[i].v, S[k].v) < 1e-9 &&
          angular_distance(S[i].u, S[k].u) < 1e-9) {
        rep[i] = k;
        break;
      }
    }
  }
  return rep;
}

}  // namespace detail

/// Shortest-path realization of the Rochet chain infimum: a_j is the distance
/// from the base pair to pair j in the exchange graph with edge weight
/// w(i->j) = c(v_j,u_i) - c(v_j,u_j), shifted by -c(v_0,u_0) so that the
/// potential phi(v) = min_j (c(v,u_j) + a_j) vanishes at the base direction.
/// Chains longer than the pair count never improve the infimum once no
/// negative cycle exists, so Bellman-Ford computes it exactly for finite S.
inline RochetPotential build_potential(const Pairing& S, std::size_t base_index,
                                       const ConeSpec& cone) {
  if (base_index >= S.size()) throw DomainError("build_potential: base_index out of range");
  const auto rep = detail::dedupe_pairs(S);
  std::vector<std::size_t> uniq;
  std::vector<std::size_t> uniq_id(S.size());
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (rep[i] == i) {
      uniq_id[i] = uniq.size();
      uniq.push_back(i);
    }
  }
  for (std::size_t i = 0; i < S.size(); ++i) uniq_id[i] = uniq_id[rep[i]];

  std::vector<VUPair> upairs;
  upairs.reserve(uniq.size());
  for (const std::size_t k : uniq) upairs.push_back(S[k]);
  const Pairing US(std::move(upairs));
  const auto cc = detail::pair_cost_matrix(US, cone);
  const std::size_t n = US.size();
  const std::size_t src = uniq_id[base_index];
  auto weight = [&](std::size_t i, std::size_t j) { return cc[j][i] - cc[j][j]; };

  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> pred(n, n);
  dist[src] = 0.0;
  bool improved = true;
  for (std::size_t round = 0; round + 1 < n && improved; ++round) {
    improved = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(dist[i])) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double cand = dist[i] + weight(i, j);
        if (cand < dist[j] - 1e-15) {
          dist[j] = cand;
          pred[j] = i;
          improved = true;
        }
      }
    }
  }
  if (improved && n > 1) {
    // detection round: any further strict improvement exposes a cycle
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(dist[i])) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || !(dist[i] + weight(i, j) < dist[j] - 1e-12)) continue;
        pred[j] = i;
        std::size_t x = j;
        for (std::size_t k = 0; k <= n; ++k) x = pred[x];
        std::vector<std::size_t> cycle;
        std::size_t y = x;
        do {
          cycle.push_back(y);
          y = pred[y];
        } while (y != x && cycle.size() <= n);
        if (y != x) continue;
        std::reverse(cycle.begin(), cycle.end());
        double w = 0.0;
        for (std::size_t t = 0; t < cycle.size(); ++t)
          w += weight(cycle[t], cycle[(t + 1) % cycle.size()]);
        if (w < -kMonotoneTolerance) {
          for (std::size_t& idx : cycle) idx = uniq[idx];  // report original indices
          throw NotMonotone("build_potential: pairing admits a negative exchange cycle",
                            std::move(cycle), w);
        }
      }
    }
  }

  RochetPotential P;
  P.base_index = base_index;
  P.a.resize(S.size());
  P.b.resize(S.size());
  const double shift = cc[src][src];
  for (std::size_t i = 0; i < S.size(); ++i) {
    P.a[i] = dist[uniq_id[i]] - shift;
    P.b[i] = std::exp(-P.a[i]);
  }
  return P;
}

/// phi(v) = min_j (c(v,u_j) + a_j) = -log rho_K(v) for K = build_cone(P,S).
inline double phi_eval(const RochetPotential& P, const Pairing& S, const UnitVector& v,
                       const ConeSpec& cone) {
  if (P.a.size() != S.size()) throw DomainError("phi_eval: potential does not match S");
  if (!cone.in_interior(v.coords()))
    throw DomainError("phi_eval: v is not strictly inside Omega_C");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < S.size(); ++j)
    best = std::min(best, cost_unchecked(S[j].u, v) + P.a[j]);
  return best;
}

/// K = ∩_j {x in C : <x,u_j> <= -b_j}; S is contained in its
/// pseudo-subdifferential whenever the potential was built without
/// NotMonotone.
inline PseudoCone build_cone(const RochetPotential& P, const Pairing& S,
                             const ConeSpec& cone) {
  if (P.a.size() != S.size()) throw DomainError("build_cone: potential does not match S");
  std::vector<Facet> facets;
  for (std::size_t j = 0; j < S.size(); ++j) {
    bool dup = false;
    for (const auto& f : facets) {
      if (angular_distance(f.normal, S[j].u) < 1e-9) {
        if (std::abs(std::log(f.offset) - std::log(P.b[j])) > 1e-7)
          throw CertificateFailure(
              "build_cone: duplicate normals received inconsistent offsets");
        dup = true;
        break;
      }
    }
    if (!dup) facets.push_back({S[j].u, P.b[j]});
  }
  return PseudoCone(cone, std::move(facets));
}

struct PairCheck {
  bool ok = false;
  double gap = 0.0;  // |<v,u>| rho_K(v) / h_bar_K(u) - 1
};

struct ContainmentReport {
  bool ok = false;
  double worst_violation = 0.0;
  std::vector<PairCheck> per_pair;
};

/// Checks S ⊆ ∂•K pair by pair and reports the largest relative gap.
inline ContainmentReport verify_containment(const Pairing& S, const PseudoCone& K,
                                            double tol = 1e-8) {
  validate_pairing(S, K.cone());
  ContainmentReport rep;
  rep.ok = true;
  rep.worst_violation = -std::numeric_limits<double>::infinity();
  for (const auto& p : S.pairs()) {
    const auto check = detail::check_pseudo_subdifferential(K, p.v, p.u, tol);
    rep.per_pair.push_back({check.member, check.gap});
    rep.ok = rep.ok && check.member;
    rep.worst_violation = std::max(rep.worst_violation, check.gap);
  }
  return rep;
}

}  // namespace conic_transport
