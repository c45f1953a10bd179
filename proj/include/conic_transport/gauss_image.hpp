// conic-transport - measure transport for cone geometries
// Copyright 2026 The conic-transport Contributors
// Licensed under Apache 2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "conic_transport/errors.hpp"
#include "conic_transport/geometry.hpp"
#include "conic_transport/pseudo_cone.hpp"
#include "conic_transport/random.hpp"
#include "conic_transport/transport.hpp"

namespace conic_transport {

/// Discrete Gauss image solution: a pseudo-cone whose pseudo-subdifferential
/// carries an optimal plan between mu and nu, together with the plan, the
/// dual potentials, and the optimal total cost. Facet normals are exactly
/// the mu-atoms; offsets b_j = exp(phi_j - max phi) fix the dilation gauge
/// at max b = 1.
struct GaussImageSolution {
  DiscreteMeasure mu;
  DiscreteMeasure nu;
  PseudoCone cone_K;
  TransportPlan plan;
  DualPotentials potentials;
  double total_cost = 0.0;
};

inline GaussImageSolution solve_gauss_image(const DiscreteMeasure& mu,
                                            const DiscreteMeasure& nu) {
  OtSolution ot = solve_ot(mu, nu);

  const double phi_max = *std::max_element(ot.potentials.phi.begin(),
                                           ot.potentials.phi.end());
  std::vector<Facet> facets;
  facets.reserve(mu.size());
  for (std::size_t j = 0; j < mu.size(); ++j)
    facets.push_back({mu.point(j), std::exp(ot.potentials.phi[j] - phi_max)});
  PseudoCone K(mu.region().cone(), std::move(facets));

  constexpr double kCertTol = 1e-8;
  // plan support must sit inside the pseudo-subdifferential; for facet
  // normals this is the exact check that facet j attains the radial maximum
  for (const auto& e : ot.plan.entries()) {
    const double lhs =
        std::abs(dot(nu.point(e.target), mu.point(e.source))) * radial(K, nu.point(e.target));
    if (lhs > K.facets()[e.source].offset * (1.0 + kCertTol))
      throw CertificateFailure(
          "solve_gauss_image: plan support entry escapes the pseudo-subdifferential");
  }
  // log rho(v_i) must equal -psi_i up to one shared constant
  double cmin = std::numeric_limits<double>::infinity(), cmax = -cmin;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const double c = -std::log(radial(K, nu.point(i))) - ot.potentials.psi[i];
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }
  if (cmax - cmin > kCertTol)
    throw CertificateFailure("solve_gauss_image: radial/psi gauge constant drifts");
  // strong duality at the LP optimum
  double dual_value = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j)
    dual_value += ot.potentials.phi[j] * mu.weight(j);
  for (std::size_t i = 0; i < nu.size(); ++i)
    dual_value += ot.potentials.psi[i] * nu.weight(i);
  if (std::abs(dual_value - ot.total_cost) > kCertTol)
    throw CertificateFailure("solve_gauss_image: duality gap beyond tolerance");

  return {mu, nu, std::move(K), std::move(ot.plan), std::move(ot.potentials),
          ot.total_cost};
}

struct OptimalityReport {
  std::size_t plan_trials = 0;
  std::size_t map_trials = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  bool ok = true;
};

namespace detail {

// Smallest common denominator <= limit such that every weight is an integer
// multiple of 1/d, or 0 if none.
inline std::size_t common_denominator(const std::vector<double>& weights,
                                      std::size_t limit = 4096) {
  for (std::size_t d = 1; d <= limit; ++d) {
    bool ok = true;
    for (const double w : weights) {
      const double scaled = w * static_cast<double>(d);
      if (std::abs(scaled - std::round(scaled)) > 1e-9 * static_cast<double>(d) ||
          std::round(scaled) < 1.0) {
        ok = false;
        break;
      }
    }
    if (ok) return d;
  }
  return 0;
}

}  // namespace detail

/// Audits optimality against seeded random competitors: basic feasible plans
/// from a randomized northwest-corner rule, plus competitor maps on the
/// unit-expanded atoms when all weights share a common unit.
inline OptimalityReport certify_optimality(const GaussImageSolution& sol,
                                           std::size_t trials, std::uint64_t seed) {
  OptimalityReport rep;
  if (trials == 0) return rep;
  const auto C = cost_matrix(sol.mu, sol.nu);
  SplitMix64 rng(seed ^ 0x5afe5afe5afe5afeULL);
  const std::size_t M = sol.mu.size(), N = sol.nu.size();

  std::vector<std::size_t> rows(M), cols(N);
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  for (std::size_t t = 0; t < trials; ++t) {
    rng.shuffle(rows);
    rng.shuffle(cols);
    std::vector<double> supply(M), demand(N);
    for (std::size_t j = 0; j < M; ++j) supply[j] = sol.mu.weight(rows[j]);
    for (std::size_t i = 0; i < N; ++i) demand[i] = sol.nu.weight(cols[i]);
    double competitor = 0.0;
    for (const auto& cell : detail::northwest_corner(supply, demand))
      competitor += cell.mass * C[rows[cell.j]][cols[cell.i]];
    const double gap = competitor - sol.total_cost;
    rep.min_gap = std::min(rep.min_gap, gap);
    rep.ok = rep.ok && gap >= -1e-9;
    ++rep.plan_trials;
  }

  std::vector<double> all_weights;
  for (std::size_t j = 0; j < M; ++j) all_weights.push_back(sol.mu.weight(j));
  for (std::size_t i = 0; i < N; ++i) all_weights.push_back(sol.nu.weight(i));
  const std::size_t D = detail::common_denominator(all_weights);
  if (D > 0 && D <= 4096) {
    std::vector<std::size_t> src_units, tgt_units;
    for (std::size_t j = 0; j < M; ++j) {
      const auto reps = static_cast<std::size_t>(std::llround(sol.mu.weight(j) * D));
      src_units.insert(src_units.end(), reps, j);
    }
    for (std::size_t i = 0; i < N; ++i) {
      const auto reps = static_cast<std::size_t>(std::llround(sol.nu.weight(i) * D));
      tgt_units.insert(tgt_units.end(), reps, i);
    }
    for (std::size_t t = 0; t < trials; ++t) {
      rng.shuffle(tgt_units);
      double competitor = 0.0;
      for (std::size_t s = 0; s < src_units.size(); ++s)
        competitor += C[src_units[s]][tgt_units[s]] / static_cast<double>(D);
      const double gap = competitor - sol.total_cost;
      rep.min_gap = std::min(rep.min_gap, gap);
      rep.ok = rep.ok && gap >= -1e-9;
      ++rep.map_trials;
    }
  }
  return rep;
}

struct PushforwardReport {
  std::vector<double> per_target_mass;
  double tv_gap = 0.0;  // total variation distance to nu
  std::vector<std::size_t> targets_per_source;
  std::size_t split_sources = 0;   // sources whose mass splits across targets
  std::size_t merged_sources = 0;  // sources sharing a target with another
};

/// Restates the pushforward condition for the discrete plan: aggregated plan
/// mass per nu-atom against nu, plus the split/merge structure of sources
/// (the discrete trace of mu charging omega_K).
inline PushforwardReport pushforward_report(const GaussImageSolution& sol) {
  PushforwardReport rep;
  rep.per_target_mass = sol.plan.col_sums();
  for (std::size_t i = 0; i < sol.nu.size(); ++i)
    rep.tv_gap += std::abs(rep.per_target_mass[i] - sol.nu.weight(i));
  rep.tv_gap *= 0.5;
  rep.targets_per_source.assign(sol.mu.size(), 0);
  std::vector<std::size_t> sources_per_target(sol.nu.size(), 0);
  for (const auto& e : sol.plan.entries()) {
    ++rep.targets_per_source[e.source];
    ++sources_per_target[e.target];
  }
  for (const auto t : rep.targets_per_source)
    if (t >= 2) ++rep.split_sources;
  std::vector<char> shares(sol.mu.size(), 0);
  for (const auto& e : sol.plan.entries())
    if (sources_per_target[e.target] >= 2) shares[e.source] = 1;
  for (const char s : shares) rep.merged_sources += s;
  return rep;
}

}  // namespace conic_transport
