// conic-transport - measure transport for cone geometries
// Copyright 2026 The conic-transport Contributors
// Licensed under Apache 2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

#include "conic_transport/errors.hpp"
#include "conic_transport/geometry.hpp"

namespace conic_transport {

struct Atom {
  UnitVector point;
  double weight;
};

/// Finitely supported probability measure on Omega_C or Omega_{C_dual}.
class DiscreteMeasure {
 public:
  DiscreteMeasure(SphericalRegion region, std::vector<Atom> atoms)
      : region_(std::move(region)), atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw DomainError("DiscreteMeasure: needs at least one atom");
    double total = 0.0;
    for (const auto& a : atoms_) {
      if (!(a.weight > 0.0)) throw DomainError("DiscreteMeasure: weights must be positive");
      if (!region_.contains(a.point))
        throw DomainError("DiscreteMeasure: atom not strictly inside its region");
      total += a.weight;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw DomainError("DiscreteMeasure: weights must sum to 1 within 1e-12");
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      for (std::size_t k = i + 1; k < atoms_.size(); ++k)
        if (angular_distance(atoms_[i].point, atoms_[k].point) <= 1e-9)
          throw DomainError("DiscreteMeasure: atoms must be pairwise distinct");
  }

  const SphericalRegion& region() const { return region_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  const UnitVector& point(std::size_t i) const { return atoms_[i].point; }
  double weight(std::size_t i) const { return atoms_[i].weight; }

 private:
  SphericalRegion region_;
  std::vector<Atom> atoms_;
};

struct VUPair {
  UnitVector v;  // in Omega_C
  UnitVector u;  // in Omega_{C_dual}
};

/// Finite candidate subset of some pseudo-subdifferential.
class Pairing {
 public:
  explicit Pairing(std::vector<VUPair> pairs) : pairs_(std::move(pairs)) {
    if (pairs_.empty()) throw DomainError("Pairing: needs at least one pair");
  }

  const std::vector<VUPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  const VUPair& operator[](std::size_t i) const { return pairs_[i]; }

 private:
  std::vector<VUPair> pairs_;
};

inline void validate_pairing(const Pairing& S, const ConeSpec& cone) {
  const ConeSpec dual = cone.dual();
  for (const auto& p : S.pairs()) {
    if (!cone.in_interior(p.v.coords()))
      throw DomainError("Pairing: v not strictly inside Omega_C");
    if (!dual.in_interior(p.u.coords()))
      throw DomainError("Pairing: u not strictly inside Omega_{C_dual}");
  }
}

struct PlanEntry {
  std::size_t source;  // mu-atom index j
  std::size_t target;  // nu-atom index i
  double mass;
};

/// Sparse coupling between a source and a target measure.
class TransportPlan {
 public:
  TransportPlan(std::size_t sources, std::size_t targets, std::vector<PlanEntry> entries)
      : sources_(sources), targets_(targets), entries_(std::move(entries)) {}

  std::size_t source_count() const { return sources_; }
  std::size_t target_count() const { return targets_; }
  const std::vector<PlanEntry>& entries() const { return entries_; }

  std::vector<double> row_sums() const {
    std::vector<double> r(sources_, 0.0);
    for (const auto& e : entries_) r[e.source] += e.mass;
    return r;
  }

  std::vector<double> col_sums() const {
    std::vector<double> c(targets_, 0.0);
    for (const auto& e : entries_) c[e.target] += e.mass;
    return c;
  }

 private:
  std::size_t sources_ = 0;
  std::size_t targets_ = 0;
  std::vector<PlanEntry> entries_;
};

/// Kantorovich dual variables, normalized so phi[0] = 0. Feasible
/// (phi_j + psi_i <= cost_ji) with equality on the plan support.
struct DualPotentials {
  std::vector<double> phi;  // one per mu-atom
  std::vector<double> psi;  // one per nu-atom
};

/// Entry (j,i) = log|<u_j, v_i>|; all entries finite and <= 0.
inline std::vector<std::vector<double>> cost_matrix(const DiscreteMeasure& mu,
                                                    const DiscreteMeasure& nu) {
  if (mu.region().which() != RegionKind::OmegaCDual)
    throw DomainError("cost_matrix: mu must live on Omega_{C_dual}");
  if (nu.region().which() != RegionKind::OmegaC)
    throw DomainError("cost_matrix: nu must live on Omega_C");
  if (!same_cone(mu.region().cone(), nu.region().cone()))
    throw DomainError("cost_matrix: measures live over different cones");
  std::vector<std::vector<double>> c(mu.size(), std::vector<double>(nu.size()));
  for (std::size_t j = 0; j < mu.size(); ++j)
    for (std::size_t i = 0; i < nu.size(); ++i)
      c[j][i] = cost_unchecked(mu.point(j), nu.point(i));
  return c;
}

inline double plan_cost(const TransportPlan& plan,
                        const std::vector<std::vector<double>>& costs) {
  double total = 0.0;
  for (const auto& e : plan.entries()) total += e.mass * costs[e.source][e.target];
  return total;
}

namespace detail {

struct BasicCell {
  std::size_t j, i;
  double mass;
};

inline std::vector<BasicCell> northwest_corner(const std::vector<double>& supply,
                                               const std::vector<double>& demand) {
  const std::size_t M = supply.size(), N = demand.size();
  std::vector<BasicCell> cells;
  cells.reserve(M + N - 1);
  std::size_t j = 0, i = 0;
  double ra = supply[0], rb = demand[0];
  while (true) {
    const double t = std::min(ra, rb);
    cells.push_back({j, i, t});
    ra -= t;
    rb -= t;
    if (j == M - 1 && i == N - 1) break;
    if (j < M - 1 && (ra <= rb || i == N - 1)) {
      ++j;
      ra = supply[j];
    } else {
      ++i;
      rb = demand[i];
    }
  }
  return cells;
}

// Duals from the spanning tree of basic cells: phi[0]=0, phi_j + psi_i = C_ji
// on every basic cell.
inline void tree_duals(const std::vector<BasicCell>& basis,
                       const std::vector<std::vector<double>>& C, std::size_t M,
                       std::size_t N, std::vector<double>& phi, std::vector<double>& psi) {
  phi.assign(M, std::numeric_limits<double>::quiet_NaN());
  psi.assign(N, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::vector<std::size_t>> row_cells(M), col_cells(N);
  for (std::size_t c = 0; c < basis.size(); ++c) {
    row_cells[basis[c].j].push_back(c);
    col_cells[basis[c].i].push_back(c);
  }
  phi[0] = 0.0;
  std::queue<std::pair<bool, std::size_t>> q;  // (is_row, index)
  q.push({true, 0});
  while (!q.empty()) {
    auto [is_row, idx] = q.front();
    q.pop();
    const auto& cells = is_row ? row_cells[idx] : col_cells[idx];
    for (const std::size_t c : cells) {
      const auto& cell = basis[c];
      if (is_row && std::isnan(psi[cell.i])) {
        psi[cell.i] = C[cell.j][cell.i] - phi[cell.j];
        q.push({false, cell.i});
      } else if (!is_row && std::isnan(phi[cell.j])) {
        phi[cell.j] = C[cell.j][cell.i] - psi[cell.i];
        q.push({true, cell.j});
      }
    }
  }
}

// Unique tree path between row j0 and column i0, returned as basic-cell
// indices in traversal order (row -> col -> row -> ... -> col).
inline std::vector<std::size_t> tree_path(const std::vector<BasicCell>& basis,
                                          std::size_t M, std::size_t N, std::size_t j0,
                                          std::size_t i0) {
  const std::size_t nodes = M + N;  // rows then cols
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(nodes);
  for (std::size_t c = 0; c < basis.size(); ++c) {
    adj[basis[c].j].push_back({M + basis[c].i, c});
    adj[M + basis[c].i].push_back({basis[c].j, c});
  }
  std::vector<std::size_t> parent_node(nodes, nodes), parent_cell(nodes, basis.size());
  std::vector<char> seen(nodes, 0);
  std::queue<std::size_t> q;
  q.push(j0);
  seen[j0] = 1;
  while (!q.empty()) {
    const std::size_t x = q.front();
    q.pop();
    if (x == M + i0) break;
    for (const auto& [y, c] : adj[x]) {
      if (!seen[y]) {
        seen[y] = 1;
        parent_node[y] = x;
        parent_cell[y] = c;
        q.push(y);
      }
    }
  }
  std::vector<std::size_t> path;
  std::size_t x = M + i0;
  while (x != j0) {
    path.push_back(parent_cell[x]);
    x = parent_node[x];
  }
  std::reverse(path.begin(), path.end());
  return path;
}

struct SimplexResult {
  std::vector<BasicCell> basis;
  std::vector<double> phi, psi;
};

// Transportation simplex with Bland's rule for anti-cycling. Returns the
// final basis (a spanning tree, zero allocations included) and its duals.
inline SimplexResult transportation_simplex(const std::vector<double>& supply,
                                            const std::vector<double>& demand,
                                            const std::vector<std::vector<double>>& C) {
  const std::size_t M = supply.size(), N = demand.size();
  constexpr double kEnterTol = 1e-13;
  std::vector<BasicCell> basis = northwest_corner(supply, demand);
  std::vector<std::vector<char>> is_basic(M, std::vector<char>(N, 0));
  for (const auto& c : basis) is_basic[c.j][c.i] = 1;
  std::vector<double> phi, psi;
  const std::size_t max_iter = 5000 + 50 * M * N;
  for (std::size_t iter = 0;; ++iter) {
    if (iter >= max_iter) throw Error("solve_ot: simplex iteration limit exceeded");
    tree_duals(basis, C, M, N, phi, psi);
    // Bland: entering cell = smallest linear index with negative reduced cost
    std::size_t ej = M, ei = N;
    for (std::size_t j = 0; j < M && ej == M; ++j)
      for (std::size_t i = 0; i < N; ++i) {
        if (is_basic[j][i]) continue;
        if (C[j][i] - phi[j] - psi[i] < -kEnterTol) {
          ej = j;
          ei = i;
          break;
        }
      }
    if (ej == M) break;  // optimal
    const auto path = tree_path(basis, M, N, ej, ei);
    // entering gets +theta; path cells alternate -,+,-,... starting at -
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < path.size(); t += 2)
      theta = std::min(theta, basis[path[t]].mass);
    // Bland tie-break on the leaving variable: smallest (j,i)
    std::size_t leave = basis.size();
    for (std::size_t t = 0; t < path.size(); t += 2) {
      const auto& cell = basis[path[t]];
      if (cell.mass <= theta) {
        if (leave == basis.size() ||
            cell.j * N + cell.i < basis[leave].j * N + basis[leave].i)
          leave = path[t];
      }
    }
    for (std::size_t t = 0; t < path.size(); ++t) {
      basis[path[t]].mass += (t % 2 == 0 ? -theta : theta);
      if (basis[path[t]].mass < 0.0) basis[path[t]].mass = 0.0;
    }
    is_basic[basis[leave].j][basis[leave].i] = 0;
    is_basic[ej][ei] = 1;
    basis[leave] = {ej, ei, theta};
  }
  return {std::move(basis), std::move(phi), std::move(psi)};
}

}  // namespace detail

struct OtSolution {
  TransportPlan plan;
  DualPotentials potentials;
  double total_cost = 0.0;
};

/// Exact minimizer of sum pi_ji * log|<u_j, v_i>| subject to the marginals,
/// via the transportation simplex; duals come from the final spanning tree.
inline OtSolution solve_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.size() > 1000 || nu.size() > 1000)
    throw TooLarge("solve_ot: at most 1000 atoms per side");
  std::vector<double> supply(mu.size()), demand(nu.size());
  for (std::size_t j = 0; j < mu.size(); ++j) supply[j] = mu.weight(j);
  for (std::size_t i = 0; i < nu.size(); ++i) demand[i] = nu.weight(i);
  const double gap = std::abs(std::accumulate(supply.begin(), supply.end(), 0.0) -
                              std::accumulate(demand.begin(), demand.end(), 0.0));
  if (gap > 1e-10)
    throw InfeasibleMarginals("solve_ot: marginal sums differ beyond 1e-10");
  const auto C = cost_matrix(mu, nu);
  auto res = detail::transportation_simplex(supply, demand, C);
  std::vector<PlanEntry> entries;
  double total = 0.0;
  for (const auto& cell : res.basis) {
    if (cell.mass > 1e-15) {
      entries.push_back({cell.j, cell.i, cell.mass});
      total += cell.mass * C[cell.j][cell.i];
    }
  }
  std::sort(entries.begin(), entries.end(), [](const PlanEntry& a, const PlanEntry& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
  return {TransportPlan(mu.size(), nu.size(), std::move(entries)),
          DualPotentials{std::move(res.phi), std::move(res.psi)}, total};
}

inline constexpr double kMonotoneTolerance = 1e-9;

struct MonotonicityReport {
  bool monotone = true;
  // min over examined cycles of (relabeled sum - original sum); negative
  // values beyond tolerance witness a violation
  double worst_gap = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> worst_cycle;  // pair indices in cycle order
};

namespace detail {

// cc[p][q] = c(v_p, u_q) for pairs p, q of S.
inline std::vector<std::vector<double>> pair_cost_matrix(const Pairing& S,
                                                         const ConeSpec& cone) {
  validate_pairing(S, cone);
  const std::size_t n = S.size();
  std::vector<std::vector<double>> cc(n, std::vector<double>(n));
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      cc[p][q] = cost_unchecked(S[q].u, S[p].v);
  return cc;
}

}  // namespace detail

/// Exhaustive c-cyclic monotonicity check over every subset of S and every
/// cyclic order of that subset. A permutation factors into disjoint cycles
/// and fixed points drop out of both sides, so checking all cycles over all
/// subsets is equivalent to checking all permutations of all tuples; the
/// test suite verifies this against full permutation enumeration at N <= 5.
inline MonotonicityReport check_monotone_bruteforce_report(
    const Pairing& S, const ConeSpec& cone, double tol = kMonotoneTolerance) {
  const std::size_t n = S.size();
  if (n > 9) throw TooLarge("check_monotone_bruteforce: at most 9 pairs");
  const auto cc = detail::pair_cost_matrix(S, cone);
  MonotonicityReport rep;
  std::vector<std::size_t> idx, tail;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) < 2) continue;
    idx.clear();
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (1u << k)) idx.push_back(k);
    double base = 0.0;
    for (const std::size_t k : idx) base += cc[k][k];
    tail.assign(idx.begin() + 1, idx.end());
    std::sort(tail.begin(), tail.end());
    do {
      double relabeled = cc[idx[0]][tail[0]];
      for (std::size_t t = 0; t + 1 < tail.size(); ++t) relabeled += cc[tail[t]][tail[t + 1]];
      relabeled += cc[tail.back()][idx[0]];
      const double gap = relabeled - base;
      if (gap < rep.worst_gap) {
        rep.worst_gap = gap;
        rep.worst_cycle.clear();
        rep.worst_cycle.push_back(idx[0]);
        rep.worst_cycle.insert(rep.worst_cycle.end(), tail.begin(), tail.end());
      }
    } while (std::next_permutation(tail.begin(), tail.end()));
  }
  rep.monotone = !(rep.worst_gap < -tol);
  return rep;
}

/// Negative-cycle formulation: exchange graph with edge weight
/// w(i->j) = c(v_j, u_i) - c(v_j, u_j); S is monotone iff no cycle has
/// total weight below -tol. Bellman-Ford from a virtual source; candidate
/// cycles extracted from the predecessor graph are re-evaluated exactly.
inline MonotonicityReport check_monotone_cycles_report(
    const Pairing& S, const ConeSpec& cone, double tol = kMonotoneTolerance) {
  const std::size_t n = S.size();
  if (n > 2048) throw TooLarge("check_monotone_cycles: at most 2048 pairs");
  const auto cc = detail::pair_cost_matrix(S, cone);
  MonotonicityReport rep;
  if (n < 2) return rep;
  auto weight = [&](std::size_t i, std::size_t j) { return cc[j][i] - cc[j][j]; };

  std::vector<double> dist(n, 0.0);  // virtual source: zero edge to every node
  std::vector<std::size_t> pred(n, n);
  bool improved_last = false;
  for (std::size_t round = 0; round < n; ++round) {
    improved_last = false;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double cand = dist[i] + weight(i, j);
        if (cand < dist[j] - 1e-15) {
          dist[j] = cand;
          pred[j] = i;
          improved_last = true;
        }
      }
    if (!improved_last) break;
  }
  if (!improved_last) return rep;  // converged: no negative cycle at all

  // Relaxation still active after n rounds: walk predecessors to find cycles
  // and evaluate their exact weights.
  std::vector<char> handled(n, 0);
  for (std::size_t start = 0; start < n; ++start) {
    if (pred[start] == n || handled[start]) continue;
    std::size_t x = start;
    for (std::size_t k = 0; k < n + 1; ++k) {
      if (pred[x] == n) { x = n; break; }
      x = pred[x];
    }
    if (x == n) continue;
    std::vector<std::size_t> cycle;
    std::size_t y = x;
    do {
      cycle.push_back(y);
      handled[y] = 1;
      y = pred[y];
    } while (y != x && cycle.size() <= n);
    if (y != x) continue;  // walk did not close; not a predecessor cycle
    std::reverse(cycle.begin(), cycle.end());  // follow edge direction i -> pred target
    double w = 0.0;
    for (std::size_t t = 0; t < cycle.size(); ++t)
      w += weight(cycle[t], cycle[(t + 1) % cycle.size()]);
    if (w < rep.worst_gap) {
      rep.worst_gap = w;
      rep.worst_cycle = cycle;
    }
  }
  rep.monotone = !(rep.worst_gap < -tol);
  return rep;
}

inline bool check_monotone_bruteforce(const Pairing& S, const ConeSpec& cone) {
  return check_monotone_bruteforce_report(S, cone).monotone;
}

inline bool check_monotone_cycles(const Pairing& S, const ConeSpec& cone) {
  return check_monotone_cycles_report(S, cone).monotone;
}

}  // namespace conic_transport
