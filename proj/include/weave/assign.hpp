#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "weave/model.hpp"

namespace weave::assign {

/// Pairing costs between entry rows and exit columns with an explicit
/// feasibility mask. Infeasible cells are absent edges for the solver;
/// their stored cost and breakdown are never read.
struct CostMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> cost;             // w1*appearance + w2*time, per cell
    std::vector<std::uint8_t> feasible;
    std::vector<double> appearance_cost;  // cosine distance
    std::vector<double> time_cost;

    double cost_at(std::size_t i, std::size_t j) const { return cost[i * cols + j]; }
    bool feasible_at(std::size_t i, std::size_t j) const { return feasible[i * cols + j] != 0; }
    double appearance_at(std::size_t i, std::size_t j) const { return appearance_cost[i * cols + j]; }
    double time_at(std::size_t i, std::size_t j) const { return time_cost[i * cols + j]; }
};

/// A partial matching: each row and column used at most once, feasible
/// cells only. Pairs are sorted by row index.
struct Assignment {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    double objective = 0.0;
};

/// Builds the pairing cost matrix for one entry/exit batch. A cell is
/// feasible iff the classes match, the exit strictly follows the entry,
/// cosine similarity clears tau (inclusive), and the exit time falls inside
/// [t1 + T_a - delta, t1 + T_a + delta]. Feasible cost combines cosine
/// distance and the configured travel-time term, weighted by w1 and w2.
CostMatrix build_cost_matrix(std::span<const Observation> entries,
                             std::span<const Observation> exits,
                             const ZoneConfig& zone);

/// Maximum-cardinality matching over feasible cells that, among all
/// maximum-cardinality matchings, minimizes total cost. Successive
/// shortest augmenting paths over the masked bipartite graph; masked cells
/// are absent edges, never sentinel costs. Deterministic: augmentation
/// sources, Dijkstra scans, and distance ties all resolve in ascending
/// index order.
Assignment solve_assignment(const CostMatrix& m);

/// Converts solver output into MatchedPair records with the per-cell cost
/// breakdown, sorted by entry timestamp then entry track id.
/// Throws IndexOutOfRange if the assignment does not fit the matrix or the
/// matrix shape does not match the observation lists.
std::vector<MatchedPair> extract_matches(const Assignment& a,
                                         const CostMatrix& m,
                                         std::span<const Observation> entries,
                                         std::span<const Observation> exits);

/// Full matching pipeline over one zone: canonicalizes observation order,
/// slides windows of width 2*delta stepped by delta over entry timestamps,
/// matches each window against the T_a-shifted exit window, and unions the
/// results. A track matched in one window is removed from later windows.
std::vector<MatchedPair> match_zone(std::span<const Observation> entries,
                                    std::span<const Observation> exits,
                                    const ZoneConfig& zone);

}  // namespace weave::assign
