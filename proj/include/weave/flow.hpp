#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "weave/eval.hpp"
#include "weave/model.hpp"

namespace weave::flow {

using LanePair = std::pair<int, int>;  // (entry lane, exit lane)

/// Matched-pair counts per (entry lane, exit lane).
struct LanePairCounts {
    std::map<LanePair, long long> counts;
    long long total_matched = 0;

    long long at(int entry_lane, int exit_lane) const {
        auto it = counts.find({entry_lane, exit_lane});
        return it == counts.end() ? 0 : it->second;
    }
};

/// Tallies matches by lane pair. Track ids are resolved against the
/// observation lists; throws UnknownTrackId when one cannot be found.
LanePairCounts lane_pair_counts(std::span<const MatchedPair> matches,
                                std::span<const Observation> entries,
                                std::span<const Observation> exits);

/// Lane-level flow estimates. A lane pair maps to nullopt (unestimated)
/// exactly when its entry lane has no matched sample; such lanes are named
/// in warnings instead of being imputed.
struct FlowEstimate {
    std::map<LanePair, std::optional<double>> flows;
    std::map<int, long long> entry_totals;   // N_a
    std::map<int, long long> exit_totals;    // N_b
    std::map<int, double> exit_discrepancy;  // sum_a F(a, b) - N_b over estimated cells
    std::vector<std::string> warnings;
};

/// Per-entry-lane conditional estimator: F(a, b) = N_a * m(a, b) / m(a, .)
/// for lanes with matches. Exit totals are diagnostics only; the
/// discrepancy against them is surfaced, not fitted away.
/// Throws InconsistentCounts when matched counts exceed lane totals.
FlowEstimate estimate_flows(const LanePairCounts& counts,
                            const std::map<int, long long>& entry_totals,
                            const std::map<int, long long>& exit_totals);

/// Serializable run summary consumed by the CLI.
struct WeavingReport {
    LanePairCounts counts;
    FlowEstimate flows;
    long long total_entry_count = 0;  // sum of N_a
    double sampling_rate = 0.0;       // total_matched / sum N_a, 0 when empty
    std::optional<eval::MatchMetrics> metrics;
};

WeavingReport build_report(const FlowEstimate& flows,
                           const LanePairCounts& counts,
                           const std::optional<eval::MatchMetrics>& metrics);

}  // namespace weave::flow
