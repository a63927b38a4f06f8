#include "weave/flow.hpp"

#include <sstream>
#include <unordered_map>

namespace weave::flow {

LanePairCounts lane_pair_counts(std::span<const MatchedPair> matches,
                                std::span<const Observation> entries,
                                std::span<const Observation> exits) {
    std::unordered_map<std::string, int> entry_lane;
    std::unordered_map<std::string, int> exit_lane;
    for (const Observation& o : entries) entry_lane.emplace(o.track_id, o.lane_id);
    for (const Observation& o : exits) exit_lane.emplace(o.track_id, o.lane_id);

    LanePairCounts out;
    for (const MatchedPair& m : matches) {
        auto ei = entry_lane.find(m.entry_track);
        if (ei == entry_lane.end()) {
            raise(ErrorCode::UnknownTrackId, "entry track '" + m.entry_track + "' not in observations");
        }
        auto xi = exit_lane.find(m.exit_track);
        if (xi == exit_lane.end()) {
            raise(ErrorCode::UnknownTrackId, "exit track '" + m.exit_track + "' not in observations");
        }
        ++out.counts[{ei->second, xi->second}];
        ++out.total_matched;
    }
    return out;
}

FlowEstimate estimate_flows(const LanePairCounts& counts,
                            const std::map<int, long long>& entry_totals,
                            const std::map<int, long long>& exit_totals) {
    FlowEstimate out;
    out.entry_totals = entry_totals;
    out.exit_totals = exit_totals;

    std::map<int, long long> row_sums;
    for (const auto& [pair, count] : counts.counts) {
        if (count < 0) {
            raise(ErrorCode::InconsistentCounts, "negative matched count");
        }
        if (count == 0) continue;
        if (!entry_totals.contains(pair.first)) {
            raise(ErrorCode::InconsistentCounts,
                  "matched entry lane " + std::to_string(pair.first) + " has no lane total");
        }
        if (!exit_totals.contains(pair.second)) {
            raise(ErrorCode::InconsistentCounts,
                  "matched exit lane " + std::to_string(pair.second) + " has no lane total");
        }
        row_sums[pair.first] += count;
    }
    for (const auto& [lane, matched] : row_sums) {
        if (matched > entry_totals.at(lane)) {
            std::ostringstream msg;
            msg << "entry lane " << lane << ": " << matched << " matched but only "
                << entry_totals.at(lane) << " counted";
            raise(ErrorCode::InconsistentCounts, msg.str());
        }
    }

    for (const auto& [lane_a, n_a] : entry_totals) {
        long long row = row_sums.contains(lane_a) ? row_sums.at(lane_a) : 0;
        if (row == 0) {
            for (const auto& [lane_b, n_b] : exit_totals) {
                out.flows[{lane_a, lane_b}] = std::nullopt;
            }
            std::ostringstream msg;
            msg << "entry lane " << lane_a << ": no matched samples, flows unestimated";
            out.warnings.push_back(msg.str());
            continue;
        }
        for (const auto& [lane_b, n_b] : exit_totals) {
            // (N_a * m) / row keeps F == m exact when N_a == row.
            double scaled = static_cast<double>(n_a) * static_cast<double>(counts.at(lane_a, lane_b));
            out.flows[{lane_a, lane_b}] = scaled / static_cast<double>(row);
        }
    }

    for (const auto& [lane_b, n_b] : exit_totals) {
        double estimated = 0.0;
        bool any = false;
        for (const auto& [pair, flow] : out.flows) {
            if (pair.second == lane_b && flow.has_value()) {
                estimated += *flow;
                any = true;
            }
        }
        if (any) {
            out.exit_discrepancy[lane_b] = estimated - static_cast<double>(n_b);
        }
    }
    return out;
}

WeavingReport build_report(const FlowEstimate& flows,
                           const LanePairCounts& counts,
                           const std::optional<eval::MatchMetrics>& metrics) {
    WeavingReport report;
    report.counts = counts;
    report.flows = flows;
    report.metrics = metrics;
    long long entry_total = 0;
    for (const auto& [lane, n] : flows.entry_totals) entry_total += n;
    report.total_entry_count = entry_total;
    report.sampling_rate = entry_total == 0
                               ? 0.0
                               : static_cast<double>(counts.total_matched) /
                                     static_cast<double>(entry_total);
    return report;
}

}  // namespace weave::flow
