#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "weave/assign.hpp"
#include "weave/model.hpp"

namespace weave::synth {

/// Parameters of one synthetic weaving scenario. Deterministic for a fixed
/// seed: the same spec and zone always produce bit-identical observations.
struct ScenarioSpec {
    long long vehicle_count = 0;
    std::map<int, double> entry_lane_probs;            // entry lane -> probability
    std::map<int, std::map<int, double>> transition;   // entry lane -> exit lane -> probability
    double speed_mean_mps = 0.0;
    double speed_stddev_mps = 0.0;
    std::size_t embedding_dim = 0;
    double identity_scale = 1.0;   // norm of emitted embeddings
    double noise_stddev = 0.0;     // sigma_e, applied before renormalization
    double truck_fraction = 0.0;
    long long clutter_entry = 0;   // vehicles seen only at P1
    long long clutter_exit = 0;    // vehicles seen only at P2
    double arrival_rate_per_s = 1.0;
    std::uint64_t seed = 0;
};

struct GroundTruth {
    std::set<std::pair<std::string, std::string>> pairs;   // (entry_track, exit_track)
    std::map<std::pair<int, int>, long long> true_flows;   // matchable lane-pair counts
    std::map<std::string, double> vehicle_speed_mps;       // keyed by entry track
    long long total_detected = 0;                          // distinct vehicles incl. clutter
};

struct Scenario {
    std::vector<Observation> entries;
    std::vector<Observation> exits;
    GroundTruth truth;
};

/// Draws a full scenario: per vehicle one identity embedding on the unit
/// sphere, per side an independently noised and renormalized view, exit time
/// from the sampled speed (truncated to [0.5, 1.5] * V). Clutter vehicles
/// get a full trajectory but only one observed side and never enter the
/// ground truth. Throws InvalidSpec on malformed parameters.
Scenario generate_scenario(const ScenarioSpec& spec, const ZoneConfig& zone);

/// Exhaustive reference for solve_assignment: enumerates every
/// maximum-cardinality partial matching over feasible cells and returns the
/// cheapest, breaking exact cost ties toward the lexicographically smallest
/// pair list. Only for matrices up to 8x8; throws TooLargeForEnumeration.
assign::Assignment enumerate_assignment(const assign::CostMatrix& m);

/// End-to-end oracle: same cost-matrix construction as the production
/// pipeline, brute-force enumeration instead of the flow solver.
std::vector<MatchedPair> brute_force_match(std::span<const Observation> entries,
                                           std::span<const Observation> exits,
                                           const ZoneConfig& zone);

}  // namespace weave::synth
