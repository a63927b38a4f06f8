#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "weave/errors.hpp"

namespace weave {

enum class ZonePoint { Entry, Exit };
enum class VehicleClass { Car, Truck };

std::string_view zone_point_name(ZonePoint p);
std::string_view vehicle_class_name(VehicleClass c);

/// Appearance feature vector. Stored as float32 (the wire precision);
/// all arithmetic on it accumulates in double via the kernel layer.
struct EmbeddingVector {
    std::vector<float> values;

    std::size_t dim() const noexcept { return values.size(); }
    const float* data() const noexcept { return values.data(); }

    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

/// One vehicle sighting at the entry (P1) or exit (P2) of a weaving zone.
struct Observation {
    std::string camera_id;
    ZonePoint zone_point = ZonePoint::Entry;
    std::string track_id;
    double timestamp_s = 0.0;
    int lane_id = 0;
    VehicleClass vehicle_class = VehicleClass::Car;
    EmbeddingVector embedding;
};

/// Which form the travel-time cost term takes. Deviation charges
/// |observed travel time - T_a|; Literal charges (t2 - t1) + T_a, kept as a
/// selectable variant for comparison runs.
enum class TimeTerm { Deviation, Literal };

std::string_view time_term_name(TimeTerm t);

/// Weaving-zone geometry and matching priors.
struct ZoneConfig {
    double distance_m = 0.0;       // S: average distance between P1 and P2
    double mean_speed_mps = 0.0;   // V: average vehicle speed through the zone
    std::set<int> entry_lanes;
    std::set<int> exit_lanes;
    double w1 = 0.3;               // appearance-cost weight
    double w2 = 0.75;              // time-cost weight, 1/s
    double tau = 0.8;              // cosine similarity gate, inclusive
    double delta_s = 0.0;          // candidate window half-width; <=0 means 0.5*T_a
    TimeTerm time_term = TimeTerm::Deviation;
};

/// Prior expected travel time through the zone, T_a = S / V.
double expected_travel_time(const ZoneConfig& zone);

/// Applies the delta default and checks every ZoneConfig invariant.
/// Returns the normalized config; throws InvalidConfig on violation.
ZoneConfig validated(ZoneConfig zone);

/// An accepted (entry, exit) correspondence with its cost breakdown.
struct MatchedPair {
    std::string entry_track;
    std::string exit_track;
    double total_cost = 0.0;       // w1*appearance_cost + w2*time_cost
    double appearance_cost = 0.0;  // cosine distance
    double time_cost = 0.0;
    double similarity = 0.0;       // clamped to [-1, 1]
};

enum class ViolationKind {
    NonFiniteTimestamp,
    NegativeTimestamp,
    DuplicateTrackId,
    UnknownLane,
    EmbeddingDimensionMismatch,
    NonFiniteEmbedding,
    ZeroNormEmbedding,
};

std::string_view violation_kind_name(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::size_t record_index = 0;  // position in the validated list
    std::string camera_id;
    ZonePoint zone_point = ZonePoint::Entry;
    std::string track_id;
    std::string detail;
};

struct ValidationReport {
    std::size_t record_count = 0;
    std::map<int, long long> entry_lane_counts;  // N_a, keyed by lane
    std::map<int, long long> exit_lane_counts;   // N_b
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
};

/// Checks every Observation invariant against the zone's lane sets and
/// reports violations as data. Never mutates or drops records; per-lane
/// totals cover the observations whose lane belongs to the declared set.
/// The dataset's embedding dimension is pinned by the first record that
/// carries a non-empty embedding.
ValidationReport validate_dataset(std::span<const Observation> observations, const ZoneConfig& zone);

}  // namespace weave
