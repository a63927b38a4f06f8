#include "weave/model.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace weave {

std::string_view zone_point_name(ZonePoint p) {
    return p == ZonePoint::Entry ? "P1" : "P2";
}

std::string_view vehicle_class_name(VehicleClass c) {
    return c == VehicleClass::Car ? "car" : "truck";
}

std::string_view time_term_name(TimeTerm t) {
    return t == TimeTerm::Deviation ? "deviation" : "literal";
}

std::string_view violation_kind_name(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::NonFiniteTimestamp: return "NonFiniteTimestamp";
        case ViolationKind::NegativeTimestamp: return "NegativeTimestamp";
        case ViolationKind::DuplicateTrackId: return "DuplicateTrackId";
        case ViolationKind::UnknownLane: return "UnknownLane";
        case ViolationKind::EmbeddingDimensionMismatch: return "EmbeddingDimensionMismatch";
        case ViolationKind::NonFiniteEmbedding: return "NonFiniteEmbedding";
        case ViolationKind::ZeroNormEmbedding: return "ZeroNormEmbedding";
    }
    return "UnknownViolation";
}

double expected_travel_time(const ZoneConfig& zone) {
    return zone.distance_m / zone.mean_speed_mps;
}

ZoneConfig validated(ZoneConfig zone) {
    if (!(std::isfinite(zone.distance_m) && zone.distance_m > 0.0)) {
        raise(ErrorCode::InvalidConfig, "distance_m must be finite and > 0");
    }
    if (!(std::isfinite(zone.mean_speed_mps) && zone.mean_speed_mps > 0.0)) {
        raise(ErrorCode::InvalidConfig, "speed_mps must be finite and > 0");
    }
    if (zone.entry_lanes.empty() || zone.exit_lanes.empty()) {
        raise(ErrorCode::InvalidConfig, "entry_lanes and exit_lanes must be non-empty");
    }
    for (int lane : zone.entry_lanes) {
        if (lane < 0) raise(ErrorCode::InvalidConfig, "entry lane ids must be non-negative");
    }
    for (int lane : zone.exit_lanes) {
        if (lane < 0) raise(ErrorCode::InvalidConfig, "exit lane ids must be non-negative");
    }
    if (!(std::isfinite(zone.w1) && zone.w1 >= 0.0) || !(std::isfinite(zone.w2) && zone.w2 >= 0.0)) {
        raise(ErrorCode::InvalidConfig, "w1 and w2 must be finite and >= 0");
    }
    if (!(zone.w1 + zone.w2 > 0.0)) {
        raise(ErrorCode::InvalidConfig, "w1 + w2 must be > 0");
    }
    if (!(std::isfinite(zone.tau) && zone.tau >= -1.0 && zone.tau <= 1.0)) {
        raise(ErrorCode::InvalidConfig, "tau must lie in [-1, 1]");
    }
    double t_a = expected_travel_time(zone);
    if (!std::isfinite(t_a) || !(t_a > 0.0)) {
        raise(ErrorCode::InvalidConfig, "derived travel time S/V must be finite and positive");
    }
    if (zone.delta_s <= 0.0) {
        zone.delta_s = 0.5 * t_a;
    }
    if (!std::isfinite(zone.delta_s)) {
        raise(ErrorCode::InvalidConfig, "delta_s must be finite");
    }
    return zone;
}

namespace {

bool embedding_all_finite(const EmbeddingVector& e) {
    for (float v : e.values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

bool embedding_zero_norm(const EmbeddingVector& e) {
    for (float v : e.values) {
        if (v != 0.0f) return false;
    }
    return true;
}

}  // namespace

ValidationReport validate_dataset(std::span<const Observation> observations, const ZoneConfig& zone) {
    ValidationReport report;
    report.record_count = observations.size();

    std::set<std::tuple<std::string, ZonePoint, std::string>> seen;
    std::size_t reference_dim = 0;
    bool have_reference_dim = false;

    auto add = [&](ViolationKind kind, std::size_t index, const Observation& obs, std::string detail) {
        report.violations.push_back(
            {kind, index, obs.camera_id, obs.zone_point, obs.track_id, std::move(detail)});
    };

    for (std::size_t i = 0; i < observations.size(); ++i) {
        const Observation& obs = observations[i];

        if (!std::isfinite(obs.timestamp_s)) {
            add(ViolationKind::NonFiniteTimestamp, i, obs, "timestamp is not finite");
        } else if (obs.timestamp_s < 0.0) {
            add(ViolationKind::NegativeTimestamp, i, obs, "timestamp is negative");
        }

        auto key = std::make_tuple(obs.camera_id, obs.zone_point, obs.track_id);
        if (!seen.insert(key).second) {
            add(ViolationKind::DuplicateTrackId, i, obs,
                "duplicate (camera_id, zone_point, track_id)");
        }

        const std::set<int>& lanes =
            obs.zone_point == ZonePoint::Entry ? zone.entry_lanes : zone.exit_lanes;
        if (!lanes.contains(obs.lane_id)) {
            std::ostringstream msg;
            msg << "lane " << obs.lane_id << " is not declared for "
                << zone_point_name(obs.zone_point);
            add(ViolationKind::UnknownLane, i, obs, msg.str());
        } else {
            auto& counts = obs.zone_point == ZonePoint::Entry ? report.entry_lane_counts
                                                              : report.exit_lane_counts;
            ++counts[obs.lane_id];
        }

        if (!have_reference_dim && obs.embedding.dim() > 0) {
            reference_dim = obs.embedding.dim();
            have_reference_dim = true;
        }
        if (obs.embedding.dim() == 0 || (have_reference_dim && obs.embedding.dim() != reference_dim)) {
            std::ostringstream msg;
            msg << "embedding dimension " << obs.embedding.dim() << ", dataset uses "
                << reference_dim;
            add(ViolationKind::EmbeddingDimensionMismatch, i, obs, msg.str());
        }
        if (!embedding_all_finite(obs.embedding)) {
            add(ViolationKind::NonFiniteEmbedding, i, obs, "embedding has non-finite entries");
        } else if (obs.embedding.dim() > 0 && embedding_zero_norm(obs.embedding)) {
            add(ViolationKind::ZeroNormEmbedding, i, obs, "embedding norm is zero");
        }
    }

    return report;
}

}  // namespace weave
