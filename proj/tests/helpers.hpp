#pragma once

// Shared fixtures for the test suites: observation builders, a reference
// zone, and random-input generators.

#include <random>
#include <string>
#include <vector>

#include "weave/assign.hpp"
#include "weave/model.hpp"

namespace weave::testing {

inline EmbeddingVector vec(std::initializer_list<float> values) {
    return EmbeddingVector{std::vector<float>(values)};
}

inline ZoneConfig test_zone() {
    ZoneConfig zone;
    zone.distance_m = 500.0;
    zone.mean_speed_mps = 25.0;  // T_a = 20 s, default delta = 10 s
    zone.entry_lanes = {1, 2, 3};
    zone.exit_lanes = {1, 2};
    return validated(zone);
}

inline Observation obs(ZonePoint point, std::string track, double timestamp, int lane,
                       VehicleClass cls, EmbeddingVector embedding) {
    Observation o;
    o.camera_id = point == ZonePoint::Entry ? "cam_p1" : "cam_p2";
    o.zone_point = point;
    o.track_id = std::move(track);
    o.timestamp_s = timestamp;
    o.lane_id = lane;
    o.vehicle_class = cls;
    o.embedding = std::move(embedding);
    return o;
}

inline EmbeddingVector random_unit_vector(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(dim);
    double n2 = 0.0;
    for (double& x : v) {
        x = gauss(rng);
        n2 += x * x;
    }
    double n = std::sqrt(n2);
    EmbeddingVector e;
    e.values.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) e.values[i] = static_cast<float>(v[i] / n);
    return e;
}

/// Random masked cost matrix, sizes 1..8, density in [0.2, 1.0].
/// Integer-valued costs give exact objective comparisons.
inline assign::CostMatrix random_cost_matrix(std::mt19937_64& rng, bool integer_costs) {
    std::uniform_int_distribution<std::size_t> size_dist(1, 8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    assign::CostMatrix m;
    m.rows = size_dist(rng);
    m.cols = size_dist(rng);
    double density = 0.2 + 0.8 * unit(rng);
    std::size_t cells = m.rows * m.cols;
    m.cost.resize(cells);
    m.feasible.resize(cells);
    m.appearance_cost.assign(cells, 0.0);
    m.time_cost.assign(cells, 0.0);
    for (std::size_t k = 0; k < cells; ++k) {
        m.feasible[k] = unit(rng) < density ? 1 : 0;
        m.cost[k] = integer_costs ? std::floor(unit(rng) * 21.0) : unit(rng) * 10.0;
    }
    return m;
}

}  // namespace weave::testing
