#include "weave/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace weave::synth {

namespace {

void check_distribution(const std::map<int, double>& probs, const std::set<int>& lanes,
                        const char* label) {
    if (probs.empty()) {
        raise(ErrorCode::InvalidSpec, std::string(label) + " distribution is empty");
    }
    double sum = 0.0;
    for (const auto& [lane, p] : probs) {
        if (!lanes.contains(lane)) {
            raise(ErrorCode::InvalidSpec,
                  std::string(label) + " names lane " + std::to_string(lane) +
                      " outside the zone's lane set");
        }
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            raise(ErrorCode::InvalidSpec, std::string(label) + " probability outside [0, 1]");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        raise(ErrorCode::InvalidSpec,
              std::string(label) + " probabilities sum to " + std::to_string(sum));
    }
}

void validate_spec(const ScenarioSpec& spec, const ZoneConfig& zone) {
    if (spec.vehicle_count < 0 || spec.clutter_entry < 0 || spec.clutter_exit < 0) {
        raise(ErrorCode::InvalidSpec, "vehicle counts must be non-negative");
    }
    long long total = spec.vehicle_count + spec.clutter_entry + spec.clutter_exit;
    if (total == 0) return;

    check_distribution(spec.entry_lane_probs, zone.entry_lanes, "entry lane");
    for (const auto& [lane, p] : spec.entry_lane_probs) {
        if (p == 0.0) continue;
        auto row = spec.transition.find(lane);
        if (row == spec.transition.end()) {
            raise(ErrorCode::InvalidSpec,
                  "transition row missing for entry lane " + std::to_string(lane));
        }
        check_distribution(row->second, zone.exit_lanes,
                           ("transition row " + std::to_string(lane)).c_str());
    }
    if (!(std::isfinite(spec.speed_mean_mps) && spec.speed_mean_mps > 0.0)) {
        raise(ErrorCode::InvalidSpec, "speed mean must be positive");
    }
    if (!(std::isfinite(spec.speed_stddev_mps) && spec.speed_stddev_mps >= 0.0)) {
        raise(ErrorCode::InvalidSpec, "speed stddev must be >= 0");
    }
    if (spec.embedding_dim == 0) {
        raise(ErrorCode::InvalidSpec, "embedding dimension must be >= 1");
    }
    if (!(std::isfinite(spec.identity_scale) && spec.identity_scale > 0.0)) {
        raise(ErrorCode::InvalidSpec, "identity scale must be positive");
    }
    if (!(std::isfinite(spec.noise_stddev) && spec.noise_stddev >= 0.0)) {
        raise(ErrorCode::InvalidSpec, "noise stddev must be >= 0");
    }
    if (!(spec.truck_fraction >= 0.0 && spec.truck_fraction <= 1.0)) {
        raise(ErrorCode::InvalidSpec, "truck fraction must lie in [0, 1]");
    }
    if (!(std::isfinite(spec.arrival_rate_per_s) && spec.arrival_rate_per_s > 0.0)) {
        raise(ErrorCode::InvalidSpec, "arrival rate must be positive");
    }
}

std::vector<double> normalized(std::vector<double> v) {
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    double n = std::sqrt(n2);
    for (double& x : v) x /= n;
    return v;
}

struct VehicleDraw {
    double entry_time = 0.0;
    int entry_lane = 0;
    int exit_lane = 0;
    VehicleClass vehicle_class = VehicleClass::Car;
    double speed = 0.0;
    EmbeddingVector entry_embedding;
    EmbeddingVector exit_embedding;
};

class Sampler {
public:
    Sampler(const ScenarioSpec& spec, const ZoneConfig& zone)
        : spec_(spec), zone_(zone), rng_(spec.seed) {}

    VehicleDraw draw_vehicle(double duration) {
        VehicleDraw v;
        v.entry_time = std::uniform_real_distribution<double>(0.0, duration)(rng_);
        v.entry_lane = draw_categorical(spec_.entry_lane_probs);
        v.exit_lane = draw_categorical(spec_.transition.at(v.entry_lane));
        v.vehicle_class = std::uniform_real_distribution<double>(0.0, 1.0)(rng_) <
                                  spec_.truck_fraction
                              ? VehicleClass::Truck
                              : VehicleClass::Car;
        v.speed = draw_speed();
        std::vector<double> identity = normalized(draw_gaussian(spec_.embedding_dim));
        v.entry_embedding = draw_view(identity);
        v.exit_embedding = draw_view(identity);
        return v;
    }

private:
    int draw_categorical(const std::map<int, double>& probs) {
        double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
        double acc = 0.0;
        int last = probs.begin()->first;
        for (const auto& [lane, p] : probs) {
            acc += p;
            last = lane;
            if (u < acc) return lane;
        }
        return last;  // u landed in rounding slack at the top
    }

    double draw_speed() {
        if (spec_.speed_stddev_mps == 0.0) return spec_.speed_mean_mps;
        std::normal_distribution<double> dist(spec_.speed_mean_mps, spec_.speed_stddev_mps);
        double lo = 0.5 * zone_.mean_speed_mps;
        double hi = 1.5 * zone_.mean_speed_mps;
        // Rejection keeps travel times inside a plausible window.
        for (int attempt = 0; attempt < 1000; ++attempt) {
            double s = dist(rng_);
            if (s >= lo && s <= hi) return s;
        }
        return std::clamp(spec_.speed_mean_mps, lo, hi);
    }

    std::vector<double> draw_gaussian(std::size_t dim) {
        std::normal_distribution<double> dist(0.0, 1.0);
        std::vector<double> v(dim);
        for (double& x : v) x = dist(rng_);
        return v;
    }

    EmbeddingVector draw_view(const std::vector<double>& identity) {
        std::vector<double> view = identity;
        if (spec_.noise_stddev > 0.0) {
            std::normal_distribution<double> dist(0.0, spec_.noise_stddev);
            for (double& x : view) x += dist(rng_);
        }
        view = normalized(std::move(view));
        EmbeddingVector e;
        e.values.resize(view.size());
        for (std::size_t i = 0; i < view.size(); ++i) {
            e.values[i] = static_cast<float>(spec_.identity_scale * view[i]);
        }
        return e;
    }

    const ScenarioSpec& spec_;
    const ZoneConfig& zone_;
    std::mt19937_64 rng_;
};

std::string padded_id(const char* prefix, long long i) {
    std::ostringstream s;
    s << prefix;
    std::string digits = std::to_string(i);
    for (std::size_t k = digits.size(); k < 5; ++k) s << '0';
    s << digits;
    return s.str();
}

}  // namespace

Scenario generate_scenario(const ScenarioSpec& spec, const ZoneConfig& zone_in) {
    ZoneConfig zone = validated(zone_in);
    validate_spec(spec, zone);

    Scenario scenario;
    long long total = spec.vehicle_count + spec.clutter_entry + spec.clutter_exit;
    scenario.truth.total_detected = total;
    if (total == 0) return scenario;

    double duration = static_cast<double>(total) / spec.arrival_rate_per_s;
    Sampler sampler(spec, zone);

    auto entry_observation = [&](const VehicleDraw& v, const std::string& track) {
        Observation o;
        o.camera_id = "cam_p1";
        o.zone_point = ZonePoint::Entry;
        o.track_id = track;
        o.timestamp_s = v.entry_time;
        o.lane_id = v.entry_lane;
        o.vehicle_class = v.vehicle_class;
        o.embedding = v.entry_embedding;
        return o;
    };
    auto exit_observation = [&](const VehicleDraw& v, const std::string& track) {
        Observation o;
        o.camera_id = "cam_p2";
        o.zone_point = ZonePoint::Exit;
        o.track_id = track;
        o.timestamp_s = v.entry_time + zone.distance_m / v.speed;
        o.lane_id = v.exit_lane;
        o.vehicle_class = v.vehicle_class;
        o.embedding = v.exit_embedding;
        return o;
    };

    for (long long i = 0; i < spec.vehicle_count; ++i) {
        VehicleDraw v = sampler.draw_vehicle(duration);
        std::string entry_track = padded_id("e", i);
        std::string exit_track = padded_id("x", i);
        scenario.entries.push_back(entry_observation(v, entry_track));
        scenario.exits.push_back(exit_observation(v, exit_track));
        scenario.truth.pairs.insert({entry_track, exit_track});
        ++scenario.truth.true_flows[{v.entry_lane, v.exit_lane}];
        scenario.truth.vehicle_speed_mps[entry_track] = v.speed;
    }
    for (long long i = 0; i < spec.clutter_entry; ++i) {
        VehicleDraw v = sampler.draw_vehicle(duration);
        scenario.entries.push_back(entry_observation(v, padded_id("ce", i)));
    }
    for (long long i = 0; i < spec.clutter_exit; ++i) {
        VehicleDraw v = sampler.draw_vehicle(duration);
        scenario.exits.push_back(exit_observation(v, padded_id("cx", i)));
    }
    return scenario;
}

assign::Assignment enumerate_assignment(const assign::CostMatrix& m) {
    if (m.rows > 8 || m.cols > 8) {
        raise(ErrorCode::TooLargeForEnumeration,
              std::to_string(m.rows) + "x" + std::to_string(m.cols) +
                  " exceeds the 8x8 enumeration bound");
    }

    const int rows = static_cast<int>(m.rows);
    const int cols = static_cast<int>(m.cols);

    int best_cardinality = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<int> best_slots;
    std::vector<int> slots(rows, -1);

    // Depth-first over rows; per row the branches go feasible columns in
    // ascending order, then "row unmatched". That order visits equal-
    // cardinality matchings in lexicographic pair-list order, so keeping
    // the first strict improvement yields the lexicographically smallest
    // optimum. Costs are non-negative, which justifies the cost prune.
    auto dfs = [&](auto&& self, int r, unsigned used_cols, int matched, double cost) -> void {
        int remaining = rows - r;
        if (matched + remaining < best_cardinality) return;
        if (matched + remaining == best_cardinality && cost >= best_cost) return;
        if (r == rows) {
            if (matched > best_cardinality ||
                (matched == best_cardinality && cost < best_cost)) {
                best_cardinality = matched;
                best_cost = cost;
                best_slots = slots;
            }
            return;
        }
        for (int c = 0; c < cols; ++c) {
            if ((used_cols >> c) & 1u) continue;
            if (!m.feasible_at(r, c)) continue;
            slots[r] = c;
            self(self, r + 1, used_cols | (1u << c), matched + 1,
                 cost + m.cost_at(r, c));
        }
        slots[r] = -1;
        self(self, r + 1, used_cols, matched, cost);
    };
    dfs(dfs, 0, 0u, 0, 0.0);

    assign::Assignment out;
    for (int r = 0; r < rows; ++r) {
        if (r < static_cast<int>(best_slots.size()) && best_slots[r] >= 0) {
            out.pairs.emplace_back(static_cast<std::size_t>(r),
                                   static_cast<std::size_t>(best_slots[r]));
        }
    }
    double objective = 0.0;
    for (const auto& [r, c] : out.pairs) objective += m.cost_at(r, c);
    out.objective = objective;
    return out;
}

std::vector<MatchedPair> brute_force_match(std::span<const Observation> entries,
                                           std::span<const Observation> exits,
                                           const ZoneConfig& zone) {
    assign::CostMatrix m = assign::build_cost_matrix(entries, exits, zone);
    assign::Assignment a = enumerate_assignment(m);
    return assign::extract_matches(a, m, entries, exits);
}

}  // namespace weave::synth
