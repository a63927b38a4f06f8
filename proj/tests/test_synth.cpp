#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "weave/assign.hpp"
#include "weave/embed.hpp"
#include "weave/eval.hpp"
#include "weave/synth.hpp"

using namespace weave;
using namespace weave::testing;

namespace {

synth::ScenarioSpec base_spec() {
    synth::ScenarioSpec spec;
    spec.vehicle_count = 30;
    spec.entry_lane_probs = {{1, 0.5}, {2, 0.3}, {3, 0.2}};
    spec.transition = {{1, {{1, 0.7}, {2, 0.3}}},
                       {2, {{1, 0.4}, {2, 0.6}}},
                       {3, {{1, 0.5}, {2, 0.5}}}};
    spec.speed_mean_mps = 25.0;
    spec.speed_stddev_mps = 1.0;
    spec.embedding_dim = 16;
    spec.noise_stddev = 0.0;
    spec.truck_fraction = 0.3;
    spec.seed = 7;
    return spec;
}

bool same_observation(const Observation& a, const Observation& b) {
    return a.camera_id == b.camera_id && a.zone_point == b.zone_point &&
           a.track_id == b.track_id && a.timestamp_s == b.timestamp_s && a.lane_id == b.lane_id &&
           a.vehicle_class == b.vehicle_class && a.embedding == b.embedding;
}

}  // namespace

TEST_CASE("empty scenario") {
    synth::ScenarioSpec spec;
    spec.vehicle_count = 0;
    synth::Scenario s = synth::generate_scenario(spec, test_zone());
    CHECK(s.entries.empty());
    CHECK(s.exits.empty());
    CHECK(s.truth.pairs.empty());
    CHECK(s.truth.total_detected == 0);
}

TEST_CASE("zero noise gives identical entry and exit views") {
    synth::ScenarioSpec spec = base_spec();
    synth::Scenario s = synth::generate_scenario(spec, test_zone());
    REQUIRE(s.entries.size() == 30);
    REQUIRE(s.exits.size() == 30);
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
        CHECK(s.entries[i].embedding == s.exits[i].embedding);
        CHECK(std::fabs(embed::cosine_similarity(s.entries[i].embedding, s.exits[i].embedding) -
                        1.0) <= 1e-12);
    }
}

TEST_CASE("fixed seed reproduces the scenario bit for bit") {
    synth::ScenarioSpec spec = base_spec();
    spec.vehicle_count = 100;
    spec.noise_stddev = 0.05;
    spec.clutter_entry = 10;
    spec.clutter_exit = 5;
    synth::Scenario a = synth::generate_scenario(spec, test_zone());
    synth::Scenario b = synth::generate_scenario(spec, test_zone());
    REQUIRE(a.entries.size() == b.entries.size());
    REQUIRE(a.exits.size() == b.exits.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(same_observation(a.entries[i], b.entries[i]));
    }
    for (std::size_t i = 0; i < a.exits.size(); ++i) {
        CHECK(same_observation(a.exits[i], b.exits[i]));
    }
    CHECK(a.truth.pairs == b.truth.pairs);
    CHECK(a.truth.true_flows == b.truth.true_flows);

    SUBCASE("different seed changes the draw") {
        spec.seed += 1;
        synth::Scenario c = synth::generate_scenario(spec, test_zone());
        CHECK_FALSE(same_observation(a.entries[0], c.entries[0]));
    }
}

TEST_CASE("ground truth bookkeeping") {
    synth::ScenarioSpec spec = base_spec();
    spec.clutter_entry = 4;
    spec.clutter_exit = 6;
    ZoneConfig zone = test_zone();
    synth::Scenario s = synth::generate_scenario(spec, zone);

    CHECK(s.entries.size() == 34);
    CHECK(s.exits.size() == 36);
    CHECK(s.truth.pairs.size() == 30);
    CHECK(s.truth.total_detected == 40);

    SUBCASE("clutter tracks never appear in the truth") {
        for (const auto& [entry, exit] : s.truth.pairs) {
            CHECK(entry.rfind("ce", 0) != 0);
            CHECK(exit.rfind("cx", 0) != 0);
        }
    }

    SUBCASE("exit timestamp is entry plus S over speed, exactly") {
        std::size_t checked = 0;
        for (std::size_t i = 0; i < s.truth.pairs.size(); ++i) {
            const Observation& e = s.entries[i];
            const Observation& x = s.exits[i];
            REQUIRE(s.truth.pairs.contains({e.track_id, x.track_id}));
            double speed = s.truth.vehicle_speed_mps.at(e.track_id);
            CHECK(x.timestamp_s == e.timestamp_s + zone.distance_m / speed);
            CHECK(speed >= 0.5 * zone.mean_speed_mps);
            CHECK(speed <= 1.5 * zone.mean_speed_mps);
            ++checked;
        }
        CHECK(checked == 30);
    }

    SUBCASE("true flows tally the matchable vehicles") {
        long long total = 0;
        for (const auto& [lanes, count] : s.truth.true_flows) total += count;
        CHECK(total == 30);
    }

    SUBCASE("lanes come from the declared sets") {
        ValidationReport report = validate_dataset(s.entries, zone);
        CHECK(report.ok());
        report = validate_dataset(s.exits, zone);
        CHECK(report.ok());
    }
}

TEST_CASE("degenerate distributions") {
    synth::ScenarioSpec spec = base_spec();
    spec.truck_fraction = 1.0;
    synth::Scenario s = synth::generate_scenario(spec, test_zone());
    for (const Observation& o : s.entries) CHECK(o.vehicle_class == VehicleClass::Truck);

    spec.truck_fraction = 0.0;
    s = synth::generate_scenario(spec, test_zone());
    for (const Observation& o : s.entries) CHECK(o.vehicle_class == VehicleClass::Car);
}

TEST_CASE("invalid scenario specs") {
    ZoneConfig zone = test_zone();
    auto expect_invalid = [&](synth::ScenarioSpec spec) {
        try {
            (void)synth::generate_scenario(spec, zone);
            FAIL("expected InvalidSpec");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidSpec);
        }
    };

    synth::ScenarioSpec spec = base_spec();
    spec.entry_lane_probs = {{1, 0.5}, {2, 0.4}};  // sums to 0.9
    expect_invalid(spec);

    spec = base_spec();
    spec.transition.erase(2);
    expect_invalid(spec);

    spec = base_spec();
    spec.embedding_dim = 0;
    expect_invalid(spec);

    spec = base_spec();
    spec.entry_lane_probs = {{9, 1.0}};  // lane outside the zone
    expect_invalid(spec);

    spec = base_spec();
    spec.noise_stddev = -0.1;
    expect_invalid(spec);
}

TEST_CASE("enumeration oracle basics") {
    ZoneConfig zone = test_zone();

    SUBCASE("single compatible pair") {
        std::vector<Observation> entries{
            obs(ZonePoint::Entry, "e1", 0.0, 1, VehicleClass::Car, vec({3.0f, 4.0f}))};
        std::vector<Observation> exits{
            obs(ZonePoint::Exit, "x1", 20.0, 1, VehicleClass::Car, vec({3.0f, 4.0f}))};
        std::vector<MatchedPair> out = synth::brute_force_match(entries, exits, zone);
        REQUIRE(out.size() == 1);
        CHECK(out[0].entry_track == "e1");
        CHECK(out[0].exit_track == "x1");
    }

    SUBCASE("size guard") {
        assign::CostMatrix m;
        m.rows = 9;
        m.cols = 1;
        m.cost.assign(9, 0.0);
        m.feasible.assign(9, 1);
        try {
            (void)synth::enumerate_assignment(m);
            FAIL("expected TooLargeForEnumeration");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::TooLargeForEnumeration);
        }
    }

    SUBCASE("agrees with the solver on random instances") {
        std::mt19937_64 rng(73);
        for (int rep = 0; rep < 200; ++rep) {
            assign::CostMatrix m = random_cost_matrix(rng, rep % 2 == 0);
            assign::Assignment solver = assign::solve_assignment(m);
            assign::Assignment oracle = synth::enumerate_assignment(m);
            CHECK(solver.pairs.size() == oracle.pairs.size());
            CHECK(std::fabs(solver.objective - oracle.objective) <= 1e-9);
        }
    }
}

TEST_CASE("precision trend is non-increasing in embedding noise") {
    ZoneConfig zone = test_zone();
    auto mean_precision = [&](double sigma) {
        double total = 0.0;
        int seeds = 6;
        for (int seed = 0; seed < seeds; ++seed) {
            synth::ScenarioSpec spec = base_spec();
            spec.vehicle_count = 60;
            spec.speed_stddev_mps = 2.5;
            spec.noise_stddev = sigma;
            spec.clutter_entry = 12;
            spec.clutter_exit = 12;
            spec.seed = 1000 + static_cast<std::uint64_t>(seed);
            synth::Scenario s = synth::generate_scenario(spec, zone);
            std::vector<MatchedPair> matches = assign::match_zone(s.entries, s.exits, zone);
            eval::MatchMetrics m =
                eval::match_metrics(matches, s.truth.pairs, s.truth.total_detected);
            total += m.precision;
        }
        return total / seeds;
    };

    double clean = mean_precision(0.0);
    double noisy = mean_precision(0.12);
    CHECK(clean >= noisy);
    CHECK(clean == 1.0);
}
