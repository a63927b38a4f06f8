#include "weave/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <vector>

#include "weave/assign.hpp"
#include "weave/eval.hpp"
#include "weave/flow.hpp"
#include "weave/io.hpp"
#include "weave/synth.hpp"

namespace weave::cli {

namespace {

int log_threshold() {
    static int threshold = [] {
        const char* env = std::getenv("WEAVE_LOG");
        if (env == nullptr) return 1;
        std::string s(env);
        if (s == "off") return -1;
        if (s == "error") return 0;
        if (s == "warn") return 1;
        if (s == "info") return 2;
        if (s == "debug") return 3;
        return 1;
    }();
    return threshold;
}

constexpr const char* kLevelNames[] = {"error", "warn", "info", "debug"};

ZoneConfig load_zone(const RunConfig& config) {
    ZoneConfig zone;
    if (!config.zone_config_path.empty()) {
        zone = io::read_zone_config(config.zone_config_path);
    }
    if (config.distance_m) zone.distance_m = *config.distance_m;
    if (config.speed_mps) zone.mean_speed_mps = *config.speed_mps;
    if (config.w1) zone.w1 = *config.w1;
    if (config.w2) zone.w2 = *config.w2;
    if (config.tau) zone.tau = *config.tau;
    if (config.delta_s) zone.delta_s = *config.delta_s;
    if (config.time_term) {
        if (*config.time_term == "deviation") {
            zone.time_term = TimeTerm::Deviation;
        } else if (*config.time_term == "literal") {
            zone.time_term = TimeTerm::Literal;
        } else {
            raise(ErrorCode::InvalidConfig,
                  "time_term must be deviation or literal, got '" + *config.time_term + "'");
        }
    }
    return validated(zone);
}

void require_side(std::span<const Observation> observations, ZonePoint expected,
                  const std::filesystem::path& path) {
    for (const Observation& o : observations) {
        if (o.zone_point != expected) {
            raise(ErrorCode::InvalidConfig,
                  path.string() + ": record with track_id '" + o.track_id + "' is " +
                      std::string(zone_point_name(o.zone_point)) + " but this file must contain " +
                      std::string(zone_point_name(expected)) + " records");
        }
    }
}

std::string describe_first_violation(const ValidationReport& report) {
    const Violation& v = report.violations.front();
    std::ostringstream msg;
    msg << violation_kind_name(v.kind) << " at record " << v.record_index << " ("
        << zone_point_name(v.zone_point) << " camera '" << v.camera_id << "' track '" << v.track_id
        << "'): " << v.detail;
    return msg.str();
}

template <typename Fn>
int guarded(const char* command, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << command << ": internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

void log_message(int level, const std::string& message) {
    if (level <= log_threshold()) {
        std::cerr << "[weave:" << kLevelNames[level] << "] " << message << "\n";
    }
}

void log_error(const std::string& message) { log_message(0, message); }
void log_warn(const std::string& message) { log_message(1, message); }
void log_info(const std::string& message) { log_message(2, message); }
void log_debug(const std::string& message) { log_message(3, message); }

int cmd_match(const RunConfig& config) {
    return guarded("match", [&] {
        ZoneConfig zone = load_zone(config);
        std::vector<Observation> entries = io::read_observations(config.entries_path);
        std::vector<Observation> exits = io::read_observations(config.exits_path);
        require_side(entries, ZonePoint::Entry, config.entries_path);
        require_side(exits, ZonePoint::Exit, config.exits_path);
        log_info("loaded " + std::to_string(entries.size()) + " entry and " +
                 std::to_string(exits.size()) + " exit observations");

        std::vector<Observation> combined;
        combined.reserve(entries.size() + exits.size());
        combined.insert(combined.end(), entries.begin(), entries.end());
        combined.insert(combined.end(), exits.begin(), exits.end());
        ValidationReport validation = validate_dataset(combined, zone);
        if (!validation.ok()) {
            raise(ErrorCode::InvalidConfig,
                  std::to_string(validation.violations.size()) + " validation violation(s); first: " +
                      describe_first_violation(validation));
        }

        std::vector<MatchedPair> matches = assign::match_zone(entries, exits, zone);
        log_info("matched " + std::to_string(matches.size()) + " pairs");

        flow::LanePairCounts counts = flow::lane_pair_counts(matches, entries, exits);
        flow::FlowEstimate flows = flow::estimate_flows(counts, validation.entry_lane_counts,
                                                        validation.exit_lane_counts);
        for (const std::string& warning : flows.warnings) log_warn(warning);

        std::optional<eval::MatchMetrics> metrics;
        if (!config.ground_truth_path.empty()) {
            synth::GroundTruth truth = io::read_ground_truth(config.ground_truth_path);
            long long detected = config.total_detected.value_or(truth.total_detected);
            metrics = eval::match_metrics(matches, truth.pairs, detected);
        }

        flow::WeavingReport report = flow::build_report(flows, counts, metrics);
        io::write_report(config.out_path, report, matches, zone);
        std::filesystem::path csv = config.csv_path;
        if (csv.empty()) {
            csv = config.out_path;
            csv.replace_extension(".csv");
        }
        io::write_flow_csv(csv, report);
        log_info("wrote " + config.out_path.string() + " and " + csv.string());
        return 0;
    });
}

int cmd_eval(const RunConfig& config) {
    return guarded("eval", [&] {
        std::vector<MatchedPair> predicted = io::read_report_matches(config.report_path);
        synth::GroundTruth truth = io::read_ground_truth(config.ground_truth_path);
        long long detected = config.total_detected.value_or(truth.total_detected);
        eval::MatchMetrics metrics = eval::match_metrics(predicted, truth.pairs, detected);
        if (!config.out_path.empty()) {
            io::write_match_metrics(config.out_path, metrics);
        }
        char line[128];
        std::snprintf(line, sizeof(line), "TPR%% %.2f Precision%% %.2f\n", 100.0 * metrics.tpr,
                      100.0 * metrics.precision);
        std::cout << line;
        return 0;
    });
}

int cmd_synth(const RunConfig& config) {
    return guarded("synth", [&] {
        ZoneConfig zone = load_zone(config);
        synth::ScenarioSpec spec = io::read_scenario_spec(config.scenario_path);
        if (config.seed) spec.seed = *config.seed;
        synth::Scenario scenario = synth::generate_scenario(spec, zone);
        log_info("generated " + std::to_string(scenario.entries.size()) + " entry and " +
                 std::to_string(scenario.exits.size()) + " exit observations");

        io::EmbeddingLayout layout =
            config.binary_embeddings ? io::EmbeddingLayout::Sidecar : io::EmbeddingLayout::Inline;
        std::filesystem::create_directories(config.out_dir);
        io::write_observations(config.out_dir / "entries.jsonl", scenario.entries, layout);
        io::write_observations(config.out_dir / "exits.jsonl", scenario.exits, layout);
        io::write_ground_truth(config.out_dir / "ground_truth.json", scenario.truth);
        return 0;
    });
}

int cmd_reid_eval(const RunConfig& config) {
    return guarded("reid-eval", [&] {
        std::vector<eval::LabeledEmbedding> query = io::read_labeled_embeddings(config.query_path);
        std::vector<eval::LabeledEmbedding> gallery =
            io::read_labeled_embeddings(config.gallery_path);
        eval::ReidMetrics metrics = eval::cmc_map(query, gallery, config.max_rank);
        if (!config.out_path.empty()) {
            io::write_reid_metrics(config.out_path, metrics);
        }
        char line[160];
        std::snprintf(line, sizeof(line), "mAP%% %.2f CMC1%% %.2f CMC5%% %.2f CMC10%% %.2f\n",
                      100.0 * metrics.mean_average_precision, 100.0 * metrics.cmc_at_rank(1),
                      100.0 * metrics.cmc_at_rank(5), 100.0 * metrics.cmc_at_rank(10));
        std::cout << line;
        return 0;
    });
}

}  // namespace weave::cli
