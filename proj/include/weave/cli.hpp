#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "weave/model.hpp"

namespace weave::cli {

/// Everything a subcommand can take. Each cmd_* reads the fields it needs;
/// optional fields override values loaded from the config documents.
struct RunConfig {
    std::filesystem::path entries_path;
    std::filesystem::path exits_path;
    std::filesystem::path zone_config_path;
    std::filesystem::path out_path;
    std::filesystem::path csv_path;          // defaults to out_path with .csv
    std::filesystem::path ground_truth_path;
    std::filesystem::path report_path;
    std::filesystem::path scenario_path;
    std::filesystem::path out_dir;
    std::filesystem::path query_path;
    std::filesystem::path gallery_path;

    std::optional<double> w1;
    std::optional<double> w2;
    std::optional<double> tau;
    std::optional<double> delta_s;
    std::optional<double> distance_m;
    std::optional<double> speed_mps;
    std::optional<std::string> time_term;    // "deviation" | "literal"
    std::optional<std::uint64_t> seed;
    std::optional<long long> total_detected;
    std::size_t max_rank = 10;
    bool binary_embeddings = false;
};

// Exit codes: 0 success, 2 parse/validation/config failure (message names
// the first offending record), 1 internal error.
int cmd_match(const RunConfig& config);
int cmd_eval(const RunConfig& config);
int cmd_synth(const RunConfig& config);
int cmd_reid_eval(const RunConfig& config);

/// Stderr logger gated by the WEAVE_LOG env var
/// (off|error|warn|info|debug, default warn).
void log_message(int level, const std::string& message);
void log_error(const std::string& message);
void log_warn(const std::string& message);
void log_info(const std::string& message);
void log_debug(const std::string& message);

}  // namespace weave::cli
