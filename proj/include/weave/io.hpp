#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weave/eval.hpp"
#include "weave/flow.hpp"
#include "weave/model.hpp"
#include "weave/synth.hpp"

namespace weave::io {

// Observation files are JSON Lines: one record per line with camera_id,
// zone_point ("P1"|"P2"), track_id, class ("car"|"truck"), timestamp_s,
// lane_id, and either an inline "embedding" array or an "embedding_ref"
// index into the sidecar next to the file (same stem, ".wemb" extension).
//
// Sidecar layout, little-endian throughout: magic "WEMB", uint32 dimension
// D, then consecutive records of D IEEE-754 float32 values. embedding_ref
// is the zero-based record index, so records are random-accessible by
// fixed stride.

enum class EmbeddingLayout { Inline, Sidecar };

std::filesystem::path sidecar_path_for(const std::filesystem::path& observations_path);

std::vector<Observation> read_observations(const std::filesystem::path& path);

void write_observations(const std::filesystem::path& path,
                        std::span<const Observation> observations,
                        EmbeddingLayout layout);

// Zone configuration document (single JSON object). Keys: distance_m,
// speed_mps, entry_lanes, exit_lanes, w1, w2, tau, delta_s, time_term.
// Optional keys fall back to the built-in defaults.
ZoneConfig read_zone_config(const std::filesystem::path& path);

synth::ScenarioSpec read_scenario_spec(const std::filesystem::path& path);

struct GroundTruthFile {
    synth::GroundTruth truth;
};

void write_ground_truth(const std::filesystem::path& path, const synth::GroundTruth& truth);
synth::GroundTruth read_ground_truth(const std::filesystem::path& path);

/// Report document: schema_version "1", zone echo, lane-pair counts and
/// flows, sampling rate, warnings, matches, optional metrics block.
void write_report(const std::filesystem::path& path,
                  const flow::WeavingReport& report,
                  std::span<const MatchedPair> matches,
                  const ZoneConfig& zone);

/// Reads back the matches array of a report written by write_report.
std::vector<MatchedPair> read_report_matches(const std::filesystem::path& path);

/// Lane-pair CSV for plotting: header
/// entry_lane,exit_lane,matched,estimated_flow with NA for unestimated rows.
void write_flow_csv(const std::filesystem::path& path, const flow::WeavingReport& report);

void write_match_metrics(const std::filesystem::path& path, const eval::MatchMetrics& metrics);

void write_reid_metrics(const std::filesystem::path& path, const eval::ReidMetrics& metrics);

// ReID evaluation inputs are JSON Lines with identity plus an inline
// embedding array or a sidecar reference, same sidecar convention as
// observation files.
std::vector<eval::LabeledEmbedding> read_labeled_embeddings(const std::filesystem::path& path);

/// Writes content to path atomically (temp file in the same directory,
/// then rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace weave::io
