#include "weave/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace weave::io {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line,
                             const std::string& what) {
    raise(ErrorCode::ParseError, path.string() + " line " + std::to_string(line) + ": " + what);
}

[[noreturn]] void file_fail(const std::filesystem::path& path, const std::string& what) {
    raise(ErrorCode::ParseError, path.string() + ": " + what);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json parse_document(const std::filesystem::path& path) {
    json doc = json::parse(read_text(path), nullptr, false);
    if (doc.is_discarded()) {
        file_fail(path, "not valid JSON");
    }
    return doc;
}

std::string percent_2dp(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * fraction);
    return buf;
}

void append_u32_le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void append_f32_le(std::string& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));
    append_u32_le(out, bits);
}

std::uint32_t load_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float load_f32_le(const unsigned char* p) {
    std::uint32_t bits = load_u32_le(p);
    float f;
    std::memcpy(&f, &bits, sizeof(f));
    return f;
}

class SidecarReader {
public:
    explicit SidecarReader(const std::filesystem::path& path) : path_(path) {
        bytes_ = read_text(path);
        if (bytes_.size() < 8 || bytes_.compare(0, 4, "WEMB") != 0) {
            file_fail(path, "bad sidecar header, expected magic WEMB");
        }
        dim_ = load_u32_le(reinterpret_cast<const unsigned char*>(bytes_.data()) + 4);
        std::size_t payload = bytes_.size() - 8;
        if (dim_ == 0 || payload % (4ull * dim_) != 0) {
            file_fail(path, "sidecar payload is not a whole number of records");
        }
        record_count_ = payload / (4ull * dim_);
    }

    EmbeddingVector record(std::uint64_t index) const {
        if (index >= record_count_) {
            file_fail(path_, "embedding_ref " + std::to_string(index) + " out of range (" +
                                 std::to_string(record_count_) + " records)");
        }
        EmbeddingVector e;
        e.values.resize(dim_);
        const unsigned char* base = reinterpret_cast<const unsigned char*>(bytes_.data()) + 8 +
                                    index * 4ull * dim_;
        for (std::uint32_t i = 0; i < dim_; ++i) {
            e.values[i] = load_f32_le(base + 4ull * i);
        }
        return e;
    }

private:
    std::filesystem::path path_;
    std::string bytes_;
    std::uint32_t dim_ = 0;
    std::uint64_t record_count_ = 0;
};

ZonePoint parse_zone_point(const json& j, const std::filesystem::path& path, std::size_t line) {
    std::string s = j.get<std::string>();
    if (s == "P1") return ZonePoint::Entry;
    if (s == "P2") return ZonePoint::Exit;
    parse_fail(path, line, "zone_point must be \"P1\" or \"P2\", got \"" + s + "\"");
}

VehicleClass parse_vehicle_class(const json& j, const std::filesystem::path& path,
                                 std::size_t line) {
    std::string s = j.get<std::string>();
    if (s == "car") return VehicleClass::Car;
    if (s == "truck") return VehicleClass::Truck;
    parse_fail(path, line, "class must be \"car\" or \"truck\", got \"" + s + "\"");
}

const json& require_key(const json& record, const char* key, const std::filesystem::path& path,
                        std::size_t line) {
    auto it = record.find(key);
    if (it == record.end()) {
        parse_fail(path, line, std::string("missing key \"") + key + "\"");
    }
    return *it;
}

}  // namespace

std::filesystem::path sidecar_path_for(const std::filesystem::path& observations_path) {
    std::filesystem::path p = observations_path;
    p.replace_extension(".wemb");
    return p;
}

std::vector<Observation> read_observations(const std::filesystem::path& path) {
    std::string text = read_text(path);
    std::vector<Observation> out;
    std::optional<SidecarReader> sidecar;

    std::istringstream lines(text);
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(lines, line)) {
        ++line_number;
        if (line.empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            parse_fail(path, line_number, "malformed JSON record");
        }
        try {
            Observation o;
            o.camera_id = require_key(record, "camera_id", path, line_number).get<std::string>();
            o.zone_point =
                parse_zone_point(require_key(record, "zone_point", path, line_number), path, line_number);
            o.track_id = require_key(record, "track_id", path, line_number).get<std::string>();
            o.vehicle_class =
                parse_vehicle_class(require_key(record, "class", path, line_number), path, line_number);
            const json& ts = require_key(record, "timestamp_s", path, line_number);
            if (!ts.is_number()) parse_fail(path, line_number, "timestamp_s must be a number");
            o.timestamp_s = ts.get<double>();
            const json& lane = require_key(record, "lane_id", path, line_number);
            if (!lane.is_number_integer()) parse_fail(path, line_number, "lane_id must be an integer");
            o.lane_id = lane.get<int>();

            if (auto emb = record.find("embedding"); emb != record.end()) {
                if (!emb->is_array()) parse_fail(path, line_number, "embedding must be an array");
                o.embedding.values.reserve(emb->size());
                for (const json& v : *emb) {
                    if (!v.is_number()) {
                        parse_fail(path, line_number, "embedding entries must be numbers");
                    }
                    o.embedding.values.push_back(static_cast<float>(v.get<double>()));
                }
            } else if (auto ref = record.find("embedding_ref"); ref != record.end()) {
                if (!ref->is_number_unsigned()) {
                    parse_fail(path, line_number, "embedding_ref must be a non-negative integer");
                }
                if (!sidecar) {
                    std::filesystem::path sp = sidecar_path_for(path);
                    if (!std::filesystem::exists(sp)) {
                        parse_fail(path, line_number,
                                   "embedding_ref used but sidecar " + sp.string() + " is missing");
                    }
                    sidecar.emplace(sp);
                }
                o.embedding = sidecar->record(ref->get<std::uint64_t>());
            } else {
                parse_fail(path, line_number, "record needs embedding or embedding_ref");
            }
            out.push_back(std::move(o));
        } catch (const json::exception& e) {
            parse_fail(path, line_number, e.what());
        }
    }
    return out;
}

void write_observations(const std::filesystem::path& path,
                        std::span<const Observation> observations,
                        EmbeddingLayout layout) {
    std::string text;
    std::string sidecar;
    if (layout == EmbeddingLayout::Sidecar) {
        sidecar = "WEMB";
        std::uint32_t dim =
            observations.empty() ? 0 : static_cast<std::uint32_t>(observations[0].embedding.dim());
        append_u32_le(sidecar, dim);
    }

    for (std::size_t i = 0; i < observations.size(); ++i) {
        const Observation& o = observations[i];
        json record;
        record["camera_id"] = o.camera_id;
        record["zone_point"] = std::string(zone_point_name(o.zone_point));
        record["track_id"] = o.track_id;
        record["class"] = std::string(vehicle_class_name(o.vehicle_class));
        record["timestamp_s"] = o.timestamp_s;
        record["lane_id"] = o.lane_id;
        if (layout == EmbeddingLayout::Inline) {
            json emb = json::array();
            for (float v : o.embedding.values) emb.push_back(v);
            record["embedding"] = std::move(emb);
        } else {
            record["embedding_ref"] = i;
            for (float v : o.embedding.values) append_f32_le(sidecar, v);
        }
        text += record.dump();
        text += '\n';
    }

    write_file_atomic(path, text);
    if (layout == EmbeddingLayout::Sidecar) {
        write_file_atomic(sidecar_path_for(path), sidecar);
    }
}

ZoneConfig read_zone_config(const std::filesystem::path& path) {
    json doc = parse_document(path);
    if (!doc.is_object()) file_fail(path, "zone config must be a JSON object");
    ZoneConfig zone;
    try {
        zone.distance_m = doc.at("distance_m").get<double>();
        zone.mean_speed_mps = doc.at("speed_mps").get<double>();
        for (const json& lane : doc.at("entry_lanes")) zone.entry_lanes.insert(lane.get<int>());
        for (const json& lane : doc.at("exit_lanes")) zone.exit_lanes.insert(lane.get<int>());
        if (doc.contains("w1")) zone.w1 = doc.at("w1").get<double>();
        if (doc.contains("w2")) zone.w2 = doc.at("w2").get<double>();
        if (doc.contains("tau")) zone.tau = doc.at("tau").get<double>();
        if (doc.contains("delta_s")) zone.delta_s = doc.at("delta_s").get<double>();
        if (doc.contains("time_term")) {
            std::string term = doc.at("time_term").get<std::string>();
            if (term == "deviation") {
                zone.time_term = TimeTerm::Deviation;
            } else if (term == "literal") {
                zone.time_term = TimeTerm::Literal;
            } else {
                file_fail(path, "time_term must be \"deviation\" or \"literal\"");
            }
        }
    } catch (const json::exception& e) {
        file_fail(path, e.what());
    }
    return zone;
}

synth::ScenarioSpec read_scenario_spec(const std::filesystem::path& path) {
    json doc = parse_document(path);
    if (!doc.is_object()) file_fail(path, "scenario spec must be a JSON object");
    synth::ScenarioSpec spec;
    try {
        spec.vehicle_count = doc.at("vehicle_count").get<long long>();
        for (const auto& [lane, p] : doc.at("entry_lane_probs").items()) {
            spec.entry_lane_probs[std::stoi(lane)] = p.get<double>();
        }
        for (const auto& [lane, row] : doc.at("transition").items()) {
            std::map<int, double>& dest = spec.transition[std::stoi(lane)];
            for (const auto& [exit_lane, p] : row.items()) {
                dest[std::stoi(exit_lane)] = p.get<double>();
            }
        }
        spec.speed_mean_mps = doc.at("speed_mean_mps").get<double>();
        spec.speed_stddev_mps = doc.value("speed_stddev_mps", 0.0);
        spec.embedding_dim = doc.at("embedding_dim").get<std::size_t>();
        spec.identity_scale = doc.value("identity_scale", 1.0);
        spec.noise_stddev = doc.value("noise_stddev", 0.0);
        spec.truck_fraction = doc.value("truck_fraction", 0.0);
        spec.clutter_entry = doc.value("clutter_entry", 0ll);
        spec.clutter_exit = doc.value("clutter_exit", 0ll);
        spec.arrival_rate_per_s = doc.value("arrival_rate_per_s", 1.0);
        spec.seed = doc.value("seed", 0ull);
    } catch (const json::exception& e) {
        file_fail(path, e.what());
    } catch (const std::invalid_argument&) {
        file_fail(path, "lane keys must be integers");
    }
    return spec;
}

void write_ground_truth(const std::filesystem::path& path, const synth::GroundTruth& truth) {
    json doc;
    doc["schema_version"] = "1";
    json pairs = json::array();
    for (const auto& [entry, exit] : truth.pairs) {
        pairs.push_back(json::array({entry, exit}));
    }
    doc["pairs"] = std::move(pairs);
    json flows = json::array();
    for (const auto& [lanes, count] : truth.true_flows) {
        json row;
        row["entry_lane"] = lanes.first;
        row["exit_lane"] = lanes.second;
        row["count"] = count;
        flows.push_back(std::move(row));
    }
    doc["true_flows"] = std::move(flows);
    doc["total_detected"] = truth.total_detected;
    json speeds = json::object();
    for (const auto& [track, speed] : truth.vehicle_speed_mps) speeds[track] = speed;
    doc["vehicle_speeds"] = std::move(speeds);
    write_file_atomic(path, doc.dump(2) + "\n");
}

synth::GroundTruth read_ground_truth(const std::filesystem::path& path) {
    json doc = parse_document(path);
    synth::GroundTruth truth;
    try {
        for (const json& pair : doc.at("pairs")) {
            truth.pairs.insert({pair.at(0).get<std::string>(), pair.at(1).get<std::string>()});
        }
        if (doc.contains("true_flows")) {
            for (const json& row : doc.at("true_flows")) {
                truth.true_flows[{row.at("entry_lane").get<int>(), row.at("exit_lane").get<int>()}] =
                    row.at("count").get<long long>();
            }
        }
        truth.total_detected = doc.value("total_detected", 0ll);
        if (doc.contains("vehicle_speeds")) {
            for (const auto& [track, speed] : doc.at("vehicle_speeds").items()) {
                truth.vehicle_speed_mps[track] = speed.get<double>();
            }
        }
    } catch (const json::exception& e) {
        file_fail(path, e.what());
    }
    return truth;
}

namespace {

json zone_to_json(const ZoneConfig& zone) {
    json j;
    j["distance_m"] = zone.distance_m;
    j["speed_mps"] = zone.mean_speed_mps;
    j["entry_lanes"] = zone.entry_lanes;
    j["exit_lanes"] = zone.exit_lanes;
    j["w1"] = zone.w1;
    j["w2"] = zone.w2;
    j["tau"] = zone.tau;
    j["delta_s"] = zone.delta_s;
    j["time_term"] = std::string(time_term_name(zone.time_term));
    return j;
}

json metrics_to_json(const eval::MatchMetrics& m) {
    json j;
    j["true_positives"] = m.true_positives;
    j["false_positives"] = m.false_positives;
    j["system_matches"] = m.system_matches;
    j["total_detected"] = m.total_detected;
    j["tpr"] = m.tpr;
    j["precision"] = m.precision;
    j["tpr_percent"] = percent_2dp(m.tpr);
    j["precision_percent"] = percent_2dp(m.precision);
    return j;
}

}  // namespace

void write_report(const std::filesystem::path& path,
                  const flow::WeavingReport& report,
                  std::span<const MatchedPair> matches,
                  const ZoneConfig& zone) {
    json doc;
    doc["schema_version"] = "1";
    doc["zone"] = zone_to_json(zone);

    json entry_totals = json::object();
    for (const auto& [lane, n] : report.flows.entry_totals) {
        entry_totals[std::to_string(lane)] = n;
    }
    json exit_totals = json::object();
    for (const auto& [lane, n] : report.flows.exit_totals) {
        exit_totals[std::to_string(lane)] = n;
    }
    doc["entry_lane_totals"] = std::move(entry_totals);
    doc["exit_lane_totals"] = std::move(exit_totals);

    json lane_pairs = json::array();
    for (const auto& [pair, flow] : report.flows.flows) {
        json row;
        row["entry_lane"] = pair.first;
        row["exit_lane"] = pair.second;
        row["matched"] = report.counts.at(pair.first, pair.second);
        if (flow.has_value()) {
            row["estimated_flow"] = *flow;
        } else {
            row["estimated_flow"] = nullptr;
        }
        lane_pairs.push_back(std::move(row));
    }
    doc["lane_pairs"] = std::move(lane_pairs);

    doc["total_matched"] = report.counts.total_matched;
    doc["total_entry_count"] = report.total_entry_count;
    doc["sampling_rate"] = report.sampling_rate;
    doc["warnings"] = report.flows.warnings;

    json discrepancy = json::object();
    for (const auto& [lane, d] : report.flows.exit_discrepancy) {
        discrepancy[std::to_string(lane)] = d;
    }
    doc["exit_discrepancy"] = std::move(discrepancy);

    json match_rows = json::array();
    for (const MatchedPair& m : matches) {
        json row;
        row["entry_track"] = m.entry_track;
        row["exit_track"] = m.exit_track;
        row["total_cost"] = m.total_cost;
        row["appearance_cost"] = m.appearance_cost;
        row["time_cost"] = m.time_cost;
        row["similarity"] = m.similarity;
        match_rows.push_back(std::move(row));
    }
    doc["matches"] = std::move(match_rows);

    if (report.metrics.has_value()) {
        doc["metrics"] = metrics_to_json(*report.metrics);
    }
    write_file_atomic(path, doc.dump(2) + "\n");
}

std::vector<MatchedPair> read_report_matches(const std::filesystem::path& path) {
    json doc = parse_document(path);
    std::vector<MatchedPair> out;
    try {
        for (const json& row : doc.at("matches")) {
            MatchedPair m;
            m.entry_track = row.at("entry_track").get<std::string>();
            m.exit_track = row.at("exit_track").get<std::string>();
            m.total_cost = row.value("total_cost", 0.0);
            m.appearance_cost = row.value("appearance_cost", 0.0);
            m.time_cost = row.value("time_cost", 0.0);
            m.similarity = row.value("similarity", 0.0);
            out.push_back(std::move(m));
        }
    } catch (const json::exception& e) {
        file_fail(path, e.what());
    }
    return out;
}

void write_flow_csv(const std::filesystem::path& path, const flow::WeavingReport& report) {
    std::string text = "entry_lane,exit_lane,matched,estimated_flow\n";
    char buf[64];
    for (const auto& [pair, flow] : report.flows.flows) {
        text += std::to_string(pair.first);
        text += ',';
        text += std::to_string(pair.second);
        text += ',';
        text += std::to_string(report.counts.at(pair.first, pair.second));
        text += ',';
        if (flow.has_value()) {
            std::snprintf(buf, sizeof(buf), "%.10g", *flow);
            text += buf;
        } else {
            text += "NA";
        }
        text += '\n';
    }
    write_file_atomic(path, text);
}

void write_match_metrics(const std::filesystem::path& path, const eval::MatchMetrics& metrics) {
    json doc = metrics_to_json(metrics);
    doc["schema_version"] = "1";
    write_file_atomic(path, doc.dump(2) + "\n");
}

void write_reid_metrics(const std::filesystem::path& path, const eval::ReidMetrics& metrics) {
    json doc;
    doc["schema_version"] = "1";
    doc["map"] = metrics.mean_average_precision;
    doc["map_percent"] = percent_2dp(metrics.mean_average_precision);
    json cmc = json::object();
    json cmc_percent = json::object();
    for (std::size_t rank : {std::size_t{1}, std::size_t{5}, std::size_t{10}}) {
        double value = metrics.cmc_at_rank(rank);
        cmc[std::to_string(rank)] = value;
        cmc_percent[std::to_string(rank)] = percent_2dp(value);
    }
    doc["cmc"] = std::move(cmc);
    doc["cmc_percent"] = std::move(cmc_percent);
    write_file_atomic(path, doc.dump(2) + "\n");
}

std::vector<eval::LabeledEmbedding> read_labeled_embeddings(const std::filesystem::path& path) {
    std::string text = read_text(path);
    std::vector<eval::LabeledEmbedding> out;
    std::optional<SidecarReader> sidecar;

    std::istringstream lines(text);
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(lines, line)) {
        ++line_number;
        if (line.empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            parse_fail(path, line_number, "malformed JSON record");
        }
        try {
            eval::LabeledEmbedding item;
            item.identity = require_key(record, "identity", path, line_number).get<std::string>();
            if (auto emb = record.find("embedding"); emb != record.end()) {
                for (const json& v : *emb) {
                    item.embedding.values.push_back(static_cast<float>(v.get<double>()));
                }
            } else if (auto ref = record.find("embedding_ref"); ref != record.end()) {
                if (!sidecar) {
                    std::filesystem::path sp = sidecar_path_for(path);
                    if (!std::filesystem::exists(sp)) {
                        parse_fail(path, line_number,
                                   "embedding_ref used but sidecar " + sp.string() + " is missing");
                    }
                    sidecar.emplace(sp);
                }
                item.embedding = sidecar->record(ref->get<std::uint64_t>());
            } else {
                parse_fail(path, line_number, "record needs embedding or embedding_ref");
            }
            out.push_back(std::move(item));
        } catch (const json::exception& e) {
            parse_fail(path, line_number, e.what());
        }
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path dir = path.parent_path();
    if (!dir.empty()) {
        std::filesystem::create_directories(dir);
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            raise(ErrorCode::IoError, "cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            raise(ErrorCode::IoError, "short write to " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace weave::io
