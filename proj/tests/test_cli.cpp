#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <sys/wait.h>

#include "weave/io.hpp"

using namespace weave;

namespace {

namespace fs = std::filesystem;

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
    text.replace(text.find(from), from.size(), to);
    return text;
}

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

struct Cli {
    fs::path dir;

    Cli() {
        dir = fs::temp_directory_path() /
              ("weave_cli_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    ~Cli() { fs::remove_all(dir); }

    RunResult run(const std::string& args) const {
        fs::path out_file = dir / "stdout.txt";
        fs::path err_file = dir / "stderr.txt";
        std::string command = std::string(WEAVE_CLI_PATH) + " " + args + " >" +
                              out_file.string() + " 2>" + err_file.string();
        int status = std::system(command.c_str());
        RunResult r;
        r.exit_code = WEXITSTATUS(status);
        r.out = slurp(out_file);
        r.err = slurp(err_file);
        return r;
    }

    fs::path write(const std::string& name, const std::string& content) const {
        fs::path p = dir / name;
        io::write_file_atomic(p, content);
        return p;
    }
};

const char* kZone = R"({"distance_m": 500.0, "speed_mps": 25.0,
    "entry_lanes": [1, 2, 3], "exit_lanes": [1, 2]})";

const char* kScenario = R"({
    "vehicle_count": 40,
    "entry_lane_probs": {"1": 0.5, "2": 0.3, "3": 0.2},
    "transition": {"1": {"1": 0.7, "2": 0.3}, "2": {"1": 0.4, "2": 0.6},
                   "3": {"1": 0.5, "2": 0.5}},
    "speed_mean_mps": 25.0,
    "speed_stddev_mps": 0.0,
    "embedding_dim": 16,
    "noise_stddev": 0.0,
    "truck_fraction": 0.25,
    "clutter_entry": 0,
    "clutter_exit": 0,
    "seed": 42
})";

}  // namespace

TEST_CASE("synth is deterministic per seed, byte for byte") {
    Cli cli;
    fs::path zone = cli.write("zone.json", kZone);
    fs::path scenario = cli.write("scenario.json", kScenario);

    RunResult a = cli.run("synth --scenario " + scenario.string() + " --config " + zone.string() +
                          " --out-dir " + (cli.dir / "run_a").string());
    RunResult b = cli.run("synth --scenario " + scenario.string() + " --config " + zone.string() +
                          " --out-dir " + (cli.dir / "run_b").string());
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    for (const char* name : {"entries.jsonl", "exits.jsonl", "ground_truth.json"}) {
        CHECK(slurp(cli.dir / "run_a" / name) == slurp(cli.dir / "run_b" / name));
        CHECK_FALSE(slurp(cli.dir / "run_a" / name).empty());
    }

    SUBCASE("seed flag changes the output") {
        RunResult c = cli.run("synth --scenario " + scenario.string() + " --config " +
                              zone.string() + " --seed 43 --out-dir " +
                              (cli.dir / "run_c").string());
        REQUIRE(c.exit_code == 0);
        CHECK(slurp(cli.dir / "run_a" / "entries.jsonl") !=
              slurp(cli.dir / "run_c" / "entries.jsonl"));
    }

    SUBCASE("binary embeddings write sidecars that parse back identically") {
        RunResult c = cli.run("synth --scenario " + scenario.string() + " --config " +
                              zone.string() + " --binary-embeddings --out-dir " +
                              (cli.dir / "run_bin").string());
        REQUIRE(c.exit_code == 0);
        CHECK(fs::exists(cli.dir / "run_bin" / "entries.wemb"));
        std::vector<Observation> inline_obs =
            io::read_observations(cli.dir / "run_a" / "entries.jsonl");
        std::vector<Observation> sidecar_obs =
            io::read_observations(cli.dir / "run_bin" / "entries.jsonl");
        REQUIRE(inline_obs.size() == sidecar_obs.size());
        for (std::size_t i = 0; i < inline_obs.size(); ++i) {
            CHECK(inline_obs[i].embedding == sidecar_obs[i].embedding);
        }
    }
}

TEST_CASE("match happy path produces a report, CSV, and perfect metrics") {
    Cli cli;
    fs::path zone = cli.write("zone.json", kZone);
    fs::path scenario = cli.write("scenario.json", kScenario);
    REQUIRE(cli.run("synth --scenario " + scenario.string() + " --config " + zone.string() +
                    " --out-dir " + (cli.dir / "data").string())
                .exit_code == 0);

    std::string match_args = "match --entries " + (cli.dir / "data" / "entries.jsonl").string() +
                             " --exits " + (cli.dir / "data" / "exits.jsonl").string() +
                             " --config " + zone.string() + " --out " +
                             (cli.dir / "report.json").string() + " --ground-truth " +
                             (cli.dir / "data" / "ground_truth.json").string();
    RunResult r = cli.run(match_args);
    REQUIRE(r.exit_code == 0);

    std::string report = slurp(cli.dir / "report.json");
    CHECK(report.find("\"sampling_rate\": 1.0") != std::string::npos);
    CHECK(report.find("\"tpr_percent\": \"100.00\"") != std::string::npos);
    CHECK(report.find("\"precision_percent\": \"100.00\"") != std::string::npos);

    std::string csv = slurp(cli.dir / "report.csv");
    CHECK(csv.rfind("entry_lane,exit_lane,matched,estimated_flow\n", 0) == 0);

    SUBCASE("reports are byte-identical across runs") {
        fs::path second = cli.dir / "report2.json";
        RunResult again = cli.run("match --entries " +
                                  (cli.dir / "data" / "entries.jsonl").string() + " --exits " +
                                  (cli.dir / "data" / "exits.jsonl").string() + " --config " +
                                  zone.string() + " --out " + second.string() +
                                  " --ground-truth " +
                                  (cli.dir / "data" / "ground_truth.json").string());
        REQUIRE(again.exit_code == 0);
        CHECK(slurp(cli.dir / "report.json") == slurp(second));
    }

    SUBCASE("eval scores the report against the ground truth") {
        RunResult ev = cli.run("eval --report " + (cli.dir / "report.json").string() +
                               " --ground-truth " +
                               (cli.dir / "data" / "ground_truth.json").string() + " --out " +
                               (cli.dir / "metrics.json").string());
        REQUIRE(ev.exit_code == 0);
        CHECK(ev.out == "TPR% 100.00 Precision% 100.00\n");
    }

    SUBCASE("tau override flows into the report echo") {
        RunResult strict =
            cli.run("match --entries " + (cli.dir / "data" / "entries.jsonl").string() +
                    " --exits " + (cli.dir / "data" / "exits.jsonl").string() + " --config " +
                    zone.string() + " --tau 0.99 --out " + (cli.dir / "strict.json").string());
        REQUIRE(strict.exit_code == 0);
        CHECK(slurp(cli.dir / "strict.json").find("\"tau\": 0.99") != std::string::npos);
    }
}

TEST_CASE("malformed input line is cited by number") {
    Cli cli;
    fs::path zone = cli.write("zone.json", kZone);
    std::string good = R"({"camera_id":"c","zone_point":"P1","track_id":"tN","class":"car",)"
                       R"("timestamp_s":1.0,"lane_id":1,"embedding":[1.0,0.0]})";
    std::string lines;
    for (int i = 1; i <= 6; ++i) {
        std::string rec = good;
        rec.replace(rec.find("tN"), 2, "t" + std::to_string(i));
        lines += rec + "\n";
    }
    lines += "{broken\n";
    fs::path entries = cli.write("entries.jsonl", lines);
    fs::path exits = cli.write("exits.jsonl", "");

    RunResult r = cli.run("match --entries " + entries.string() + " --exits " + exits.string() +
                          " --config " + zone.string() + " --out " +
                          (cli.dir / "report.json").string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("line 7") != std::string::npos);
}

TEST_CASE("validation violations exit 2 and cite the first record") {
    Cli cli;
    fs::path zone = cli.write("zone.json", kZone);
    fs::path entries = cli.write(
        "entries.jsonl",
        R"({"camera_id":"c","zone_point":"P1","track_id":"t1","class":"car",)"
        R"("timestamp_s":1.0,"lane_id":9,"embedding":[1.0,0.0]})"
        "\n");
    fs::path exits = cli.write(
        "exits.jsonl",
        R"({"camera_id":"c2","zone_point":"P2","track_id":"u1","class":"car",)"
        R"("timestamp_s":21.0,"lane_id":1,"embedding":[1.0,0.0]})"
        "\n");
    RunResult r = cli.run("match --entries " + entries.string() + " --exits " + exits.string() +
                          " --config " + zone.string() + " --out " +
                          (cli.dir / "report.json").string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("UnknownLane") != std::string::npos);
    CHECK(r.err.find("t1") != std::string::npos);
}

TEST_CASE("eval fixtures") {
    Cli cli;
    synth::GroundTruth truth;
    for (int i = 0; i < 6; ++i) {
        truth.pairs.insert({"e" + std::to_string(i), "x" + std::to_string(i)});
    }
    truth.total_detected = 100;
    io::write_ground_truth(cli.dir / "gt.json", truth);

    // A report whose matches include the 6 true pairs plus 2 wrong ones.
    std::string matches = "[";
    for (int i = 0; i < 8; ++i) {
        if (i > 0) matches += ",";
        matches += R"({"entry_track":"e)" + std::to_string(i) + R"(","exit_track":"x)" +
                   std::to_string(i < 6 ? i : 90 + i) + R"("})";
    }
    matches += "]";
    cli.write("report.json", R"({"schema_version":"1","matches":)" + matches + "}");

    RunResult r = cli.run("eval --report " + (cli.dir / "report.json").string() +
                          " --ground-truth " + (cli.dir / "gt.json").string() + " --out " +
                          (cli.dir / "metrics.json").string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.out == "TPR% 8.00 Precision% 75.00\n");
    std::string metrics = slurp(cli.dir / "metrics.json");
    CHECK(metrics.find("\"tpr_percent\": \"8.00\"") != std::string::npos);
    CHECK(metrics.find("\"precision_percent\": \"75.00\"") != std::string::npos);

    SUBCASE("empty prediction scores zero") {
        cli.write("empty.json", R"({"schema_version":"1","matches":[]})");
        RunResult e = cli.run("eval --report " + (cli.dir / "empty.json").string() +
                              " --ground-truth " + (cli.dir / "gt.json").string());
        REQUIRE(e.exit_code == 0);
        CHECK(e.out == "TPR% 0.00 Precision% 0.00\n");
    }

    SUBCASE("missing ground truth exits 2") {
        RunResult e = cli.run("eval --report " + (cli.dir / "report.json").string() +
                              " --ground-truth " + (cli.dir / "nope.json").string());
        CHECK(e.exit_code == 2);
    }
}

TEST_CASE("reid-eval") {
    Cli cli;
    std::string gallery;
    for (int i = 0; i < 4; ++i) {
        double angle = 0.5 * i;
        gallery += R"({"identity":"id)" + std::to_string(i) + R"(","embedding":[)" +
                   std::to_string(std::cos(angle)) + "," + std::to_string(std::sin(angle)) +
                   "]}\n";
    }
    fs::path gallery_path = cli.write("gallery.jsonl", gallery);

    SUBCASE("self retrieval is perfect") {
        fs::path query_path = cli.write("query.jsonl", gallery);
        RunResult r = cli.run("reid-eval --query " + query_path.string() + " --gallery " +
                              gallery_path.string() + " --out " +
                              (cli.dir / "reid.json").string());
        REQUIRE(r.exit_code == 0);
        CHECK(r.out == "mAP% 100.00 CMC1% 100.00 CMC5% 100.00 CMC10% 100.00\n");
        CHECK(slurp(cli.dir / "reid.json").find("\"map_percent\": \"100.00\"") !=
              std::string::npos);
    }

    SUBCASE("rank-2 hit mirrors the metric example") {
        // Query identity id1; id0's vector is closer, so the hit lands at rank 2.
        fs::path query_path =
            cli.write("query.jsonl", R"({"identity":"id1","embedding":[1.0,0.0]})" "\n");
        RunResult r = cli.run("reid-eval --query " + query_path.string() + " --gallery " +
                              gallery_path.string());
        REQUIRE(r.exit_code == 0);
        CHECK(r.out == "mAP% 50.00 CMC1% 0.00 CMC5% 100.00 CMC10% 100.00\n");
    }

    SUBCASE("empty query exits 2") {
        fs::path query_path = cli.write("query.jsonl", "");
        RunResult r = cli.run("reid-eval --query " + query_path.string() + " --gallery " +
                              gallery_path.string());
        CHECK(r.exit_code == 2);
    }

    SUBCASE("identity absent from the gallery exits 2") {
        fs::path query_path =
            cli.write("query.jsonl", R"({"identity":"ghost","embedding":[1.0,0.0]})" "\n");
        RunResult r = cli.run("reid-eval --query " + query_path.string() + " --gallery " +
                              gallery_path.string());
        CHECK(r.exit_code == 2);
    }
}

TEST_CASE("synth degenerate cases through the CLI") {
    Cli cli;
    fs::path zone = cli.write("zone.json", kZone);

    SUBCASE("zero vehicles still writes valid empty files") {
        std::string scenario =
            replace_once(kScenario, "\"vehicle_count\": 40", "\"vehicle_count\": 0");
        fs::path p = cli.write("scenario.json", scenario);
        RunResult r = cli.run("synth --scenario " + p.string() + " --config " + zone.string() +
                              " --out-dir " + (cli.dir / "empty").string());
        REQUIRE(r.exit_code == 0);
        CHECK(slurp(cli.dir / "empty" / "entries.jsonl").empty());
        CHECK(io::read_ground_truth(cli.dir / "empty" / "ground_truth.json").pairs.empty());
    }

    SUBCASE("truck fraction one makes every record a truck") {
        std::string scenario =
            replace_once(kScenario, "\"truck_fraction\": 0.25", "\"truck_fraction\": 1.0");
        fs::path p = cli.write("scenario.json", scenario);
        RunResult r = cli.run("synth --scenario " + p.string() + " --config " + zone.string() +
                              " --out-dir " + (cli.dir / "trucks").string());
        REQUIRE(r.exit_code == 0);
        std::vector<Observation> obs =
            io::read_observations(cli.dir / "trucks" / "entries.jsonl");
        REQUIRE(!obs.empty());
        for (const Observation& o : obs) CHECK(o.vehicle_class == VehicleClass::Truck);
    }
}
