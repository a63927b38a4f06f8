#include <string>

#include <CLI11.hpp>

#include "weave/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Lane-level weaving flow estimation from two-point vehicle re-identification"};
    app.require_subcommand(1);

    weave::cli::RunConfig config;

    auto add_zone_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", config.zone_config_path, "Zone config JSON")->required();
        cmd->add_option("--w1", config.w1, "Appearance-cost weight override");
        cmd->add_option("--w2", config.w2, "Time-cost weight override");
        cmd->add_option("--tau", config.tau, "Cosine similarity threshold override");
        cmd->add_option("--delta", config.delta_s, "Candidate window half-width override, seconds");
        cmd->add_option("--distance-m", config.distance_m, "Zone length override, meters");
        cmd->add_option("--speed-mps", config.speed_mps, "Mean speed override, m/s");
        cmd->add_option("--time-term", config.time_term, "Travel-time cost form: deviation|literal")
            ->check(CLI::IsMember({"deviation", "literal"}));
    };

    CLI::App* match = app.add_subcommand("match", "Match entries to exits and estimate lane flows");
    match->add_option("--entries", config.entries_path, "P1 observations (JSONL)")->required();
    match->add_option("--exits", config.exits_path, "P2 observations (JSONL)")->required();
    add_zone_flags(match);
    match->add_option("--out", config.out_path, "Report JSON output path")->required();
    match->add_option("--csv", config.csv_path, "Lane-pair CSV output path (default: out with .csv)");
    match->add_option("--ground-truth", config.ground_truth_path,
                      "Optional ground-truth JSON; attaches a metrics block");
    match->add_option("--total-detected", config.total_detected, "Override detected-vehicle count");

    CLI::App* eval_cmd = app.add_subcommand("eval", "Score a report against ground truth");
    eval_cmd->add_option("--report", config.report_path, "Report JSON from 'match'")->required();
    eval_cmd->add_option("--ground-truth", config.ground_truth_path, "Ground-truth JSON")->required();
    eval_cmd->add_option("--out", config.out_path, "Metrics JSON output path");
    eval_cmd->add_option("--total-detected", config.total_detected, "Override detected-vehicle count");

    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic scenario with ground truth");
    synth->add_option("--scenario", config.scenario_path, "Scenario spec JSON")->required();
    add_zone_flags(synth);
    synth->add_option("--out-dir", config.out_dir, "Output directory")->required();
    synth->add_option("--seed", config.seed, "Override the scenario seed");
    synth->add_flag("--binary-embeddings", config.binary_embeddings,
                    "Write embeddings to a .wemb sidecar instead of inline arrays");

    CLI::App* reid = app.add_subcommand("reid-eval", "Rank gallery per query; report mAP and CMC");
    reid->add_option("--query", config.query_path, "Query JSONL with identity labels")->required();
    reid->add_option("--gallery", config.gallery_path, "Gallery JSONL with identity labels")->required();
    reid->add_option("--out", config.out_path, "Metrics JSON output path");
    reid->add_option("--max-rank", config.max_rank, "Deepest CMC rank to compute");

    CLI11_PARSE(app, argc, argv);

    if (match->parsed()) return weave::cli::cmd_match(config);
    if (eval_cmd->parsed()) return weave::cli::cmd_eval(config);
    if (synth->parsed()) return weave::cli::cmd_synth(config);
    if (reid->parsed()) return weave::cli::cmd_reid_eval(config);
    return 1;
}
