#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fpkit/commands.hpp"
#include "fpkit/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Synthetic fingerprint generation and evaluation toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    uint64_t seed = 0;
    int threads = 0;
    auto* config_opt = app.add_option("--config", config_path, "Flat key = value config file");
    auto* seed_opt = app.add_option("--seed", seed, "Run seed (overrides config)");
    auto* threads_opt =
        app.add_option("--threads", threads, "Worker threads, 0 = all cores");

    fpkit::SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth_cmd->add_option("--count", synth.count, "Number of identities")->required();
    synth_cmd->add_option("--mates", synth.mates, "Impressions per identity");
    synth_cmd->add_option("--class", synth.finger_class,
                          "arch|left_loop|right_loop|whorl (default: random)");
    synth_cmd->add_option("--width", synth.width, "Image width (px)");
    synth_cmd->add_option("--height", synth.height, "Image height (px)");
    int crease_count = 0;
    auto* crease_opt = synth_cmd->add_option(
        "--creases", crease_count, "Fixed crease count (default: random 0-4)");
    synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();

    fpkit::IngestArgs ingest;
    auto* ingest_cmd =
        app.add_subcommand("ingest", "Build a manifest from an image directory");
    ingest_cmd->add_option("--dir", ingest.image_dir, "Image directory")->required();
    ingest_cmd->add_option("--rule", ingest.rule, "perFile|fromFilename");
    ingest_cmd->add_option("--pattern", ingest.pattern,
                           "Identity regex with one capture group");
    ingest_cmd->add_option("--out", ingest.out_manifest, "Manifest path")->required();

    fpkit::ExtractArgs extract;
    auto* extract_cmd =
        app.add_subcommand("extract", "Extract minutiae templates for a manifest");
    extract_cmd->add_option("--manifest", extract.manifest, "Dataset manifest")
        ->required();
    extract_cmd->add_option("--out", extract.out_dir, "Template directory")
        ->required();

    fpkit::MatchArgs match;
    auto* match_cmd = app.add_subcommand("match", "Score template pairs");
    match_cmd->add_option("--templates", match.template_dir, "Template directory")
        ->required();
    match_cmd->add_option("--pairs", match.pairs_file,
                          "probe<TAB>gallery pair list")
        ->required();
    match_cmd->add_option("--out", match.out_scores, "Score file (binary)")
        ->required();

    fpkit::EvalArgs eval;
    double target_far = 0.0;
    int per_print = 0;
    auto* eval_cmd = app.add_subcommand(
        "eval-uniqueness", "Imposter-score study of synthetic vs bonafide sets");
    eval_cmd->add_option("--bona", eval.bona_manifest, "Bonafide manifest")
        ->required();
    eval_cmd->add_option("--syn", eval.syn_manifest, "Synthetic manifest")
        ->required();
    auto* far_opt =
        eval_cmd->add_option("--target-far", target_far, "Target FAR on (a)");
    auto* pp_opt = eval_cmd->add_option("--per-print", per_print,
                                        "Imposter partners per print");
    eval_cmd->add_option("--out", eval.out_dir, "Report directory")->required();

    fpkit::MetricsArgs metrics;
    auto* metrics_cmd =
        app.add_subcommand("metrics", "Per-print metric battery and summaries");
    metrics_cmd
        ->add_option("--manifest", metrics.manifests,
                     "Dataset manifest (repeatable)")
        ->required();
    metrics_cmd->add_option("--nfiq2", metrics.nfiq2_csv,
                            "NFIQ2 scores CSV (print_id,score)");
    metrics_cmd->add_option("--out", metrics.out_dir, "Report directory")
        ->required();

    std::string feat_a, feat_b;
    auto* fid_cmd = app.add_subcommand(
        "fid", "Frechet distance between two feature CSVs");
    fid_cmd->add_option("features_a", feat_a, "First feature CSV")->required();
    fid_cmd->add_option("features_b", feat_b, "Second feature CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        fpkit::RunConfig cfg;
        if (config_opt->count() > 0) cfg = fpkit::load_config(config_path);
        if (seed_opt->count() > 0) cfg.seed = seed;
        if (threads_opt->count() > 0) cfg.threads = threads;
        cfg.validate();

        if (*synth_cmd) {
            synth.seed = cfg.seed;
            synth.threads = cfg.threads;
            if (crease_opt->count() > 0) synth.crease_count = crease_count;
            fpkit::cmd_synth(synth);
        } else if (*ingest_cmd) {
            fpkit::cmd_ingest(ingest);
        } else if (*extract_cmd) {
            extract.params = cfg.extract;
            extract.threads = cfg.threads;
            fpkit::cmd_extract(extract);
        } else if (*match_cmd) {
            match.params = cfg.matcher;
            match.threads = cfg.threads;
            fpkit::cmd_match(match);
        } else if (*eval_cmd) {
            if (far_opt->count() > 0) cfg.eval_target_far = target_far;
            if (pp_opt->count() > 0) cfg.eval_per_print = per_print;
            cfg.validate();
            eval.cfg = cfg;
            fpkit::cmd_eval_uniqueness(eval);
        } else if (*metrics_cmd) {
            metrics.cfg = cfg;
            fpkit::cmd_metrics(metrics);
        } else if (*fid_cmd) {
            fpkit::cmd_fid(feat_a, feat_b);
        }
    } catch (const fpkit::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
