#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "burst/csv.hpp"
#include "burst/pipeline.hpp"
#include "burst/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct SynthArgs {
    std::string spec_path;
    std::string out_dir;
};

// Writes series CSVs, truth.csv and synth_manifest.json for a corpus spec.
void run_synth(const SynthArgs& args, std::uint64_t seed, bool seed_given) {
    burst::synth::SynthCorpus corpus = burst::synth::load_synth_corpus(args.spec_path);
    if (seed_given) {
        // --seed replaces the corpus seed and reseeds keywords that had none
        corpus.seed = seed;
        burst::synth::SplitMix64 seeder(seed);
        for (auto& spec : corpus.keywords) spec.seed = seeder.next();
    }

    std::vector<std::size_t> order(corpus.keywords.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return corpus.keywords[a].keyword < corpus.keywords[b].keyword;
    });

    const fs::path out(args.out_dir);
    fs::create_directories(out);
    std::set<std::string> names;
    for (std::size_t i : order) {
        const std::string name = burst::sanitize_keyword(corpus.keywords[i].keyword);
        if (!names.insert(name).second) {
            throw std::invalid_argument("synth: duplicate keyword '" +
                                        corpus.keywords[i].keyword + "'");
        }
    }

    std::vector<burst::synth::Generated> generated(corpus.keywords.size());
    for (std::size_t i = 0; i < corpus.keywords.size(); ++i) {
        generated[i] = burst::synth::generate(corpus.keywords[i]);
    }

    burst::CsvWriter truth(out / "truth.csv");
    truth.header({"keyword", "kind", "start", "end", "height"});
    nlohmann::ordered_json manifest_keywords = nlohmann::ordered_json::array();
    for (std::size_t i : order) {
        const burst::synth::SynthSpec& spec = corpus.keywords[i];
        write_series_csv(out / (burst::sanitize_keyword(spec.keyword) + ".csv"),
                         generated[i].series);
        for (const burst::synth::TruthInterval& t : generated[i].truth) {
            truth.row({burst::CsvWriter::field(spec.keyword), to_string(t.kind),
                       burst::CsvWriter::field(t.start), burst::CsvWriter::field(t.end),
                       burst::CsvWriter::field(t.height)});
        }
        manifest_keywords.push_back({{"keyword", spec.keyword},
                                     {"seed", spec.seed},
                                     {"n_bins", spec.n_bins}});
    }
    truth.commit();

    nlohmann::ordered_json manifest;
    manifest["seed"] = corpus.seed;
    manifest["keywords"] = manifest_keywords;
    burst::write_file_atomic(out / "synth_manifest.json", manifest.dump(2) + "\n");
    std::printf("synth: wrote %zu series to %s\n", corpus.keywords.size(),
                args.out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"burst detection and endogenous/exogenous analysis"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    app.add_option("--config", config_path, "JSON config file mirroring the pipeline defaults");
    auto* seed_opt = app.add_option("--seed", seed, "seed recorded in run outputs");
    app.add_option("--jobs", jobs, "worker threads for keyword-parallel stages");

    auto* ingest = app.add_subcommand("ingest", "bin an event stream into per-keyword series");
    ingest->fallthrough();
    std::string ingest_input, ingest_out;
    std::int64_t arg_bin_width = 600;
    double arg_sigma = 1800.0;
    std::vector<std::string> arg_keywords;
    std::size_t arg_top_k = 0;
    ingest->add_option("--input", ingest_input, "line-delimited event records")->required();
    ingest->add_option("--out", ingest_out, "run directory to create")->required();
    auto* bin_width_opt = ingest->add_option("--bin-width", arg_bin_width, "bin width, seconds");
    auto* sigma_opt = ingest->add_option("--smooth-sigma", arg_sigma, "kernel sigma, seconds");
    ingest->add_option("--keyword", arg_keywords, "keep only these keywords (repeatable)");
    auto* top_k_opt = ingest->add_option("--top-k", arg_top_k, "keep the top-k keywords");

    auto* detect_cmd = app.add_subcommand("detect", "annotate series with burst levels");
    detect_cmd->fallthrough();
    std::string detect_series, detect_out, detect_run, params_text;
    detect_cmd->add_option("--series", detect_series, "one series CSV");
    detect_cmd->add_option("--out", detect_out, "output directory for levels/segments CSVs");
    detect_cmd->add_option("--run", detect_run, "run directory (all keywords)");
    auto* params_opt =
        detect_cmd->add_option("--params", params_text, "detector params, e.g. s=2,gamma=1");

    auto* features_cmd = app.add_subcommand("features", "episode statistics per baseline/burst pair");
    features_cmd->fallthrough();
    std::string feat_series, feat_segments, feat_out, feat_run;
    features_cmd->add_option("--series", feat_series, "one series CSV");
    features_cmd->add_option("--segments", feat_segments, "its segments CSV");
    features_cmd->add_option("--out", feat_out, "output features CSV");
    features_cmd->add_option("--run", feat_run, "run directory (all keywords)");

    auto* classify_cmd = app.add_subcommand("classify", "fit separators and label episodes");
    classify_cmd->fallthrough();
    std::string cls_features, cls_keyword, cls_labels, cls_summary, cls_run;
    classify_cmd->add_option("--features", cls_features, "one features CSV");
    classify_cmd->add_option("--keyword", cls_keyword, "keyword name for the summary row");
    classify_cmd->add_option("--out-labels", cls_labels, "output labels CSV");
    classify_cmd->add_option("--out-summary", cls_summary, "output summary CSV");
    classify_cmd->add_option("--run", cls_run, "run directory (all keywords)");

    auto* roc_cmd = app.add_subcommand("roc", "fluctuation-threshold ROC curves");
    roc_cmd->fallthrough();
    std::string roc_run;
    std::size_t arg_grid = 101;
    roc_cmd->add_option("--run", roc_run, "run directory")->required();
    auto* grid_opt = roc_cmd->add_option("--grid", arg_grid, "points on the averaged FPR grid");

    auto* dist_cmd = app.add_subcommand("dist", "burst size distributions and power-law fits");
    dist_cmd->fallthrough();
    std::string dist_run;
    double arg_r2_min = 0.96;
    std::size_t arg_min_points = 5;
    dist_cmd->add_option("--run", dist_run, "run directory")->required();
    auto* r2_opt = dist_cmd->add_option("--r2-min", arg_r2_min, "fit acceptance threshold");
    auto* min_points_opt =
        dist_cmd->add_option("--min-points", arg_min_points, "minimum distinct sizes");

    auto* synth_cmd = app.add_subcommand("synth", "generate synthetic keyword series");
    synth_cmd->fallthrough();
    SynthArgs synth_args;
    synth_cmd->add_option("--spec", synth_args.spec_path, "JSON corpus spec")->required();
    synth_cmd->add_option("--out", synth_args.out_dir, "output directory")->required();

    auto* run_cmd = app.add_subcommand("run", "full pipeline: ingest through distributions");
    run_cmd->fallthrough();
    std::string run_input, run_out;
    run_cmd->add_option("--input", run_input, "event stream file or directory of series CSVs")
        ->required();
    run_cmd->add_option("--out", run_out, "run directory to create")->required();

    auto* report_cmd = app.add_subcommand("report", "re-emit figure data from a run directory");
    report_cmd->fallthrough();
    std::string report_run;
    report_cmd->add_option("--run", report_run, "run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        burst::PipelineConfig config;
        try {
            if (!config_path.empty()) config = burst::load_config(config_path);
        } catch (const burst::IoError& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 2;
        }

        if (ingest->parsed()) {
            burst::IngestOptions options;
            options.bin_width = bin_width_opt->count() ? arg_bin_width : config.bin_width;
            options.smooth_sigma = sigma_opt->count() ? arg_sigma : config.smooth_sigma;
            options.keywords = arg_keywords;
            if (top_k_opt->count()) {
                options.top_k = arg_top_k;
            } else {
                options.top_k = config.top_k;
            }
            burst::IngestSummary summary =
                burst::stage_ingest(ingest_input, ingest_out, options);
            std::printf("ingest: %zu keywords, %zu malformed lines, %zu skipped events\n",
                        summary.keywords.size(), summary.malformed_lines,
                        summary.skipped_events);
        } else if (detect_cmd->parsed()) {
            const burst::DetectorParams params = params_opt->count()
                                                     ? burst::parse_detector_params(params_text)
                                                     : config.detector();
            if (!detect_run.empty() == !detect_series.empty()) {
                throw std::invalid_argument("detect: provide exactly one of --series or --run");
            }
            if (!detect_series.empty()) {
                if (detect_out.empty()) {
                    throw std::invalid_argument("detect: --series requires --out");
                }
                burst::detect_file(detect_series, params, detect_out);
            } else {
                burst::stage_detect(detect_run, params);
            }
        } else if (features_cmd->parsed()) {
            if (!feat_run.empty() == !feat_series.empty()) {
                throw std::invalid_argument("features: provide exactly one of --series or --run");
            }
            if (!feat_series.empty()) {
                if (feat_segments.empty() || feat_out.empty()) {
                    throw std::invalid_argument("features: --series requires --segments and --out");
                }
                burst::features_file(feat_series, feat_segments, feat_out);
            } else {
                burst::stage_features(feat_run);
            }
        } else if (classify_cmd->parsed()) {
            if (!cls_run.empty() == !cls_features.empty()) {
                throw std::invalid_argument("classify: provide exactly one of --features or --run");
            }
            if (!cls_features.empty()) {
                if (cls_labels.empty() || cls_summary.empty()) {
                    throw std::invalid_argument(
                        "classify: --features requires --out-labels and --out-summary");
                }
                burst::classify_file(cls_features, cls_keyword, cls_labels, cls_summary);
            } else {
                burst::stage_classify(cls_run);
            }
        } else if (roc_cmd->parsed()) {
            burst::stage_roc(roc_run, grid_opt->count() ? arg_grid : config.fpr_grid);
        } else if (dist_cmd->parsed()) {
            burst::stage_dist(dist_run, r2_opt->count() ? arg_r2_min : config.r2_min,
                              min_points_opt->count() ? arg_min_points : config.min_ccdf_points);
        } else if (synth_cmd->parsed()) {
            run_synth(synth_args, seed, seed_opt->count() > 0);
        } else if (run_cmd->parsed()) {
            burst::RunSummary summary =
                burst::run_pipeline(config, run_input, run_out, seed, jobs);
            if (summary.keywords_total == 0) {
                std::fprintf(stderr, "warning: empty corpus, outputs contain headers only\n");
            }
            std::printf("run: processed %zu/%zu keywords (%zu fitted, %zu with roc)\n",
                        summary.keywords_processed, summary.keywords_total,
                        summary.keywords_fitted, summary.keywords_with_roc);
            for (const burst::DegenerateKeyword& d : summary.degenerate) {
                std::fprintf(stderr, "degenerate keyword skipped: %s (%s)\n",
                             d.keyword.c_str(), d.reason.c_str());
            }
        } else if (report_cmd->parsed()) {
            burst::report_figures(report_run);
            std::printf("report: figures written under %s/figures\n", report_run.c_str());
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
