#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "burst/classify.hpp"
#include "burst/detect.hpp"
#include "burst/fluct_response.hpp"
#include "burst/size_dist.hpp"
#include "burst/types.hpp"

namespace burst {

struct PipelineConfig {
    std::int64_t bin_width = 600;      // seconds
    double smooth_sigma = 1800.0;      // seconds
    double s = 2.0;
    double gamma = 1.0;
    double r2_min = 0.96;
    std::size_t min_ccdf_points = 5;
    std::size_t fpr_grid = 101;
    std::optional<std::size_t> top_k;  // keep only the most frequent keywords

    void validate() const;
    DetectorParams detector() const;
};

// JSON object with fields mirroring PipelineConfig; unknown fields are
// rejected so typos do not silently fall back to defaults.
PipelineConfig load_config(const std::filesystem::path& path);

// Everything computed for one keyword. Optional pieces are absent when
// their preconditions fail (too few pairs, single-class labels); `notes`
// records each reason.
struct KeywordReport {
    std::string keyword;
    FrequencySeries raw;
    FrequencySeries smoothed;
    BurstAnnotation annotation;
    std::vector<EpisodePair> pairs;
    std::size_t pairs_excluded = 0;
    double total_frequency = 0.0;  // sum of raw counts
    std::optional<SeparatorFit> fit;  // beta is NaN when the free fit failed
    std::optional<RocCurve> roc;
    std::optional<CriticalThreshold> critical;
    ClassDistributions dists;
    std::vector<std::string> notes;
};

// Smooth, detect, pair, fit, label, curve, distribute. Throws
// DegenerateSeriesError for an all-zero series.
KeywordReport process_keyword(const FrequencySeries& raw, const PipelineConfig& config);

struct RunCounters {
    std::size_t malformed_lines = 0;
    std::size_t skipped_events = 0;
    std::size_t skipped_files = 0;  // non-series files in a series directory
    std::size_t bursts_total = 0;
    std::size_t pairs_total = 0;
    std::size_t pairs_excluded = 0;
};

struct DegenerateKeyword {
    std::string keyword;
    std::string reason;
};

struct RunSummary {
    std::size_t keywords_total = 0;
    std::size_t keywords_processed = 0;
    std::size_t keywords_fitted = 0;   // finite beta
    std::size_t keywords_with_roc = 0;
    RunCounters counters;
    std::vector<DegenerateKeyword> degenerate;
    std::optional<double> average_auc;
};

// Full run: `input` is either an event stream file or a directory of series
// CSVs. Writes keywords/<name>/{raw,series,levels,segments,features,labels,
// roc,ccdf_*}.csv, the corpus-level tables, and manifest.json under
// `outdir`. Output bytes depend only on input, config and seed.
RunSummary run_pipeline(const PipelineConfig& config, const std::filesystem::path& input,
                        const std::filesystem::path& outdir, std::uint64_t seed,
                        std::size_t jobs);

// figures/fig3.csv .. fig10.csv re-emitted from a completed run directory.
// Missing upstream files raise IoError naming the file.
void report_figures(const std::filesystem::path& run_dir);

struct IngestOptions {
    std::int64_t bin_width = 600;
    double smooth_sigma = 1800.0;
    std::vector<std::string> keywords;  // explicit selection; empty = all
    std::optional<std::size_t> top_k;
};

struct IngestSummary {
    std::vector<std::string> keywords;  // sorted, after selection
    std::size_t malformed_lines = 0;
    std::size_t skipped_events = 0;
};

// Reads an event stream and writes keywords/<name>/{raw,series}.csv under
// out_dir, raw unique-user counts and the smoothed series respectively.
IngestSummary stage_ingest(const std::filesystem::path& input,
                           const std::filesystem::path& out_dir, const IngestOptions& options);

// Per-keyword stages over an existing run directory; each reads its inputs
// from files so stages stay independently runnable.
void stage_detect(const std::filesystem::path& run_dir, const DetectorParams& params);
void stage_features(const std::filesystem::path& run_dir);
void stage_classify(const std::filesystem::path& run_dir);
void stage_roc(const std::filesystem::path& run_dir, std::size_t grid_points);
void stage_dist(const std::filesystem::path& run_dir, double r2_min, std::size_t min_points);

// Single-file variants behind the stage commands.
void detect_file(const std::filesystem::path& series_path, const DetectorParams& params,
                 const std::filesystem::path& out_dir);
void features_file(const std::filesystem::path& series_path,
                   const std::filesystem::path& segments_path,
                   const std::filesystem::path& out_path);
void classify_file(const std::filesystem::path& features_path, const std::string& keyword,
                   const std::filesystem::path& labels_path,
                   const std::filesystem::path& summary_path);

// Row-level CSV codecs shared by the stages.
void write_levels_csv(const std::filesystem::path& path, const FrequencySeries& series,
                      const std::vector<int>& levels);
void write_segments_csv(const std::filesystem::path& path, const std::vector<Segment>& segments);
std::vector<Segment> read_segments_csv(const std::filesystem::path& path);
void write_features_csv(const std::filesystem::path& path, const std::string& keyword,
                        const std::vector<EpisodePair>& pairs);
std::vector<EpisodePair> read_features_csv(const std::filesystem::path& path,
                                           std::string* keyword = nullptr);
void write_labels_csv(const std::filesystem::path& path, const std::string& keyword,
                      const std::vector<EpisodePair>& pairs);
void apply_labels_csv(const std::filesystem::path& path, std::vector<EpisodePair>& pairs);
void write_roc_csv(const std::filesystem::path& path, const std::string& keyword,
                   const RocCurve& curve);
void write_ccdf_csv(const std::filesystem::path& path, const std::vector<CcdfPoint>& points);

}  // namespace burst
