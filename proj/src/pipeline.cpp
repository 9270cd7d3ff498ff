#include "burst/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "burst/csv.hpp"
#include "burst/features.hpp"
#include "burst/ingest.hpp"

namespace burst {

namespace fs = std::filesystem;

void PipelineConfig::validate() const {
    if (bin_width <= 0) throw std::invalid_argument("config: bin_width must be positive");
    if (!(smooth_sigma > 0.0)) throw std::invalid_argument("config: smooth_sigma must be positive");
    if (!(s > 1.0)) throw std::invalid_argument("config: s must exceed 1");
    if (!(gamma > 0.0)) throw std::invalid_argument("config: gamma must be positive");
    if (!(r2_min > 0.0 && r2_min < 1.0)) {
        throw std::invalid_argument("config: r2_min must lie in (0,1)");
    }
    if (min_ccdf_points == 0) {
        throw std::invalid_argument("config: min_ccdf_points must be positive");
    }
    if (fpr_grid < 2) throw std::invalid_argument("config: fpr_grid needs at least 2 points");
    if (top_k && *top_k == 0) throw std::invalid_argument("config: top_k must be positive");
}

DetectorParams PipelineConfig::detector() const {
    DetectorParams params;
    params.s = s;
    params.gamma = gamma;
    return params;
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw IoError("config is not a JSON object: " + path.string());
    }
    PipelineConfig config;
    for (const auto& [key, value] : doc.items()) {
        if (key == "bin_width") config.bin_width = value.get<std::int64_t>();
        else if (key == "smooth_sigma") config.smooth_sigma = value.get<double>();
        else if (key == "s") config.s = value.get<double>();
        else if (key == "gamma") config.gamma = value.get<double>();
        else if (key == "r2_min") config.r2_min = value.get<double>();
        else if (key == "min_ccdf_points") config.min_ccdf_points = value.get<std::size_t>();
        else if (key == "fpr_grid") config.fpr_grid = value.get<std::size_t>();
        else if (key == "top_k") config.top_k = value.get<std::size_t>();
        else throw IoError("config: unknown field '" + key + "' in " + path.string());
    }
    config.validate();
    return config;
}

KeywordReport process_keyword(const FrequencySeries& raw, const PipelineConfig& config) {
    config.validate();
    KeywordReport report;
    report.keyword = raw.keyword;
    report.raw = raw;
    if (raw.raw) {
        report.smoothed = gaussian_smooth(raw, config.smooth_sigma);
        for (double& v : report.smoothed.values) v = quantize_g9(v);
    } else {
        report.smoothed = raw;
    }
    report.annotation = detect(report.smoothed, config.detector());

    PairBuild build = build_pairs(report.smoothed, pair_episodes(report.annotation));
    report.pairs = std::move(build.pairs);
    report.pairs_excluded = build.excluded;
    for (EpisodePair& p : report.pairs) {
        p.sigma = quantize_g9(p.sigma);
        p.e_mean = quantize_g9(p.e_mean);
        p.size = quantize_g9(p.size);
        p.peak = quantize_g9(p.peak);
        p.peak_ratio = quantize_g9(p.peak_ratio);
        p.scaled_size = quantize_g9(p.scaled_size);
        p.fluct = quantize_g9(p.fluct);
        p.response = quantize_g9(p.response);
    }
    for (double v : raw.values) report.total_frequency += v;

    try {
        SeparatorFit fit;
        fit.alpha_sep = fit_separator(report.pairs);
        fit.n_points = usable_pairs(report.pairs).size();
        label_pairs(report.pairs, fit.alpha_sep);
        try {
            FreeFit free = fit_beta(report.pairs);
            fit.beta = free.beta;
            fit.alpha_free = free.alpha_free;
            if (!(free.beta > 0.0 && free.beta <= 1.0)) {
                report.notes.push_back("beta outside (0,1]: " + format_g9(free.beta));
            }
        } catch (const FitError& e) {
            fit.beta = std::numeric_limits<double>::quiet_NaN();
            fit.alpha_free = std::numeric_limits<double>::quiet_NaN();
            report.notes.push_back(std::string("free fit: ") + e.what());
        }
        report.fit = fit;
    } catch (const FitError& e) {
        report.notes.push_back(std::string("separator: ") + e.what());
    }

    try {
        report.roc = roc_curve(report.pairs);
        report.critical = critical_threshold(report.pairs);
    } catch (const RocError& e) {
        report.notes.push_back(std::string("roc: ") + e.what());
    }

    report.dists = class_distributions(report.pairs, config.r2_min, config.min_ccdf_points);
    return report;
}

namespace {

double parse_double(const std::string& text, const fs::path& context) {
    try {
        return std::stod(text);
    } catch (const std::exception&) {
        throw IoError("bad numeric field '" + text + "' in " + context.string());
    }
}

std::size_t parse_size(const std::string& text, const fs::path& context) {
    try {
        return std::stoull(text);
    } catch (const std::exception&) {
        throw IoError("bad numeric field '" + text + "' in " + context.string());
    }
}

std::string keyword_comment(const std::string& keyword) {
    std::string encoded;
    for (char c : keyword) {
        switch (c) {
            case '%': encoded += "%25"; break;
            case '\n': encoded += "%0A"; break;
            case '\r': encoded += "%0D"; break;
            default: encoded += c;
        }
    }
    return "keyword=" + encoded;
}

std::string keyword_from_comments(const std::vector<std::string>& comments,
                                  const std::string& fallback) {
    for (const std::string& comment : comments) {
        auto at = comment.find("keyword=");
        if (at == std::string::npos) continue;
        std::string encoded = comment.substr(at + 8);
        std::string out;
        for (std::size_t i = 0; i < encoded.size(); ++i) {
            if (encoded[i] == '%' && i + 2 < encoded.size()) {
                const std::string hex = encoded.substr(i + 1, 2);
                if (hex == "25") { out += '%'; i += 2; continue; }
                if (hex == "0A") { out += '\n'; i += 2; continue; }
                if (hex == "0D") { out += '\r'; i += 2; continue; }
            }
            out += encoded[i];
        }
        return out;
    }
    return fallback;
}

double series_total(const FrequencySeries& series) {
    double total = 0.0;
    for (double v : series.values) total += v;
    return total;
}

}  // namespace

void write_levels_csv(const fs::path& path, const FrequencySeries& series,
                      const std::vector<int>& levels) {
    if (levels.size() != series.values.size()) {
        throw std::invalid_argument("levels and series lengths differ");
    }
    CsvWriter w(path);
    w.comment(keyword_comment(series.keyword));
    w.header({"bin_index", "value", "level"});
    for (std::size_t i = 0; i < levels.size(); ++i) {
        w.row({CsvWriter::field(i), CsvWriter::field(series.values[i]),
               CsvWriter::field(levels[i])});
    }
    w.commit();
}

void write_segments_csv(const fs::path& path, const std::vector<Segment>& segments) {
    CsvWriter w(path);
    w.header({"kind", "start", "end"});
    for (const Segment& seg : segments) {
        w.row({to_string(seg.kind), CsvWriter::field(seg.start), CsvWriter::field(seg.end)});
    }
    w.commit();
}

std::vector<Segment> read_segments_csv(const fs::path& path) {
    CsvTable table = read_csv(path);
    const std::size_t kind_col = table.column("kind");
    const std::size_t start_col = table.column("start");
    const std::size_t end_col = table.column("end");
    std::vector<Segment> segments;
    for (const auto& row : table.rows) {
        Segment seg;
        seg.kind = segment_kind_from_string(row.at(kind_col));
        seg.start = parse_size(row.at(start_col), path);
        seg.end = parse_size(row.at(end_col), path);
        segments.push_back(seg);
    }
    return segments;
}

void write_features_csv(const fs::path& path, const std::string& keyword,
                        const std::vector<EpisodePair>& pairs) {
    CsvWriter w(path);
    w.comment(keyword_comment(keyword));
    w.header({"i", "sigma", "e_mean", "size", "peak", "peak_ratio", "scaled_size", "fluct",
              "response"});
    for (const EpisodePair& p : pairs) {
        w.row({CsvWriter::field(p.index), CsvWriter::field(p.sigma), CsvWriter::field(p.e_mean),
               CsvWriter::field(p.size), CsvWriter::field(p.peak), CsvWriter::field(p.peak_ratio),
               CsvWriter::field(p.scaled_size), CsvWriter::field(p.fluct),
               CsvWriter::field(p.response)});
    }
    w.commit();
}

std::vector<EpisodePair> read_features_csv(const fs::path& path, std::string* keyword) {
    CsvTable table = read_csv(path);
    if (keyword) *keyword = keyword_from_comments(table.comments, path.stem().string());
    const std::size_t i_col = table.column("i");
    const std::size_t sigma_col = table.column("sigma");
    const std::size_t mean_col = table.column("e_mean");
    const std::size_t size_col = table.column("size");
    const std::size_t peak_col = table.column("peak");
    const std::size_t ratio_col = table.column("peak_ratio");
    const std::size_t scaled_col = table.column("scaled_size");
    const std::size_t fluct_col = table.column("fluct");
    const std::size_t resp_col = table.column("response");
    std::vector<EpisodePair> pairs;
    for (const auto& row : table.rows) {
        EpisodePair p;
        p.index = parse_size(row.at(i_col), path);
        p.sigma = parse_double(row.at(sigma_col), path);
        p.e_mean = parse_double(row.at(mean_col), path);
        p.size = parse_double(row.at(size_col), path);
        p.peak = parse_double(row.at(peak_col), path);
        p.peak_ratio = parse_double(row.at(ratio_col), path);
        p.scaled_size = parse_double(row.at(scaled_col), path);
        p.fluct = parse_double(row.at(fluct_col), path);
        p.response = parse_double(row.at(resp_col), path);
        pairs.push_back(p);
    }
    return pairs;
}

void write_labels_csv(const fs::path& path, const std::string& keyword,
                      const std::vector<EpisodePair>& pairs) {
    CsvWriter w(path);
    w.comment(keyword_comment(keyword));
    w.header({"i", "scaled_size", "peak_ratio", "label"});
    for (const EpisodePair& p : pairs) {
        w.row({CsvWriter::field(p.index), CsvWriter::field(p.scaled_size),
               CsvWriter::field(p.peak_ratio), to_string(p.label)});
    }
    w.commit();
}

void apply_labels_csv(const fs::path& path, std::vector<EpisodePair>& pairs) {
    CsvTable table = read_csv(path);
    const std::size_t i_col = table.column("i");
    const std::size_t label_col = table.column("label");
    std::map<std::size_t, Label> by_index;
    for (const auto& row : table.rows) {
        by_index[parse_size(row.at(i_col), path)] = label_from_string(row.at(label_col));
    }
    for (EpisodePair& p : pairs) {
        auto it = by_index.find(p.index);
        if (it != by_index.end()) p.label = it->second;
    }
}

void write_roc_csv(const fs::path& path, const std::string& keyword, const RocCurve& curve) {
    CsvWriter w(path);
    w.comment(keyword_comment(keyword));
    w.comment("auc=" + format_g9(curve.auc));
    w.header({"keyword", "threshold", "fpr", "tpr"});
    for (std::size_t i = 0; i < curve.size(); ++i) {
        w.row({CsvWriter::field(keyword), CsvWriter::field(curve.thresholds[i]),
               CsvWriter::field(curve.fpr[i]), CsvWriter::field(curve.tpr[i])});
    }
    w.commit();
}

void write_ccdf_csv(const fs::path& path, const std::vector<CcdfPoint>& points) {
    CsvWriter w(path);
    w.header({"size", "fraction"});
    for (const CcdfPoint& p : points) {
        w.row({CsvWriter::field(p.size), CsvWriter::field(p.fraction)});
    }
    w.commit();
}

namespace {

struct CorpusInput {
    std::vector<FrequencySeries> series;  // sorted by keyword
    std::size_t malformed_lines = 0;
    std::size_t skipped_events = 0;
    std::size_t skipped_files = 0;
};

void select_top_k(std::vector<FrequencySeries>& series, std::optional<std::size_t> top_k) {
    if (!top_k || series.size() <= *top_k) return;
    std::vector<std::pair<double, std::string>> ranked;
    for (const FrequencySeries& s : series) ranked.emplace_back(series_total(s), s.keyword);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::set<std::string> keep;
    for (std::size_t i = 0; i < *top_k; ++i) keep.insert(ranked[i].second);
    std::erase_if(series, [&](const FrequencySeries& s) { return !keep.contains(s.keyword); });
}

CorpusInput load_event_corpus(const fs::path& input, std::int64_t bin_width,
                              const std::vector<std::string>& filter,
                              std::optional<std::size_t> top_k) {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw IoError("ingest: cannot open input: " + input.string());
    ParseResult parsed = parse_events(in);

    CorpusInput corpus;
    corpus.malformed_lines = parsed.malformed_lines;
    const TimeSpan span = span_of(parsed.events);

    std::map<std::string, std::vector<EventRecord>> grouped;
    for (EventRecord& event : parsed.events) {
        grouped[event.keyword].push_back(std::move(event));
    }
    const std::set<std::string> wanted(filter.begin(), filter.end());
    for (const auto& [keyword, events] : grouped) {
        if (!wanted.empty() && !wanted.contains(keyword)) continue;
        BinnedSeries binned = bin_unique_users(events, keyword, bin_width, span);
        corpus.skipped_events += binned.skipped_events;
        corpus.series.push_back(std::move(binned.series));
    }
    select_top_k(corpus.series, top_k);
    return corpus;
}

CorpusInput load_series_dir(const fs::path& input, std::optional<std::size_t> top_k) {
    CorpusInput corpus;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(input)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::set<std::string> seen;
    for (const fs::path& file : files) {
        FrequencySeries series;
        try {
            series = read_series_csv(file);
        } catch (const IoError&) {
            ++corpus.skipped_files;  // not a series file (e.g. truth.csv)
            continue;
        }
        if (!seen.insert(series.keyword).second) {
            throw IoError("ingest: duplicate keyword '" + series.keyword + "' in " +
                          input.string());
        }
        corpus.series.push_back(std::move(series));
    }
    std::sort(corpus.series.begin(), corpus.series.end(),
              [](const FrequencySeries& a, const FrequencySeries& b) {
                  return a.keyword < b.keyword;
              });
    select_top_k(corpus.series, top_k);
    return corpus;
}

struct KeywordOutcome {
    std::optional<KeywordReport> report;
    std::string degenerate_reason;
};

std::vector<KeywordOutcome> process_corpus(const std::vector<FrequencySeries>& series,
                                           const PipelineConfig& config, std::size_t jobs) {
    std::vector<KeywordOutcome> outcomes(series.size());
    std::atomic<std::size_t> cursor{0};
    std::mutex fatal_mutex;
    std::string fatal;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= series.size()) return;
            try {
                outcomes[i].report = process_keyword(series[i], config);
            } catch (const DegenerateSeriesError& e) {
                outcomes[i].degenerate_reason = e.what();
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(fatal_mutex);
                if (fatal.empty()) {
                    fatal = "keyword '" + series[i].keyword + "': " + e.what();
                }
                return;
            }
        }
    };

    const std::size_t n_workers = std::max<std::size_t>(1, std::min(jobs, series.size()));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t i = 0; i < n_workers; ++i) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }
    if (!fatal.empty()) throw IoError("process: " + fatal);
    return outcomes;
}

void write_keyword_dir(const fs::path& dir, const KeywordReport& report) {
    fs::create_directories(dir);
    write_series_csv(dir / "raw.csv", report.raw);
    write_series_csv(dir / "series.csv", report.smoothed);
    write_levels_csv(dir / "levels.csv", report.smoothed, report.annotation.levels);
    write_segments_csv(dir / "segments.csv", report.annotation.segments);
    write_features_csv(dir / "features.csv", report.keyword, report.pairs);
    write_labels_csv(dir / "labels.csv", report.keyword, report.pairs);
    if (report.roc) write_roc_csv(dir / "roc.csv", report.keyword, *report.roc);
    if (!report.dists.endogenous.points.empty()) {
        write_ccdf_csv(dir / "ccdf_endo.csv", report.dists.endogenous.points);
    }
    if (!report.dists.exogenous.points.empty()) {
        write_ccdf_csv(dir / "ccdf_exo.csv", report.dists.exogenous.points);
    }
}

struct ClassifySummaryRow {
    std::string keyword;
    SeparatorFit fit;
    std::size_t n_endo = 0;
    std::size_t n_exo = 0;
};

void write_classify_summary(const fs::path& path, const std::vector<ClassifySummaryRow>& rows) {
    CsvWriter w(path);
    w.header({"keyword", "beta", "alpha_free", "alpha_sep", "n_endo", "n_exo"});
    for (const ClassifySummaryRow& row : rows) {
        w.row({CsvWriter::field(row.keyword), CsvWriter::field(row.fit.beta),
               CsvWriter::field(row.fit.alpha_free), CsvWriter::field(row.fit.alpha_sep),
               CsvWriter::field(row.n_endo), CsvWriter::field(row.n_exo)});
    }
    w.commit();
}

void write_beta_rank(const fs::path& path, std::vector<KeywordBeta> entries) {
    CsvWriter w(path);
    w.header({"rank", "keyword", "beta"});
    for (const BetaRankRow& row : beta_rank_table(std::move(entries))) {
        w.row({CsvWriter::field(row.rank), CsvWriter::field(row.keyword),
               CsvWriter::field(row.beta)});
    }
    w.commit();
}

struct RocSummaryRow {
    std::string keyword;
    double auc = 0.0;
    CriticalThreshold critical;
};

void write_roc_summary(const fs::path& path, const std::vector<RocSummaryRow>& rows) {
    CsvWriter w(path);
    w.header({"keyword", "auc", "theta", "youden_j"});
    for (const RocSummaryRow& row : rows) {
        w.row({CsvWriter::field(row.keyword), CsvWriter::field(row.auc),
               CsvWriter::field(row.critical.theta), CsvWriter::field(row.critical.youden_j)});
    }
    w.commit();
}

std::optional<double> write_average_roc(const fs::path& path,
                                        const std::vector<RocCurve>& curves,
                                        std::size_t grid_points) {
    CsvWriter w(path);
    std::optional<double> auc;
    if (curves.empty()) {
        w.header({"fpr", "tpr"});
        w.commit();
        return auc;
    }
    RocCurve average = average_roc(curves, grid_points);
    auc = average.auc;
    w.comment("auc=" + format_g9(average.auc));
    w.header({"fpr", "tpr"});
    for (std::size_t i = 0; i < average.size(); ++i) {
        w.row({CsvWriter::field(average.fpr[i]), CsvWriter::field(average.tpr[i])});
    }
    w.commit();
    return auc;
}

struct FitSummaryRow {
    std::string keyword;
    Label cls = Label::Unlabeled;
    PowerLawFit fit;
};

void write_fit_summary(const fs::path& path, const std::vector<FitSummaryRow>& rows) {
    CsvWriter w(path);
    w.header({"keyword", "class", "ccdf_exponent", "pdf_exponent", "r2", "n_points", "passed"});
    for (const FitSummaryRow& row : rows) {
        w.row({CsvWriter::field(row.keyword), to_string(row.cls),
               CsvWriter::field(row.fit.ccdf_exponent), CsvWriter::field(row.fit.pdf_exponent),
               CsvWriter::field(row.fit.r2), CsvWriter::field(row.fit.n_points),
               CsvWriter::field(static_cast<int>(row.fit.passed ? 1 : 0))});
    }
    w.commit();
}

void write_exponent_histogram(const fs::path& path, const std::vector<ClassExponent>& fits,
                              double r2_min, std::size_t min_points) {
    CsvWriter w(path);
    w.header({"bin_low", "bin_high", "endo_count", "exo_count"});
    for (const HistogramRow& row : exponent_histogram(fits, r2_min, min_points)) {
        w.row({CsvWriter::field(row.bin_low), CsvWriter::field(row.bin_high),
               CsvWriter::field(row.endo_count), CsvWriter::field(row.exo_count)});
    }
    w.commit();
}

void count_classes(const std::vector<EpisodePair>& pairs, std::size_t& n_endo,
                   std::size_t& n_exo) {
    n_endo = 0;
    n_exo = 0;
    for (const EpisodePair& p : pairs) {
        if (p.label == Label::Endogenous) ++n_endo;
        if (p.label == Label::Exogenous) ++n_exo;
    }
}

nlohmann::ordered_json config_json(const PipelineConfig& config) {
    nlohmann::ordered_json j;
    j["bin_width"] = config.bin_width;
    j["smooth_sigma"] = config.smooth_sigma;
    j["s"] = config.s;
    j["gamma"] = config.gamma;
    j["r2_min"] = config.r2_min;
    j["min_ccdf_points"] = config.min_ccdf_points;
    j["fpr_grid"] = config.fpr_grid;
    if (config.top_k) {
        j["top_k"] = *config.top_k;
    } else {
        j["top_k"] = nullptr;
    }
    return j;
}

}  // namespace

RunSummary run_pipeline(const PipelineConfig& config, const fs::path& input,
                        const fs::path& outdir, std::uint64_t seed, std::size_t jobs) {
    config.validate();
    if (!fs::exists(input)) throw IoError("run: input does not exist: " + input.string());

    CorpusInput corpus = fs::is_directory(input)
                             ? load_series_dir(input, config.top_k)
                             : load_event_corpus(input, config.bin_width, {}, config.top_k);

    fs::create_directories(outdir / "keywords");

    RunSummary summary;
    summary.keywords_total = corpus.series.size();
    summary.counters.malformed_lines = corpus.malformed_lines;
    summary.counters.skipped_events = corpus.skipped_events;
    summary.counters.skipped_files = corpus.skipped_files;

    std::vector<KeywordOutcome> outcomes = process_corpus(corpus.series, config, jobs);

    std::vector<ClassifySummaryRow> classify_rows;
    std::vector<KeywordBeta> beta_entries;
    std::vector<RocSummaryRow> roc_rows;
    std::vector<RocCurve> curves;
    std::vector<FitSummaryRow> fit_rows;
    std::vector<ClassExponent> exponents;

    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const KeywordOutcome& outcome = outcomes[i];
        if (!outcome.report) {
            summary.degenerate.push_back({corpus.series[i].keyword, outcome.degenerate_reason});
            continue;
        }
        const KeywordReport& report = *outcome.report;
        ++summary.keywords_processed;
        summary.counters.pairs_total += report.pairs.size();
        summary.counters.pairs_excluded += report.pairs_excluded;
        for (const Segment& seg : report.annotation.segments) {
            if (seg.kind == SegmentKind::Burst) ++summary.counters.bursts_total;
        }

        write_keyword_dir(outdir / "keywords" / sanitize_keyword(report.keyword), report);

        if (report.fit) {
            ClassifySummaryRow row;
            row.keyword = report.keyword;
            row.fit = *report.fit;
            count_classes(report.pairs, row.n_endo, row.n_exo);
            classify_rows.push_back(row);
            if (std::isfinite(report.fit->beta)) {
                ++summary.keywords_fitted;
                beta_entries.push_back({report.keyword, report.total_frequency,
                                        report.fit->beta});
            }
        }
        if (report.roc && report.critical) {
            ++summary.keywords_with_roc;
            roc_rows.push_back({report.keyword, report.roc->auc, *report.critical});
            curves.push_back(*report.roc);
        }
        if (report.dists.endogenous.fit) {
            fit_rows.push_back({report.keyword, Label::Endogenous, *report.dists.endogenous.fit});
            exponents.push_back({Label::Endogenous, *report.dists.endogenous.fit});
        }
        if (report.dists.exogenous.fit) {
            fit_rows.push_back({report.keyword, Label::Exogenous, *report.dists.exogenous.fit});
            exponents.push_back({Label::Exogenous, *report.dists.exogenous.fit});
        }
    }

    write_classify_summary(outdir / "classify_summary.csv", classify_rows);
    write_beta_rank(outdir / "beta_rank.csv", std::move(beta_entries));
    write_roc_summary(outdir / "roc_summary.csv", roc_rows);
    summary.average_auc = write_average_roc(outdir / "average_roc.csv", curves, config.fpr_grid);
    write_fit_summary(outdir / "fit_summary.csv", fit_rows);
    write_exponent_histogram(outdir / "exponent_histogram.csv", exponents, config.r2_min,
                             config.min_ccdf_points);

    nlohmann::ordered_json manifest;
    manifest["input"] = input.string();
    manifest["seed"] = seed;
    manifest["config"] = config_json(config);
    nlohmann::ordered_json keywords;
    keywords["total"] = summary.keywords_total;
    keywords["processed"] = summary.keywords_processed;
    keywords["fitted"] = summary.keywords_fitted;
    keywords["with_roc"] = summary.keywords_with_roc;
    nlohmann::ordered_json degenerate = nlohmann::ordered_json::array();
    for (const DegenerateKeyword& d : summary.degenerate) {
        degenerate.push_back({{"keyword", d.keyword}, {"reason", d.reason}});
    }
    keywords["degenerate"] = degenerate;
    manifest["keywords"] = keywords;
    nlohmann::ordered_json counters;
    counters["malformed_lines"] = summary.counters.malformed_lines;
    counters["skipped_events"] = summary.counters.skipped_events;
    counters["skipped_files"] = summary.counters.skipped_files;
    counters["bursts_total"] = summary.counters.bursts_total;
    counters["pairs_total"] = summary.counters.pairs_total;
    counters["pairs_excluded"] = summary.counters.pairs_excluded;
    manifest["counters"] = counters;
    if (summary.average_auc) {
        manifest["average_auc"] = *summary.average_auc;
    } else {
        manifest["average_auc"] = nullptr;
    }
    write_file_atomic(outdir / "manifest.json", manifest.dump(2) + "\n");

    return summary;
}

IngestSummary stage_ingest(const fs::path& input, const fs::path& out_dir,
                           const IngestOptions& options) {
    if (options.bin_width <= 0) throw std::invalid_argument("ingest: bin_width must be positive");
    if (!(options.smooth_sigma > 0.0)) {
        throw std::invalid_argument("ingest: smooth_sigma must be positive");
    }
    CorpusInput corpus =
        load_event_corpus(input, options.bin_width, options.keywords, options.top_k);

    IngestSummary summary;
    summary.malformed_lines = corpus.malformed_lines;
    summary.skipped_events = corpus.skipped_events;
    for (const FrequencySeries& raw : corpus.series) {
        const fs::path dir = out_dir / "keywords" / sanitize_keyword(raw.keyword);
        fs::create_directories(dir);
        write_series_csv(dir / "raw.csv", raw);
        write_series_csv(dir / "series.csv", gaussian_smooth(raw, options.smooth_sigma));
        summary.keywords.push_back(raw.keyword);
    }
    return summary;
}

namespace {

struct KeywordDirEntry {
    std::string keyword;
    fs::path dir;
};

std::vector<KeywordDirEntry> list_keyword_dirs(const fs::path& run_dir) {
    const fs::path root = run_dir / "keywords";
    std::vector<KeywordDirEntry> out;
    if (!fs::is_directory(root)) return out;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        const fs::path series = entry.path() / "series.csv";
        if (!fs::exists(series)) continue;
        out.push_back({read_series_csv(series).keyword, entry.path()});
    }
    std::sort(out.begin(), out.end(), [](const KeywordDirEntry& a, const KeywordDirEntry& b) {
        if (a.keyword != b.keyword) return a.keyword < b.keyword;
        return a.dir < b.dir;
    });
    return out;
}

}  // namespace

void detect_file(const fs::path& series_path, const DetectorParams& params,
                 const fs::path& out_dir) {
    const FrequencySeries series = read_series_csv(series_path);
    const BurstAnnotation annotation = detect(series, params);
    fs::create_directories(out_dir);
    write_levels_csv(out_dir / "levels.csv", series, annotation.levels);
    write_segments_csv(out_dir / "segments.csv", annotation.segments);
}

void stage_detect(const fs::path& run_dir, const DetectorParams& params) {
    for (const KeywordDirEntry& entry : list_keyword_dirs(run_dir)) {
        try {
            detect_file(entry.dir / "series.csv", params, entry.dir);
        } catch (const DegenerateSeriesError&) {
            // all-zero keyword: leave it without detection outputs
        }
    }
}

void features_file(const fs::path& series_path, const fs::path& segments_path,
                   const fs::path& out_path) {
    const FrequencySeries series = read_series_csv(series_path);
    const std::vector<Segment> segments = read_segments_csv(segments_path);
    const PairBuild build = build_pairs(series, pair_episodes(segments));
    write_features_csv(out_path, series.keyword, build.pairs);
}

void stage_features(const fs::path& run_dir) {
    for (const KeywordDirEntry& entry : list_keyword_dirs(run_dir)) {
        if (!fs::exists(entry.dir / "segments.csv")) continue;
        features_file(entry.dir / "series.csv", entry.dir / "segments.csv",
                      entry.dir / "features.csv");
    }
}

void classify_file(const fs::path& features_path, const std::string& keyword,
                   const fs::path& labels_path, const fs::path& summary_path) {
    std::string from_file;
    std::vector<EpisodePair> pairs = read_features_csv(features_path, &from_file);
    const std::string name = keyword.empty() ? from_file : keyword;

    std::vector<ClassifySummaryRow> rows;
    try {
        SeparatorFit fit;
        fit.alpha_sep = fit_separator(pairs);
        fit.n_points = usable_pairs(pairs).size();
        label_pairs(pairs, fit.alpha_sep);
        try {
            const FreeFit free = fit_beta(pairs);
            fit.beta = free.beta;
            fit.alpha_free = free.alpha_free;
        } catch (const FitError&) {
            fit.beta = std::numeric_limits<double>::quiet_NaN();
            fit.alpha_free = std::numeric_limits<double>::quiet_NaN();
        }
        ClassifySummaryRow row;
        row.keyword = name;
        row.fit = fit;
        count_classes(pairs, row.n_endo, row.n_exo);
        rows.push_back(row);
    } catch (const FitError&) {
        // no usable pairs: labels stay unlabeled, summary stays empty
    }
    write_labels_csv(labels_path, name, pairs);
    write_classify_summary(summary_path, rows);
}

void stage_classify(const fs::path& run_dir) {
    std::vector<ClassifySummaryRow> rows;
    std::vector<KeywordBeta> beta_entries;
    for (const KeywordDirEntry& entry : list_keyword_dirs(run_dir)) {
        if (!fs::exists(entry.dir / "features.csv")) continue;
        std::vector<EpisodePair> pairs = read_features_csv(entry.dir / "features.csv");
        try {
            SeparatorFit fit;
            fit.alpha_sep = fit_separator(pairs);
            fit.n_points = usable_pairs(pairs).size();
            label_pairs(pairs, fit.alpha_sep);
            try {
                const FreeFit free = fit_beta(pairs);
                fit.beta = free.beta;
                fit.alpha_free = free.alpha_free;
            } catch (const FitError&) {
                fit.beta = std::numeric_limits<double>::quiet_NaN();
                fit.alpha_free = std::numeric_limits<double>::quiet_NaN();
            }
            ClassifySummaryRow row;
            row.keyword = entry.keyword;
            row.fit = fit;
            count_classes(pairs, row.n_endo, row.n_exo);
            rows.push_back(row);
            if (std::isfinite(fit.beta)) {
                const fs::path raw = entry.dir / "raw.csv";
                const FrequencySeries totals =
                    read_series_csv(fs::exists(raw) ? raw : entry.dir / "series.csv");
                beta_entries.push_back({entry.keyword, series_total(totals), fit.beta});
            }
        } catch (const FitError&) {
        }
        write_labels_csv(entry.dir / "labels.csv", entry.keyword, pairs);
    }
    write_classify_summary(run_dir / "classify_summary.csv", rows);
    write_beta_rank(run_dir / "beta_rank.csv", std::move(beta_entries));
}

namespace {

std::vector<EpisodePair> read_labeled_pairs(const fs::path& dir) {
    std::vector<EpisodePair> pairs = read_features_csv(dir / "features.csv");
    apply_labels_csv(dir / "labels.csv", pairs);
    return pairs;
}

}  // namespace

void stage_roc(const fs::path& run_dir, std::size_t grid_points) {
    std::vector<RocSummaryRow> rows;
    std::vector<RocCurve> curves;
    for (const KeywordDirEntry& entry : list_keyword_dirs(run_dir)) {
        if (!fs::exists(entry.dir / "features.csv") || !fs::exists(entry.dir / "labels.csv")) {
            continue;
        }
        const std::vector<EpisodePair> pairs = read_labeled_pairs(entry.dir);
        try {
            const RocCurve curve = roc_curve(pairs);
            const CriticalThreshold critical = critical_threshold(pairs);
            write_roc_csv(entry.dir / "roc.csv", entry.keyword, curve);
            rows.push_back({entry.keyword, curve.auc, critical});
            curves.push_back(curve);
        } catch (const RocError&) {
            // single-class keyword: no curve
        }
    }
    write_roc_summary(run_dir / "roc_summary.csv", rows);
    write_average_roc(run_dir / "average_roc.csv", curves, grid_points);
}

void stage_dist(const fs::path& run_dir, double r2_min, std::size_t min_points) {
    std::vector<FitSummaryRow> rows;
    std::vector<ClassExponent> exponents;
    for (const KeywordDirEntry& entry : list_keyword_dirs(run_dir)) {
        if (!fs::exists(entry.dir / "features.csv") || !fs::exists(entry.dir / "labels.csv")) {
            continue;
        }
        const std::vector<EpisodePair> pairs = read_labeled_pairs(entry.dir);
        const ClassDistributions dists = class_distributions(pairs, r2_min, min_points);
        if (!dists.endogenous.points.empty()) {
            write_ccdf_csv(entry.dir / "ccdf_endo.csv", dists.endogenous.points);
        }
        if (!dists.exogenous.points.empty()) {
            write_ccdf_csv(entry.dir / "ccdf_exo.csv", dists.exogenous.points);
        }
        if (dists.endogenous.fit) {
            rows.push_back({entry.keyword, Label::Endogenous, *dists.endogenous.fit});
            exponents.push_back({Label::Endogenous, *dists.endogenous.fit});
        }
        if (dists.exogenous.fit) {
            rows.push_back({entry.keyword, Label::Exogenous, *dists.exogenous.fit});
            exponents.push_back({Label::Exogenous, *dists.exogenous.fit});
        }
    }
    write_fit_summary(run_dir / "fit_summary.csv", rows);
    write_exponent_histogram(run_dir / "exponent_histogram.csv", exponents, r2_min, min_points);
}

namespace {

CsvTable read_required(const fs::path& path) {
    if (!fs::exists(path)) throw IoError("report: missing upstream file " + path.string());
    return read_csv(path);
}

}  // namespace

void report_figures(const fs::path& run_dir) {
    const fs::path figures = run_dir / "figures";
    fs::create_directories(figures);
    const std::vector<KeywordDirEntry> entries = list_keyword_dirs(run_dir);

    {
        CsvWriter fig3(figures / "fig3.csv");
        fig3.header({"keyword", "scaled_size", "peak_ratio"});
        CsvWriter fig5(figures / "fig5.csv");
        fig5.header({"keyword", "scaled_size", "peak_ratio", "label"});
        CsvWriter fig6(figures / "fig6.csv");
        fig6.header({"keyword", "fluct", "response", "label"});
        for (const KeywordDirEntry& entry : entries) {
            const CsvTable labels = read_required(entry.dir / "labels.csv");
            const std::size_t scaled_col = labels.column("scaled_size");
            const std::size_t ratio_col = labels.column("peak_ratio");
            const std::size_t label_col = labels.column("label");
            for (const auto& row : labels.rows) {
                fig3.row({CsvWriter::field(entry.keyword), row.at(scaled_col),
                          row.at(ratio_col)});
                fig5.row({CsvWriter::field(entry.keyword), row.at(scaled_col), row.at(ratio_col),
                          row.at(label_col)});
            }

            std::vector<EpisodePair> pairs = read_features_csv(entry.dir / "features.csv");
            apply_labels_csv(entry.dir / "labels.csv", pairs);
            for (const EpisodePair& p : pairs) {
                fig6.row({CsvWriter::field(entry.keyword), CsvWriter::field(p.fluct),
                          CsvWriter::field(p.response), to_string(p.label)});
            }
        }
        fig3.commit();
        fig5.commit();
        fig6.commit();
    }

    {
        const CsvTable ranks = read_required(run_dir / "beta_rank.csv");
        const std::size_t rank_col = ranks.column("rank");
        const std::size_t beta_col = ranks.column("beta");
        CsvWriter fig4(figures / "fig4.csv");
        fig4.header({"rank", "beta"});
        for (const auto& row : ranks.rows) {
            fig4.row({row.at(rank_col), row.at(beta_col)});
        }
        fig4.commit();
    }

    {
        CsvWriter fig7(figures / "fig7.csv");
        fig7.header({"keyword", "bin_index", "value", "level"});
        for (const KeywordDirEntry& entry : entries) {
            const CsvTable levels = read_required(entry.dir / "levels.csv");
            const std::size_t bin_col = levels.column("bin_index");
            const std::size_t value_col = levels.column("value");
            const std::size_t level_col = levels.column("level");
            for (const auto& row : levels.rows) {
                fig7.row({CsvWriter::field(entry.keyword), row.at(bin_col), row.at(value_col),
                          row.at(level_col)});
            }
        }
        fig7.commit();
    }

    {
        CsvWriter fig8(figures / "fig8.csv");
        fig8.header({"keyword", "threshold", "fpr", "tpr"});
        for (const KeywordDirEntry& entry : entries) {
            const fs::path roc = entry.dir / "roc.csv";
            if (!fs::exists(roc)) continue;  // single-class keyword
            const CsvTable table = read_csv(roc);
            const std::size_t thr_col = table.column("threshold");
            const std::size_t fpr_col = table.column("fpr");
            const std::size_t tpr_col = table.column("tpr");
            for (const auto& row : table.rows) {
                fig8.row({CsvWriter::field(entry.keyword), row.at(thr_col), row.at(fpr_col),
                          row.at(tpr_col)});
            }
        }
        const CsvTable average = read_required(run_dir / "average_roc.csv");
        if (!average.rows.empty()) {
            const std::size_t fpr_col = average.column("fpr");
            const std::size_t tpr_col = average.column("tpr");
            for (const auto& row : average.rows) {
                fig8.row({CsvWriter::field(std::string("__average__")), "nan", row.at(fpr_col),
                          row.at(tpr_col)});
            }
        }
        fig8.commit();
    }

    {
        CsvWriter fig9(figures / "fig9.csv");
        fig9.header({"keyword", "class", "size", "fraction"});
        for (const KeywordDirEntry& entry : entries) {
            for (const auto& [file, cls] :
                 {std::pair{"ccdf_endo.csv", Label::Endogenous},
                  std::pair{"ccdf_exo.csv", Label::Exogenous}}) {
                const fs::path path = entry.dir / file;
                if (!fs::exists(path)) continue;  // class absent for this keyword
                const CsvTable table = read_csv(path);
                const std::size_t size_col = table.column("size");
                const std::size_t frac_col = table.column("fraction");
                for (const auto& row : table.rows) {
                    fig9.row({CsvWriter::field(entry.keyword), to_string(cls), row.at(size_col),
                              row.at(frac_col)});
                }
            }
        }
        fig9.commit();
    }

    {
        const CsvTable hist = read_required(run_dir / "exponent_histogram.csv");
        CsvWriter fig10(figures / "fig10.csv");
        fig10.header({"bin_low", "bin_high", "endo_count", "exo_count"});
        for (const auto& row : hist.rows) {
            fig10.row(row);
        }
        fig10.commit();
    }
}

}  // namespace burst
