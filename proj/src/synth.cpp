#include "burst/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace burst::synth {

double SplitMix64::uniform01() {
    // (next() >> 11) is uniform on [0, 2^53); +1 shifts to (0, 2^53].
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
}

double SplitMix64::exponential() { return -std::log(uniform01()); }

std::uint64_t SplitMix64::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw std::invalid_argument("poisson: mean must be finite and non-negative");
    }
    if (mean == 0.0) {
        return 0;
    }
    std::uint64_t count = 0;
    double arrival = exponential();
    while (arrival <= mean) {
        ++count;
        arrival += exponential();
    }
    return count;
}

std::string to_string(BurstKind kind) {
    return kind == BurstKind::PulseExo ? "pulse_exo" : "bump_endo";
}

BurstKind burst_kind_from_string(const std::string& text) {
    if (text == "pulse_exo") {
        return BurstKind::PulseExo;
    }
    if (text == "bump_endo") {
        return BurstKind::BumpEndo;
    }
    throw std::invalid_argument("unknown burst kind: " + text);
}

void SynthSpec::validate() const {
    if (keyword.empty()) {
        throw std::invalid_argument("synth spec: keyword must not be empty");
    }
    if (n_bins == 0) {
        throw std::invalid_argument("synth spec: n_bins must be positive");
    }
    if (!(baseline_mean > 0.0) || !std::isfinite(baseline_mean)) {
        throw std::invalid_argument("synth spec: baseline_mean must be positive");
    }
    std::size_t prev_start = 0;
    for (std::size_t i = 0; i < noise_scale.size(); ++i) {
        const ScaleStep& step = noise_scale[i];
        if (!(step.scale > 0.0) || !std::isfinite(step.scale)) {
            throw std::invalid_argument("synth spec: noise scale must be positive");
        }
        if (step.start >= n_bins) {
            throw std::invalid_argument("synth spec: noise scale step starts past the series");
        }
        if (i > 0 && step.start <= prev_start) {
            throw std::invalid_argument("synth spec: noise scale steps must be strictly increasing");
        }
        prev_start = step.start;
    }
    std::vector<BurstSpec> ordered = bursts;
    std::sort(ordered.begin(), ordered.end(),
              [](const BurstSpec& a, const BurstSpec& b) { return a.start < b.start; });
    std::size_t prev_end = 0;
    for (const BurstSpec& burst : ordered) {
        if (burst.width == 0) {
            throw std::invalid_argument("synth spec: burst width must be positive");
        }
        if (burst.kind == BurstKind::BumpEndo && burst.width < 10) {
            throw std::invalid_argument("synth spec: bump width must be at least 10 bins");
        }
        if (!(burst.height > 0.0) || !std::isfinite(burst.height)) {
            throw std::invalid_argument("synth spec: burst height must be positive");
        }
        if (burst.start + burst.width > n_bins) {
            throw std::invalid_argument("synth spec: burst extends past the series");
        }
        if (burst.start < prev_end) {
            throw std::invalid_argument("synth spec: bursts must not overlap");
        }
        prev_end = burst.start + burst.width;
    }
}

double SynthSpec::scale_at(std::size_t bin) const {
    double scale = 1.0;
    for (const ScaleStep& step : noise_scale) {
        if (step.start > bin) {
            break;
        }
        scale = step.scale;
    }
    return scale;
}

namespace {

double shape_value(const BurstSpec& burst, std::size_t offset) {
    if (burst.kind == BurstKind::PulseExo) {
        return burst.height * std::exp(-static_cast<double>(offset) / 1.5);
    }
    const double center = (static_cast<double>(burst.width) - 1.0) / 2.0;
    const double half = static_cast<double>(burst.width) / 2.0;
    const double dist = std::abs(static_cast<double>(offset) - center);
    return burst.height * (1.0 - dist / half);
}

}  // namespace

Generated generate(const SynthSpec& spec) {
    spec.validate();
    Generated out;
    out.series.keyword = spec.keyword;
    out.series.start_time = 0;
    out.series.raw = true;
    out.series.values.resize(spec.n_bins, 0.0);

    SplitMix64 rng(spec.seed);
    for (std::size_t t = 0; t < spec.n_bins; ++t) {
        const double mean = spec.baseline_mean * spec.scale_at(t);
        out.series.values[t] = static_cast<double>(rng.poisson(mean));
    }
    for (const BurstSpec& burst : spec.bursts) {
        for (std::size_t k = 0; k < burst.width; ++k) {
            out.series.values[burst.start + k] += shape_value(burst, k);
        }
        out.truth.push_back({burst.kind, burst.start, burst.start + burst.width, burst.height});
    }
    std::sort(out.truth.begin(), out.truth.end(),
              [](const TruthInterval& a, const TruthInterval& b) { return a.start < b.start; });
    return out;
}

namespace {

struct OracleSearch {
    const CostModel& model;
    const std::vector<double>& values;
    int top_level;
    double best_cost = 0.0;
    std::vector<int> best_path;
    std::vector<int> path;
    bool found = false;

    // Accumulates exactly like the detector sweep: the running cost picks up
    // the transition first, then the emission, one fma-free add at a time.
    void walk(std::size_t t, int prev_level, double acc) {
        if (t == values.size()) {
            if (!found || acc < best_cost) {
                best_cost = acc;
                best_path = path;
                found = true;
            }
            return;
        }
        for (int level = 0; level <= top_level; ++level) {
            double with_transition = acc;
            if (t > 0) {
                with_transition = acc + model.transition(prev_level, level);
            }
            const double cost = with_transition + model.emission(level, values[t]);
            path[t] = level;
            walk(t + 1, level, cost);
        }
    }
};

}  // namespace

OraclePath oracle_viterbi(const std::vector<double>& values, double base_rate,
                          const DetectorParams& params, int top_level) {
    if (values.empty()) {
        throw std::invalid_argument("oracle_viterbi: series must not be empty");
    }
    if (top_level < 0) {
        throw std::invalid_argument("oracle_viterbi: top level must be non-negative");
    }
    double paths = 1.0;
    for (std::size_t i = 0; i < values.size() && paths <= 1e8; ++i) {
        paths *= static_cast<double>(top_level + 1);
    }
    if (paths > 1e8) {
        throw std::invalid_argument("oracle_viterbi: search space exceeds 1e8 paths");
    }

    CostModel model(base_rate, values.size(), params, top_level);
    OracleSearch search{model, values, top_level, 0.0, {}, {}, false};
    search.path.resize(values.size(), 0);
    search.walk(0, 0, 0.0);
    return {search.best_cost, search.best_path};
}

OraclePath oracle_viterbi(const FrequencySeries& series, const DetectorParams& params,
                          int top_level) {
    return oracle_viterbi(series.values, mean_rate(series), params, top_level);
}

double oracle_auc(const std::vector<double>& endo_flucts, const std::vector<double>& exo_flucts) {
    if (endo_flucts.empty() || exo_flucts.empty()) {
        throw RocError("oracle_auc: both classes must be present");
    }
    double wins = 0.0;
    for (double e : endo_flucts) {
        for (double x : exo_flucts) {
            if (e < x) {
                wins += 1.0;
            } else if (e == x) {
                wins += 0.5;
            }
        }
    }
    return wins / (static_cast<double>(endo_flucts.size()) * static_cast<double>(exo_flucts.size()));
}

SynthCorpus load_synth_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open synth spec: " + path.string());
    }
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw IoError("synth spec is not a JSON object: " + path.string());
    }

    SynthCorpus corpus;
    corpus.seed = doc.value("seed", std::uint64_t{0});
    SplitMix64 seeder(corpus.seed);
    if (!doc.contains("keywords") || !doc["keywords"].is_array()) {
        throw IoError("synth spec: missing keywords array");
    }
    for (const nlohmann::json& entry : doc["keywords"]) {
        SynthSpec spec;
        spec.keyword = entry.value("keyword", std::string{});
        spec.n_bins = entry.value("n_bins", std::size_t{0});
        spec.baseline_mean = entry.value("baseline_mean", 1.0);
        if (entry.contains("noise_scale")) {
            for (const nlohmann::json& step : entry["noise_scale"]) {
                spec.noise_scale.push_back(
                    {step.value("start", std::size_t{0}), step.value("scale", 1.0)});
            }
        }
        if (entry.contains("bursts")) {
            for (const nlohmann::json& burst : entry["bursts"]) {
                BurstSpec b;
                b.kind = burst_kind_from_string(burst.value("kind", std::string{"pulse_exo"}));
                b.start = burst.value("start", std::size_t{0});
                b.width = burst.value("width", std::size_t{1});
                b.height = burst.value("height", 1.0);
                spec.bursts.push_back(b);
            }
        }
        const std::uint64_t drawn = seeder.next();
        spec.seed = entry.contains("seed") ? entry["seed"].get<std::uint64_t>() : drawn;
        spec.validate();
        corpus.keywords.push_back(std::move(spec));
    }
    return corpus;
}

}  // namespace burst::synth
