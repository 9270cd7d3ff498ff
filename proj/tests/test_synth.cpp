#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "doctest.h"

#include "burst/detect.hpp"
#include "burst/pipeline.hpp"
#include "burst/synth.hpp"

using namespace burst;
using synth::BurstKind;
using synth::SplitMix64;
using synth::SynthSpec;

namespace {

SynthSpec flat_spec(std::size_t n_bins, double mean, std::uint64_t seed) {
    SynthSpec spec;
    spec.keyword = "flat";
    spec.n_bins = n_bins;
    spec.baseline_mean = mean;
    spec.seed = seed;
    return spec;
}

}  // namespace

TEST_CASE("uniform draws stay inside the half-open unit interval") {
    SplitMix64 rng(42);
    for (int i = 0; i < 10000; ++i) {
        double u = rng.uniform01();
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
}

TEST_CASE("baseline counts match the requested poisson moments") {
    synth::Generated gen = synth::generate(flat_spec(10000, 5.0, 0xfeedull));
    double mean = 0.0;
    for (double v : gen.series.values) mean += v;
    mean /= 10000.0;
    double var = 0.0;
    for (double v : gen.series.values) var += (v - mean) * (v - mean);
    var /= 10000.0;
    CHECK(std::fabs(mean - 5.0) < 0.2);
    CHECK(std::fabs(var - 5.0) < 0.5);
    CHECK(gen.truth.empty());
    CHECK(gen.series.raw);
}

TEST_CASE("generation is reproducible from the seed alone") {
    SynthSpec spec = flat_spec(500, 3.0, 0xabcdull);
    spec.bursts.push_back({BurstKind::PulseExo, 100, 4, 50.0});
    synth::Generated a = synth::generate(spec);
    synth::Generated b = synth::generate(spec);
    CHECK(a.series.values == b.series.values);

    spec.seed = 0xabceull;
    synth::Generated c = synth::generate(spec);
    CHECK(a.series.values != c.series.values);
}

TEST_CASE("burst shapes ride on top of the baseline") {
    SynthSpec spec = flat_spec(300, 2.0, 7);
    spec.bursts.push_back({BurstKind::PulseExo, 60, 5, 80.0});
    spec.bursts.push_back({BurstKind::BumpEndo, 150, 11, 40.0});
    synth::Generated gen = synth::generate(spec);
    REQUIRE(gen.truth.size() == 2);
    CHECK(gen.truth[0].kind == BurstKind::PulseExo);
    CHECK(gen.truth[0].start == 60);
    CHECK(gen.truth[0].end == 65);
    CHECK(gen.truth[1].kind == BurstKind::BumpEndo);
    CHECK(gen.truth[1].end == 161);
    // spike bin carries the full height above whatever noise drew
    CHECK(gen.series.values[60] >= 80.0);
    // triangle apex sits mid-bump
    CHECK(gen.series.values[155] >= 40.0);
    CHECK(gen.series.values[150] < 40.0);
}

TEST_CASE("the noise scale multiplies the local mean") {
    SynthSpec spec = flat_spec(4000, 10.0, 0x77ull);
    spec.noise_scale = {{0, 1.0}, {2000, 3.0}};
    CHECK(spec.scale_at(0) == 1.0);
    CHECK(spec.scale_at(1999) == 1.0);
    CHECK(spec.scale_at(2000) == 3.0);
    CHECK(spec.scale_at(3999) == 3.0);
    synth::Generated gen = synth::generate(spec);
    double low = 0.0, high = 0.0;
    for (std::size_t i = 0; i < 2000; ++i) low += gen.series.values[i];
    for (std::size_t i = 2000; i < 4000; ++i) high += gen.series.values[i];
    CHECK(std::fabs(low / 2000.0 - 10.0) < 0.5);
    CHECK(std::fabs(high / 2000.0 - 30.0) < 1.0);
}

TEST_CASE("specifications reject inconsistent inputs") {
    CHECK_THROWS_AS(flat_spec(0, 1.0, 1).validate(), std::invalid_argument);
    CHECK_THROWS_AS(flat_spec(10, 0.0, 1).validate(), std::invalid_argument);

    SynthSpec narrow = flat_spec(100, 1.0, 1);
    narrow.bursts.push_back({BurstKind::BumpEndo, 10, 9, 5.0});  // bumps need width >= 10
    CHECK_THROWS_AS(narrow.validate(), std::invalid_argument);

    SynthSpec overlap = flat_spec(100, 1.0, 1);
    overlap.bursts.push_back({BurstKind::PulseExo, 10, 6, 5.0});
    overlap.bursts.push_back({BurstKind::PulseExo, 14, 6, 5.0});
    CHECK_THROWS_AS(overlap.validate(), std::invalid_argument);

    SynthSpec out_of_range = flat_spec(100, 1.0, 1);
    out_of_range.bursts.push_back({BurstKind::PulseExo, 98, 6, 5.0});
    CHECK_THROWS_AS(out_of_range.validate(), std::invalid_argument);

    SynthSpec bad_height = flat_spec(100, 1.0, 1);
    bad_height.bursts.push_back({BurstKind::PulseExo, 10, 2, 0.0});
    CHECK_THROWS_AS(bad_height.validate(), std::invalid_argument);

    SynthSpec bad_scale = flat_spec(100, 1.0, 1);
    bad_scale.noise_scale = {{50, 1.0}, {20, 2.0}};  // not ascending
    CHECK_THROWS_AS(bad_scale.validate(), std::invalid_argument);
}

TEST_CASE("a lone spike keeps most of its peak through narrow smoothing") {
    // With a half-bin sigma the kernel keeps ~79% of the spike in place, so
    // the detected burst is peak-dominated.
    SynthSpec spec = flat_spec(200, 2.0, 0x1234ull);
    spec.bursts.push_back({BurstKind::PulseExo, 100, 1, 100.0});
    synth::Generated gen = synth::generate(spec);

    PipelineConfig config;
    config.smooth_sigma = 300.0;  // seconds; bins are 600 s wide
    KeywordReport report = process_keyword(gen.series, config);
    REQUIRE(report.pairs.size() == 1);
    CHECK(report.pairs[0].peak_ratio >= 0.5);
}

TEST_CASE("exhaustive search on a single bin is the cheapest emission") {
    DetectorParams params;
    std::vector<double> values{7.0};
    int top = level_cap(values, 3.0, params);
    CostModel model(3.0, 1, params, top);
    double best = model.emission(0, 7.0);
    for (int l = 1; l <= top; ++l) best = std::min(best, model.emission(l, 7.0));
    synth::OraclePath path = synth::oracle_viterbi(values, 3.0, params, top);
    CHECK(path.cost == best);
    REQUIRE(path.levels.size() == 1);
    CHECK(annotate(values, 3.0, params).path_cost == path.cost);
}

TEST_CASE("exhaustive search keeps a constant series at level zero") {
    std::vector<double> values(12, 4.0);
    DetectorParams params;
    int top = level_cap(values, 4.0, params);
    synth::OraclePath path = synth::oracle_viterbi(values, 4.0, params, top);
    for (int level : path.levels) CHECK(level == 0);
    BurstAnnotation a = annotate(values, 4.0, params);
    CHECK(a.path_cost == path.cost);
}

TEST_CASE("dynamic programming equals exhaustive search on random series") {
    SplitMix64 rng(0x0c0ffee5ull);
    DetectorParams params;
    params.max_level = 3;
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t len = 2 + rng.next() % 9;
        FrequencySeries series;
        series.keyword = "t";
        bool any = false;
        for (std::size_t i = 0; i < len; ++i) {
            double v = static_cast<double>(rng.next() % 15);
            any = any || v > 0.0;
            series.values.push_back(v);
        }
        if (!any) series.values[0] = 2.0;
        double base = mean_rate(series);
        int top = level_cap(series.values, base, params);
        synth::OraclePath oracle = synth::oracle_viterbi(series, params, top);
        CHECK(detect(series, params).path_cost == oracle.cost);
    }
}

TEST_CASE("oversized search spaces are refused") {
    std::vector<double> values(40, 1.0);
    DetectorParams params;
    CHECK_THROWS_AS(synth::oracle_viterbi(values, 1.0, params, 3), std::invalid_argument);
}

TEST_CASE("pairwise auc counts wins and half-ties") {
    CHECK(synth::oracle_auc({0.1}, {0.9}) == 1.0);
    CHECK(synth::oracle_auc({0.5}, {0.5}) == 0.5);
    CHECK(synth::oracle_auc({0.1, 0.9}, {0.5}) == 0.5);
    CHECK_THROWS_AS(synth::oracle_auc({}, {0.5}), RocError);
    CHECK_THROWS_AS(synth::oracle_auc({0.5}, {}), RocError);
}

TEST_CASE("trapezoid area equals the pairwise count on random score sets") {
    SplitMix64 rng(0x5eedaaccull);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<EpisodePair> pairs;
        std::vector<double> endo, exo;
        std::size_t n_endo = 2 + rng.next() % 20;
        std::size_t n_exo = 2 + rng.next() % 20;
        bool with_ties = trial % 2 == 0;
        auto draw = [&]() {
            double f = rng.uniform01();
            return with_ties ? std::floor(f * 8.0) / 8.0 + 0.0625 : f;
        };
        for (std::size_t i = 0; i < n_endo; ++i) {
            endo.push_back(draw());
            EpisodePair p;
            p.fluct = endo.back();
            p.label = Label::Endogenous;
            pairs.push_back(p);
        }
        for (std::size_t i = 0; i < n_exo; ++i) {
            exo.push_back(draw());
            EpisodePair p;
            p.fluct = exo.back();
            p.label = Label::Exogenous;
            pairs.push_back(p);
        }
        double area = roc_curve(pairs).auc;
        double pairwise = synth::oracle_auc(endo, exo);
        CHECK(std::fabs(area - pairwise) < 1e-9);
    }
}

TEST_CASE("corpus files resolve per-keyword seeds deterministically") {
    namespace fs = std::filesystem;
    fs::path path = fs::temp_directory_path() / "burst_synth_corpus_test.json";
    {
        std::ofstream out(path);
        out << R"({"seed": 7, "keywords": [)"
            << R"({"keyword": "a", "n_bins": 100, "baseline_mean": 2.0,)"
            << R"( "bursts": [{"kind": "pulse_exo", "start": 50, "width": 1, "height": 10.0}]},)"
            << R"({"keyword": "b", "n_bins": 50, "baseline_mean": 1.0, "seed": 99, "bursts": [],)"
            << R"( "noise_scale": [{"start": 0, "scale": 2.0}]}]})" "\n";
    }
    synth::SynthCorpus corpus = synth::load_synth_corpus(path);
    fs::remove(path);

    CHECK(corpus.seed == 7);
    REQUIRE(corpus.keywords.size() == 2);
    SplitMix64 seeder(7);
    CHECK(corpus.keywords[0].seed == seeder.next());
    CHECK(corpus.keywords[0].keyword == "a");
    REQUIRE(corpus.keywords[0].bursts.size() == 1);
    CHECK(corpus.keywords[0].bursts[0].kind == BurstKind::PulseExo);
    CHECK(corpus.keywords[1].seed == 99);  // explicit seed wins
    REQUIRE(corpus.keywords[1].noise_scale.size() == 1);
    CHECK(corpus.keywords[1].noise_scale[0].scale == 2.0);
}

TEST_CASE("burst kinds round-trip through their names") {
    CHECK(synth::to_string(BurstKind::PulseExo) == "pulse_exo");
    CHECK(synth::to_string(BurstKind::BumpEndo) == "bump_endo");
    CHECK(synth::burst_kind_from_string("pulse_exo") == BurstKind::PulseExo);
    CHECK(synth::burst_kind_from_string("bump_endo") == BurstKind::BumpEndo);
    CHECK_THROWS_AS(synth::burst_kind_from_string("square"), std::invalid_argument);
}
