#include <cmath>
#include <vector>

#include "doctest.h"

#include "burst/features.hpp"
#include "burst/synth.hpp"

using namespace burst;

namespace {

FrequencySeries series_of(std::vector<double> values) {
    FrequencySeries s;
    s.keyword = "k";
    s.values = std::move(values);
    return s;
}

Segment base(std::size_t a, std::size_t b) { return Segment{SegmentKind::Baseline, a, b}; }
Segment burst_seg(std::size_t a, std::size_t b) { return Segment{SegmentKind::Burst, a, b}; }

}  // namespace

TEST_CASE("baseline stats use the population deviation") {
    FrequencySeries s = series_of({2, 2, 2, 1, 2, 3, 0, 4});
    BaselineStats flat = baseline_stats(s, base(0, 3));
    CHECK(flat.sigma == 0.0);
    CHECK(flat.e_mean == 2.0);

    BaselineStats ramp = baseline_stats(s, base(3, 6));
    CHECK(ramp.sigma == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
    CHECK(ramp.e_mean == 2.0);

    BaselineStats wide = baseline_stats(s, base(6, 8));
    CHECK(wide.sigma == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(wide.e_mean == 2.0);
}

TEST_CASE("burst stats sum and peak over the segment") {
    FrequencySeries s = series_of({7, 1, 3, 1, 2, 2, 2, 2});
    BurstStats one = burst_stats(s, burst_seg(0, 1));
    CHECK(one.size == 7.0);
    CHECK(one.peak == 7.0);

    BurstStats mid = burst_stats(s, burst_seg(1, 4));
    CHECK(mid.size == 5.0);
    CHECK(mid.peak == 3.0);

    BurstStats flat = burst_stats(s, burst_seg(4, 8));
    CHECK(flat.size == 8.0);
    CHECK(flat.peak == 2.0);
    CHECK(flat.peak / flat.size == doctest::Approx(0.25));
}

TEST_CASE("episode ratios derive from baseline and burst stats") {
    FrequencySeries s = series_of({2, 2, 8});
    PairBuild b = build_pairs(s, {{base(0, 2), burst_seg(2, 3)}});
    REQUIRE(b.pairs.size() == 1);
    const EpisodePair& p = b.pairs[0];
    CHECK(p.fluct == 0.0);
    CHECK(p.scaled_size == doctest::Approx(4.0));
    CHECK(p.peak_ratio == doctest::Approx(1.0));
    CHECK(p.response == doctest::Approx(4.0));
    CHECK(p.sigma == 0.0);
    CHECK(p.e_mean == 2.0);
    CHECK(p.size == 8.0);
    CHECK(p.peak == 8.0);
    CHECK(b.excluded == 0);
}

TEST_CASE("episodes without a normalizable baseline are dropped") {
    FrequencySeries s = series_of({0, 0, 5, 1, 1, 3});
    PairBuild b = build_pairs(s, {
        {base(0, 2), burst_seg(2, 3)},  // zero baseline mean
        {base(3, 5), burst_seg(5, 6)},
    });
    REQUIRE(b.pairs.size() == 1);
    CHECK(b.excluded == 1);
    // the surviving pair keeps its episode ordinal
    CHECK(b.pairs[0].index == 1);
    CHECK(b.pairs[0].e_mean == 1.0);
}

TEST_CASE("zero-size bursts cannot be normalized either") {
    FrequencySeries s = series_of({1, 1, 0});
    PairBuild b = build_pairs(s, {{base(0, 2), burst_seg(2, 3)}});
    CHECK(b.pairs.empty());
    CHECK(b.excluded == 1);
}

TEST_CASE("peak ratio stays between one over length and one") {
    synth::SplitMix64 rng(0x5eedfea1ull);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t len = 1 + rng.next() % 12;
        std::vector<double> values{1.0, 1.0};
        for (std::size_t i = 0; i < len; ++i) {
            values.push_back(1.0 + static_cast<double>(rng.next() % 50));
        }
        PairBuild b = build_pairs(series_of(values), {{base(0, 2), burst_seg(2, 2 + len)}});
        REQUIRE(b.pairs.size() == 1);
        CHECK(b.pairs[0].peak_ratio >= 1.0 / static_cast<double>(len) - 1e-12);
        CHECK(b.pairs[0].peak_ratio <= 1.0 + 1e-12);
    }
}

TEST_CASE("two-pass deviation matches the one-pass formula on tame data") {
    synth::SplitMix64 rng(0x5eedfea2ull);
    std::vector<double> values;
    for (int i = 0; i < 200; ++i) values.push_back(10.0 + rng.uniform01());
    FrequencySeries s = series_of(values);
    BaselineStats st = baseline_stats(s, base(0, values.size()));

    double sum = 0.0, sumsq = 0.0;
    for (double v : values) {
        sum += v;
        sumsq += v * v;
    }
    double n = static_cast<double>(values.size());
    double one_pass = std::sqrt(sumsq / n - (sum / n) * (sum / n));
    CHECK(st.sigma == doctest::Approx(one_pass).epsilon(1e-12));
}

TEST_CASE("dimensionless ratios are invariant under count rescaling") {
    std::vector<double> values{3, 4, 5, 3, 20, 26, 4, 3};
    std::vector<SegmentPair> episodes{{base(0, 4), burst_seg(4, 6)}};
    PairBuild b1 = build_pairs(series_of(values), episodes);
    std::vector<double> scaled;
    for (double v : values) scaled.push_back(v * 7.5);
    PairBuild b2 = build_pairs(series_of(scaled), episodes);
    REQUIRE(b1.pairs.size() == 1);
    REQUIRE(b2.pairs.size() == 1);
    CHECK(b2.pairs[0].fluct == doctest::Approx(b1.pairs[0].fluct).epsilon(1e-12));
    CHECK(b2.pairs[0].scaled_size == doctest::Approx(b1.pairs[0].scaled_size).epsilon(1e-12));
    CHECK(b2.pairs[0].peak_ratio == doctest::Approx(b1.pairs[0].peak_ratio).epsilon(1e-12));
    CHECK(b2.pairs[0].response == doctest::Approx(b1.pairs[0].response).epsilon(1e-12));
    // the raw statistics scale linearly
    CHECK(b2.pairs[0].size == doctest::Approx(b1.pairs[0].size * 7.5));
    CHECK(b2.pairs[0].peak == doctest::Approx(b1.pairs[0].peak * 7.5));
}
