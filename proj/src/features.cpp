#include "burst/features.hpp"

#include <algorithm>
#include <cmath>

namespace burst {

namespace {

void check_segment(const FrequencySeries& series, const Segment& segment, SegmentKind kind) {
    if (segment.kind != kind) throw std::invalid_argument("segment has the wrong kind");
    if (segment.start >= segment.end || segment.end > series.values.size())
        throw std::invalid_argument("segment out of range");
}

}  // namespace

BaselineStats baseline_stats(const FrequencySeries& series, const Segment& segment) {
    check_segment(series, segment, SegmentKind::Baseline);
    double n = static_cast<double>(segment.length());
    double mean = 0.0;
    for (std::size_t t = segment.start; t < segment.end; ++t) mean += series.values[t];
    mean /= n;
    // Two-pass form; the one-pass mean(n^2) - mean(n)^2 cancels badly when
    // the mean dominates the spread.
    double ss = 0.0;
    for (std::size_t t = segment.start; t < segment.end; ++t) {
        double d = series.values[t] - mean;
        ss += d * d;
    }
    return {std::sqrt(ss / n), mean};
}

BurstStats burst_stats(const FrequencySeries& series, const Segment& segment) {
    check_segment(series, segment, SegmentKind::Burst);
    BurstStats stats;
    stats.peak = series.values[segment.start];
    for (std::size_t t = segment.start; t < segment.end; ++t) {
        stats.size += series.values[t];
        stats.peak = std::max(stats.peak, series.values[t]);
    }
    return stats;
}

PairBuild build_pairs(const FrequencySeries& series, const std::vector<SegmentPair>& episodes) {
    PairBuild out;
    for (std::size_t i = 0; i < episodes.size(); ++i) {
        const auto& episode = episodes[i];
        BaselineStats base = baseline_stats(series, episode.baseline);
        BurstStats bst = burst_stats(series, episode.burst);
        if (!(base.e_mean > 0.0) || !(bst.size > 0.0)) {
            ++out.excluded;
            continue;
        }
        EpisodePair pair;
        pair.index = i;  // episode ordinal, stable even when some pairs drop
        pair.sigma = base.sigma;
        pair.e_mean = base.e_mean;
        pair.size = bst.size;
        pair.peak = bst.peak;
        pair.peak_ratio = bst.peak / bst.size;
        pair.scaled_size = bst.size / base.e_mean;
        pair.fluct = base.sigma / base.e_mean;
        pair.response = bst.peak / base.e_mean;
        out.pairs.push_back(pair);
    }
    return out;
}

}  // namespace burst
