#pragma once

#include <vector>

#include "burst/detect.hpp"
#include "burst/types.hpp"

namespace burst {

struct BaselineStats {
    double sigma = 0.0;   // population standard deviation
    double e_mean = 0.0;  // mean frequency
};

BaselineStats baseline_stats(const FrequencySeries& series, const Segment& segment);

struct BurstStats {
    double size = 0.0;  // sum of frequencies over the burst
    double peak = 0.0;  // maximum frequency in the burst
};

BurstStats burst_stats(const FrequencySeries& series, const Segment& segment);

struct PairBuild {
    std::vector<EpisodePair> pairs;
    std::size_t excluded = 0;  // dropped for zero baseline mean or zero size
};

// Computes every per-episode statistic and derived ratio. Pairs whose
// baseline mean or burst size is zero cannot be normalized and are dropped.
PairBuild build_pairs(const FrequencySeries& series, const std::vector<SegmentPair>& episodes);

}  // namespace burst
