#pragma once

#include <optional>
#include <string>
#include <vector>

#include "burst/types.hpp"

namespace burst {

struct DetectorParams {
    double s = 2.0;      // rate ratio between consecutive levels (> 1)
    double gamma = 1.0;  // level-raise cost weight (>= 0)
    std::optional<int> max_level;  // optional cap on the automaton states

    void validate() const;
};

// Parses "s=2,gamma=1[,max_level=N]".
DetectorParams parse_detector_params(const std::string& text);

// State automaton over levels 0..top: level i emits counts at rate
// base_rate * s^i with Poisson cost  lambda_i - n * ln(lambda_i)
// (the state-independent lnGamma(n+1) term is dropped), and raising the
// level from i to j costs gamma * (j - i) * ln(n_bins). Drops are free.
class CostModel {
  public:
    CostModel(double base_rate, std::size_t n_bins, const DetectorParams& params, int top_level);

    double emission(int level, double value) const;
    double transition(int from, int to) const;
    double level_rate(int level) const { return rates_[static_cast<std::size_t>(level)]; }
    int top_level() const { return static_cast<int>(rates_.size()) - 1; }

  private:
    std::vector<double> rates_;
    std::vector<double> log_rates_;
    double raise_cost_ = 0.0;  // gamma * ln(n_bins)
};

// Mean counts per bin. Throws DegenerateSeriesError on an all-zero series.
double mean_rate(const FrequencySeries& series);

// Smallest level whose rate reaches the series maximum, plus one headroom
// level; clamped to params.max_level when set.
int level_cap(const std::vector<double>& values, double base_rate, const DetectorParams& params);

// Minimum-cost level path against a fixed base rate. Ties break toward the
// lower level, so the output is deterministic.
BurstAnnotation annotate(const std::vector<double>& values, double base_rate,
                         const DetectorParams& params);

BurstAnnotation detect(const FrequencySeries& series, const DetectorParams& params);

// Run-length encodes levels into alternating baseline (level 0) and burst
// (level > 0) segments covering [0, len).
std::vector<Segment> segments_from_levels(const std::vector<int>& levels);

struct SegmentPair {
    Segment baseline;
    Segment burst;
};

// Each baseline segment paired with the burst that immediately follows it.
// A leading burst and a trailing baseline stay unpaired.
std::vector<SegmentPair> pair_episodes(const std::vector<Segment>& segments);
std::vector<SegmentPair> pair_episodes(const BurstAnnotation& annotation);

}  // namespace burst
