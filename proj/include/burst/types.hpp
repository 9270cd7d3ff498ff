#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace burst {

// One timestamped (user, keyword) observation.
struct EventRecord {
    std::int64_t timestamp = 0;  // seconds since epoch
    std::string user_id;
    std::string keyword;
};

// Per-keyword, fixed-width-binned count sequence. Values are unique-user
// counts per bin and become non-integer after smoothing.
struct FrequencySeries {
    std::string keyword;
    std::int64_t start_time = 0;   // epoch seconds of bin 0
    std::int64_t bin_width = 600;  // seconds
    std::vector<double> values;
    bool raw = true;               // false once smoothed

    std::size_t size() const { return values.size(); }
    std::int64_t bin_time(std::size_t bin) const {
        return start_time + static_cast<std::int64_t>(bin) * bin_width;
    }
};

enum class SegmentKind { Baseline, Burst };

struct Segment {
    SegmentKind kind = SegmentKind::Baseline;
    std::size_t start = 0;  // inclusive bin index
    std::size_t end = 0;    // exclusive bin index

    std::size_t length() const { return end - start; }
};

// Per-bin burst levels plus the alternating baseline/burst segmentation.
struct BurstAnnotation {
    std::vector<int> levels;
    double base_rate = 0.0;  // mean counts per bin
    std::vector<Segment> segments;
    double path_cost = 0.0;  // cost of the optimal state path
};

enum class Label { Unlabeled, Endogenous, Exogenous };

// One (baseline, burst) episode with its statistics and derived ratios.
struct EpisodePair {
    std::size_t index = 0;     // ordinal within the keyword, 0-based
    double sigma = 0.0;        // baseline standard deviation
    double e_mean = 0.0;       // baseline mean frequency
    double size = 0.0;         // sum of frequencies over the burst
    double peak = 0.0;         // max frequency in the burst
    double peak_ratio = 0.0;   // peak / size
    double scaled_size = 0.0;  // size / e_mean
    double fluct = 0.0;        // sigma / e_mean
    double response = 0.0;     // peak / e_mean
    Label label = Label::Unlabeled;
};

std::string to_string(SegmentKind kind);
std::string to_string(Label label);
SegmentKind segment_kind_from_string(const std::string& text);
Label label_from_string(const std::string& text);

// Series whose Poisson baseline cannot be estimated (all-zero input).
struct DegenerateSeriesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Too few usable points for a regression.
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ROC needs at least one pair of each class.
struct RocError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace burst
