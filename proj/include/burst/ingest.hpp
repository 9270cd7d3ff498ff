#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "burst/types.hpp"

namespace burst {

struct ParseResult {
    std::vector<EventRecord> events;
    std::size_t malformed_lines = 0;
};

// Reads line-delimited JSON records {"ts":<int>,"user":"..","kw":".."}.
// Malformed lines (bad JSON, missing fields, negative ts, empty tokens) are
// counted and skipped; a stream that cannot be read throws IoError.
ParseResult parse_events(std::istream& in);

struct TimeSpan {
    std::int64_t begin = 0;
    std::int64_t end = 0;  // exclusive
};

// Tight span [min_ts, max_ts + 1) over all events; {0, 0} when empty.
TimeSpan span_of(const std::vector<EventRecord>& events);

struct BinnedSeries {
    FrequencySeries series;
    std::size_t skipped_events = 0;  // events outside the span
};

// values[t] = number of distinct users mentioning `keyword` in bin t.
// Repeated posts by one user within a bin count once.
BinnedSeries bin_unique_users(const std::vector<EventRecord>& events,
                              const std::string& keyword,
                              std::int64_t bin_width, TimeSpan span);

// Convolves with a Gaussian kernel (sigma in seconds, converted to bins)
// truncated at +-4 sigma. The clipped kernel is renormalized per output bin,
// so a constant series stays constant all the way to the edges.
FrequencySeries gaussian_smooth(const FrequencySeries& series, double sigma_seconds);

}  // namespace burst
