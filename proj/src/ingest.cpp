#include "burst/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <unordered_set>

#include "json.hpp"

namespace burst {

ParseResult parse_events(std::istream& in) {
    if (!in) throw IoError("event stream is not readable");
    ParseResult result;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto obj = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (obj.is_discarded() || !obj.is_object()) {
            ++result.malformed_lines;
            continue;
        }
        auto ts = obj.find("ts");
        auto user = obj.find("user");
        auto kw = obj.find("kw");
        if (ts == obj.end() || user == obj.end() || kw == obj.end() ||
            !ts->is_number_integer() || !user->is_string() || !kw->is_string()) {
            ++result.malformed_lines;
            continue;
        }
        EventRecord rec;
        rec.timestamp = ts->get<std::int64_t>();
        rec.user_id = user->get<std::string>();
        rec.keyword = kw->get<std::string>();
        if (rec.timestamp < 0 || rec.user_id.empty() || rec.keyword.empty()) {
            ++result.malformed_lines;
            continue;
        }
        result.events.push_back(std::move(rec));
    }
    if (in.bad()) throw IoError("event stream read failed");
    return result;
}

TimeSpan span_of(const std::vector<EventRecord>& events) {
    if (events.empty()) return {0, 0};
    std::int64_t lo = events.front().timestamp;
    std::int64_t hi = lo;
    for (const auto& e : events) {
        lo = std::min(lo, e.timestamp);
        hi = std::max(hi, e.timestamp);
    }
    return {lo, hi + 1};
}

BinnedSeries bin_unique_users(const std::vector<EventRecord>& events,
                              const std::string& keyword,
                              std::int64_t bin_width, TimeSpan span) {
    if (bin_width <= 0) throw std::invalid_argument("bin_width must be positive");
    if (span.end <= span.begin) throw std::invalid_argument("empty time span");

    std::size_t n_bins =
        static_cast<std::size_t>((span.end - span.begin + bin_width - 1) / bin_width);

    BinnedSeries out;
    out.series.keyword = keyword;
    out.series.start_time = span.begin;
    out.series.bin_width = bin_width;
    out.series.raw = true;
    out.series.values.assign(n_bins, 0.0);

    // Distinct (bin, user) pairs; duplicates within a bin collapse to one.
    std::unordered_set<std::string> seen;
    for (const auto& e : events) {
        if (e.keyword != keyword) continue;
        if (e.timestamp < span.begin || e.timestamp >= span.end) {
            ++out.skipped_events;
            continue;
        }
        std::size_t bin = static_cast<std::size_t>((e.timestamp - span.begin) / bin_width);
        std::string key = std::to_string(bin) + '\x1f' + e.user_id;
        if (seen.insert(std::move(key)).second) out.series.values[bin] += 1.0;
    }
    return out;
}

FrequencySeries gaussian_smooth(const FrequencySeries& series, double sigma_seconds) {
    if (!(sigma_seconds > 0.0)) throw std::invalid_argument("sigma must be positive");
    if (series.bin_width <= 0) throw std::invalid_argument("bin_width must be positive");

    double sigma_bins = sigma_seconds / static_cast<double>(series.bin_width);
    std::ptrdiff_t radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma_bins));

    std::vector<double> kernel(2 * radius + 1);
    double total = 0.0;
    for (std::ptrdiff_t j = -radius; j <= radius; ++j) {
        double w = std::exp(-static_cast<double>(j * j) / (2.0 * sigma_bins * sigma_bins));
        kernel[static_cast<std::size_t>(j + radius)] = w;
        total += w;
    }
    for (double& w : kernel) w /= total;

    FrequencySeries out = series;
    out.raw = false;
    std::ptrdiff_t n = static_cast<std::ptrdiff_t>(series.values.size());
    for (std::ptrdiff_t t = 0; t < n; ++t) {
        std::ptrdiff_t lo = std::max<std::ptrdiff_t>(-radius, -t);
        std::ptrdiff_t hi = std::min<std::ptrdiff_t>(radius, n - 1 - t);
        double acc = 0.0;
        double weight = 0.0;
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
            double w = kernel[static_cast<std::size_t>(j + radius)];
            acc += w * series.values[static_cast<std::size_t>(t + j)];
            weight += w;
        }
        out.values[static_cast<std::size_t>(t)] = acc / weight;
    }
    return out;
}

}  // namespace burst
