#include <cmath>
#include <sstream>

#include "doctest.h"

#include "burst/ingest.hpp"

using namespace burst;

namespace {

EventRecord ev(std::int64_t ts, const std::string& user, const std::string& kw) {
    return EventRecord{ts, user, kw};
}

FrequencySeries series_of(std::vector<double> values) {
    FrequencySeries s;
    s.keyword = "k";
    s.bin_width = 600;
    s.values = std::move(values);
    return s;
}

// Reference kernel: exp(-(d/sigma)^2/2) truncated at ceil(4*sigma) bins,
// normalized over the full window.
std::vector<double> reference_kernel(double sigma_bins) {
    int radius = static_cast<int>(std::ceil(4.0 * sigma_bins));
    std::vector<double> w(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (int d = -radius; d <= radius; ++d) {
        double x = static_cast<double>(d) / sigma_bins;
        w[static_cast<std::size_t>(d + radius)] = std::exp(-0.5 * x * x);
        total += w[static_cast<std::size_t>(d + radius)];
    }
    for (double& v : w) v /= total;
    return w;
}

}  // namespace

TEST_CASE("event lines parse into records") {
    std::istringstream in(
        "{\"ts\":0,\"user\":\"u1\",\"kw\":\"school\"}\n"
        "{\"ts\":650,\"user\":\"u2\",\"kw\":\"school\"}\n");
    ParseResult r = parse_events(in);
    REQUIRE(r.events.size() == 2);
    CHECK(r.events[0].timestamp == 0);
    CHECK(r.events[0].user_id == "u1");
    CHECK(r.events[0].keyword == "school");
    CHECK(r.events[1].timestamp == 650);
    CHECK(r.malformed_lines == 0);
}

TEST_CASE("malformed lines are counted and skipped") {
    std::istringstream in(
        "{\"ts\":0,\"user\":\"u1\",\"kw\":\"a\"}\n"
        "{\"ts\":1,\"kw\":\"a\"}\n"
        "not json\n"
        "{\"ts\":-5,\"user\":\"u2\",\"kw\":\"a\"}\n"
        "{\"ts\":2,\"user\":\"u3\",\"kw\":\"a\"}\n");
    ParseResult r = parse_events(in);
    CHECK(r.events.size() == 2);
    CHECK(r.malformed_lines == 3);
}

TEST_CASE("empty stream yields no events") {
    std::istringstream in("");
    ParseResult r = parse_events(in);
    CHECK(r.events.empty());
    CHECK(r.malformed_lines == 0);
}

TEST_CASE("span covers min to max inclusive") {
    std::vector<EventRecord> events{ev(100, "u", "k"), ev(5, "u", "k"), ev(40, "u", "k")};
    TimeSpan span = span_of(events);
    CHECK(span.begin == 5);
    CHECK(span.end == 101);
    TimeSpan empty = span_of({});
    CHECK(empty.begin == 0);
    CHECK(empty.end == 0);
}

TEST_CASE("repeat posts by one user count once per bin") {
    std::vector<EventRecord> events;
    for (int i = 0; i < 5; ++i) events.push_back(ev(10 + i, "u1", "k"));
    BinnedSeries b = bin_unique_users(events, "k", 600, TimeSpan{0, 600});
    REQUIRE(b.series.values.size() == 1);
    CHECK(b.series.values[0] == 1.0);
}

TEST_CASE("distinct users accumulate per bin") {
    std::vector<EventRecord> events{
        ev(0, "u1", "k"), ev(30, "u2", "k"), ev(59, "u1", "k"),  // bin 0
        ev(600, "u1", "k"),                                      // bin 1
    };
    BinnedSeries b = bin_unique_users(events, "k", 600, TimeSpan{0, 1200});
    REQUIRE(b.series.values.size() == 2);
    CHECK(b.series.values[0] == 2.0);
    CHECK(b.series.values[1] == 1.0);
    CHECK(b.skipped_events == 0);
}

TEST_CASE("no matching events produce an all-zero series") {
    std::vector<EventRecord> events{ev(0, "u1", "other")};
    BinnedSeries b = bin_unique_users(events, "k", 600, TimeSpan{0, 1200});
    REQUIRE(b.series.values.size() == 2);
    CHECK(b.series.values[0] == 0.0);
    CHECK(b.series.values[1] == 0.0);
}

TEST_CASE("events outside the span are skipped and counted") {
    std::vector<EventRecord> events{ev(0, "u1", "k"), ev(5000, "u2", "k")};
    BinnedSeries b = bin_unique_users(events, "k", 600, TimeSpan{0, 1200});
    CHECK(b.series.values[0] == 1.0);
    CHECK(b.skipped_events == 1);
}

TEST_CASE("duplicated event stream bins to the same series") {
    std::vector<EventRecord> events;
    for (int i = 0; i < 40; ++i) {
        events.push_back(ev(i * 137 % 3000, "u" + std::to_string(i % 7), "k"));
    }
    std::vector<EventRecord> doubled = events;
    doubled.insert(doubled.end(), events.begin(), events.end());
    TimeSpan span{0, 3000};
    BinnedSeries once = bin_unique_users(events, "k", 600, span);
    BinnedSeries twice = bin_unique_users(doubled, "k", 600, span);
    CHECK(once.series.values == twice.series.values);
}

TEST_CASE("smoothing keeps an all-zero series at zero") {
    FrequencySeries s = series_of(std::vector<double>(30, 0.0));
    FrequencySeries out = gaussian_smooth(s, 1800.0);
    for (double v : out.values) CHECK(v == 0.0);
    CHECK_FALSE(out.raw);
}

TEST_CASE("smoothing preserves a constant series to the edges") {
    // Per-bin renormalization of the clipped window keeps the value exact
    // where the full kernel does not fit.
    FrequencySeries s = series_of(std::vector<double>(20, 3.7));
    FrequencySeries out = gaussian_smooth(s, 1800.0);
    for (double v : out.values) CHECK(v == doctest::Approx(3.7).epsilon(1e-12));
}

TEST_CASE("unit impulse spreads with the truncated kernel weights") {
    std::vector<double> values(60, 0.0);
    values[30] = 1.0;
    FrequencySeries out = gaussian_smooth(series_of(values), 1800.0);  // sigma = 3 bins
    std::vector<double> kernel = reference_kernel(3.0);
    int radius = (static_cast<int>(kernel.size()) - 1) / 2;
    for (int d = -radius; d <= radius; ++d) {
        CHECK(out.values[static_cast<std::size_t>(30 + d)] ==
              doctest::Approx(kernel[static_cast<std::size_t>(d + radius)]).epsilon(1e-12));
    }
    CHECK(out.values[static_cast<std::size_t>(30 + radius + 1)] == 0.0);
}

TEST_CASE("smoothing conserves mass away from the boundaries") {
    // Clipped-window renormalization trades exact mass conservation near the
    // edges for exact constants; with support at least 8 sigma from both
    // ends the full kernel always fits and the total is preserved.
    std::vector<double> values(120, 0.0);
    for (std::size_t i = 40; i < 80; ++i) values[i] = 1.0 + static_cast<double>(i % 5);
    double before = 0.0;
    for (double v : values) before += v;
    FrequencySeries out = gaussian_smooth(series_of(values), 1800.0);
    double after = 0.0;
    for (double v : out.values) after += v;
    CHECK(after == doctest::Approx(before).epsilon(1e-9));
}

TEST_CASE("smoothing never produces negative values") {
    std::vector<double> values;
    for (int i = 0; i < 50; ++i) values.push_back((i * 31 % 7 == 0) ? 40.0 : 0.1);
    FrequencySeries out = gaussian_smooth(series_of(values), 1800.0);
    for (double v : out.values) CHECK(v >= 0.0);
}

TEST_CASE("smoothing a reversed series reverses the output") {
    std::vector<double> values;
    for (int i = 0; i < 41; ++i) values.push_back(static_cast<double>((i * 17) % 9));
    FrequencySeries fwd = gaussian_smooth(series_of(values), 1800.0);
    std::vector<double> reversed(values.rbegin(), values.rend());
    FrequencySeries bwd = gaussian_smooth(series_of(reversed), 1800.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        CHECK(fwd.values[i] == doctest::Approx(bwd.values[values.size() - 1 - i]).epsilon(1e-12));
    }
}

TEST_CASE("non-positive sigma is rejected") {
    FrequencySeries s = series_of({1.0, 2.0});
    CHECK_THROWS_AS(gaussian_smooth(s, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_smooth(s, -1.0), std::invalid_argument);
}
