#include "burst/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace burst {

void DetectorParams::validate() const {
    if (!(s > 1.0)) throw std::invalid_argument("detector s must be > 1");
    if (!(gamma >= 0.0)) throw std::invalid_argument("detector gamma must be >= 0");
    if (max_level && *max_level < 0) throw std::invalid_argument("max_level must be >= 0");
}

DetectorParams parse_detector_params(const std::string& text) {
    DetectorParams params;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("expected key=value in params: " + item);
        std::string key = item.substr(0, eq);
        std::string val = item.substr(eq + 1);
        try {
            if (key == "s") params.s = std::stod(val);
            else if (key == "gamma") params.gamma = std::stod(val);
            else if (key == "max_level") params.max_level = std::stoi(val);
            else throw std::invalid_argument("unknown detector param: " + key);
        } catch (const std::out_of_range&) {
            throw std::invalid_argument("bad value for " + key + ": " + val);
        }
    }
    params.validate();
    return params;
}

CostModel::CostModel(double base_rate, std::size_t n_bins, const DetectorParams& params,
                     int top_level) {
    params.validate();
    if (!(base_rate > 0.0)) throw std::invalid_argument("base rate must be positive");
    if (top_level < 0) throw std::invalid_argument("top level must be >= 0");
    rates_.reserve(static_cast<std::size_t>(top_level) + 1);
    double rate = base_rate;
    for (int i = 0; i <= top_level; ++i) {
        rates_.push_back(rate);
        log_rates_.push_back(std::log(rate));
        rate *= params.s;
    }
    raise_cost_ = params.gamma * std::log(static_cast<double>(n_bins));
}

double CostModel::emission(int level, double value) const {
    std::size_t i = static_cast<std::size_t>(level);
    return rates_[i] - value * log_rates_[i];
}

double CostModel::transition(int from, int to) const {
    return to > from ? static_cast<double>(to - from) * raise_cost_ : 0.0;
}

double mean_rate(const FrequencySeries& series) {
    if (series.values.empty()) throw std::invalid_argument("series is empty");
    double sum = 0.0;
    for (double v : series.values) sum += v;
    if (!(sum > 0.0))
        throw DegenerateSeriesError("all-zero series for keyword '" + series.keyword + "'");
    return sum / static_cast<double>(series.values.size());
}

int level_cap(const std::vector<double>& values, double base_rate, const DetectorParams& params) {
    params.validate();
    if (!(base_rate > 0.0)) throw std::invalid_argument("base rate must be positive");
    double peak = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    int level = 0;
    double rate = base_rate;
    while (rate < peak) {
        rate *= params.s;
        ++level;
    }
    ++level;  // headroom state above the data maximum
    if (params.max_level) level = std::min(level, *params.max_level);
    return level;
}

BurstAnnotation annotate(const std::vector<double>& values, double base_rate,
                         const DetectorParams& params) {
    if (values.empty()) throw std::invalid_argument("series is empty");
    int top = level_cap(values, base_rate, params);
    CostModel model(base_rate, values.size(), params, top);
    std::size_t n_states = static_cast<std::size_t>(top) + 1;
    std::size_t n = values.size();

    std::vector<double> cost(n_states);
    std::vector<double> next(n_states);
    std::vector<int> back(n * n_states, 0);

    for (std::size_t j = 0; j < n_states; ++j)
        cost[j] = model.emission(static_cast<int>(j), values[0]);

    for (std::size_t t = 1; t < n; ++t) {
        for (std::size_t j = 0; j < n_states; ++j) {
            double best = cost[0] + model.transition(0, static_cast<int>(j));
            int best_from = 0;
            for (std::size_t i = 1; i < n_states; ++i) {
                double c = cost[i] + model.transition(static_cast<int>(i), static_cast<int>(j));
                if (c < best) {  // ties keep the lower previous level
                    best = c;
                    best_from = static_cast<int>(i);
                }
            }
            next[j] = best + model.emission(static_cast<int>(j), values[t]);
            back[t * n_states + j] = best_from;
        }
        cost.swap(next);
    }

    std::size_t last = 0;
    for (std::size_t j = 1; j < n_states; ++j)
        if (cost[j] < cost[last]) last = j;  // ties keep the lower level

    BurstAnnotation annotation;
    annotation.base_rate = base_rate;
    annotation.path_cost = cost[last];
    annotation.levels.assign(n, 0);
    std::size_t state = last;
    for (std::size_t t = n; t-- > 0;) {
        annotation.levels[t] = static_cast<int>(state);
        if (t > 0) state = static_cast<std::size_t>(back[t * n_states + state]);
    }
    annotation.segments = segments_from_levels(annotation.levels);
    return annotation;
}

BurstAnnotation detect(const FrequencySeries& series, const DetectorParams& params) {
    return annotate(series.values, mean_rate(series), params);
}

std::vector<Segment> segments_from_levels(const std::vector<int>& levels) {
    std::vector<Segment> segments;
    std::size_t start = 0;
    for (std::size_t t = 1; t <= levels.size(); ++t) {
        bool boundary = t == levels.size() || (levels[t] > 0) != (levels[start] > 0);
        if (boundary) {
            segments.push_back({levels[start] > 0 ? SegmentKind::Burst : SegmentKind::Baseline,
                                start, t});
            start = t;
        }
    }
    return segments;
}

std::vector<SegmentPair> pair_episodes(const std::vector<Segment>& segments) {
    std::vector<SegmentPair> pairs;
    for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
        if (segments[i].kind == SegmentKind::Baseline &&
            segments[i + 1].kind == SegmentKind::Burst) {
            pairs.push_back({segments[i], segments[i + 1]});
        }
    }
    return pairs;
}

std::vector<SegmentPair> pair_episodes(const BurstAnnotation& annotation) {
    return pair_episodes(annotation.segments);
}

}  // namespace burst
