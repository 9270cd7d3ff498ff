#include "burst/classify.hpp"

#include <algorithm>
#include <cmath>

namespace burst {

std::vector<const EpisodePair*> usable_pairs(const std::vector<EpisodePair>& pairs) {
    std::vector<const EpisodePair*> usable;
    for (const auto& p : pairs) {
        if (p.scaled_size > 0.0 && p.peak_ratio > 0.0 && std::isfinite(p.scaled_size) &&
            std::isfinite(p.peak_ratio)) {
            usable.push_back(&p);
        }
    }
    return usable;
}

FreeFit fit_beta(const std::vector<EpisodePair>& pairs) {
    auto usable = usable_pairs(pairs);
    if (usable.size() < 2) throw FitError("need at least 2 usable pairs for a free-slope fit");

    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto* p : usable) {
        mean_x += std::log(p->scaled_size);
        mean_y += std::log(p->peak_ratio);
    }
    double n = static_cast<double>(usable.size());
    mean_x /= n;
    mean_y /= n;

    double ss_xx = 0.0;
    double ss_xy = 0.0;
    for (const auto* p : usable) {
        double dx = std::log(p->scaled_size) - mean_x;
        double dy = std::log(p->peak_ratio) - mean_y;
        ss_xx += dx * dx;
        ss_xy += dx * dy;
    }
    if (!(ss_xx > 0.0)) throw FitError("all scaled sizes equal; slope is undefined");

    double slope = ss_xy / ss_xx;
    double intercept = mean_y - slope * mean_x;
    return {std::exp(intercept), -slope};
}

double fit_separator(const std::vector<EpisodePair>& pairs) {
    auto usable = usable_pairs(pairs);
    if (usable.empty()) throw FitError("no usable pairs for the separator fit");
    double mean_log = 0.0;
    for (const auto* p : usable) mean_log += std::log(p->peak_ratio) + std::log(p->scaled_size);
    mean_log /= static_cast<double>(usable.size());
    return std::exp(mean_log);
}

void label_pairs(std::vector<EpisodePair>& pairs, double alpha_sep) {
    if (!(alpha_sep > 0.0)) throw std::invalid_argument("alpha_sep must be positive");
    double log_alpha = std::log(alpha_sep);
    for (auto& p : pairs) {
        if (!(p.scaled_size > 0.0 && p.peak_ratio > 0.0)) {
            p.label = Label::Unlabeled;
            continue;
        }
        // Compared in log space: peak_ratio < alpha / scaled_size. A point
        // exactly on the line is exogenous.
        double log_product = std::log(p.peak_ratio) + std::log(p.scaled_size);
        p.label = log_product < log_alpha ? Label::Endogenous : Label::Exogenous;
    }
}

std::vector<BetaRankRow> beta_rank_table(std::vector<KeywordBeta> keywords) {
    std::sort(keywords.begin(), keywords.end(), [](const KeywordBeta& a, const KeywordBeta& b) {
        if (a.total_frequency != b.total_frequency) return a.total_frequency > b.total_frequency;
        return a.keyword < b.keyword;
    });
    std::vector<BetaRankRow> rows;
    rows.reserve(keywords.size());
    for (std::size_t i = 0; i < keywords.size(); ++i)
        rows.push_back({keywords[i].keyword, i + 1, keywords[i].beta});
    return rows;
}

}  // namespace burst
