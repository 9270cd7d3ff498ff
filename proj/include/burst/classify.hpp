#pragma once

#include <string>
#include <vector>

#include "burst/types.hpp"

namespace burst {

// Per-keyword summary of the (scaled size, peak ratio) power-law fits.
struct SeparatorFit {
    double beta = 0.0;        // exponent of the free-slope fit y = a * x^(-beta)
    double alpha_free = 0.0;  // its prefactor
    double alpha_sep = 0.0;   // prefactor of the fixed slope -1 separator
    std::size_t n_points = 0; // usable pairs behind the fits
};

// Pairs enter the fits only with positive, finite scaled_size and peak_ratio.
std::vector<const EpisodePair*> usable_pairs(const std::vector<EpisodePair>& pairs);

struct FreeFit {
    double alpha_free = 0.0;
    double beta = 0.0;
};

// OLS of ln(peak_ratio) on ln(scaled_size); slope = -beta. Needs at least
// two usable pairs with distinct scaled sizes.
FreeFit fit_beta(const std::vector<EpisodePair>& pairs);

// Least squares with the slope fixed at -1: alpha_sep is the geometric mean
// of peak_ratio * scaled_size over usable pairs.
double fit_separator(const std::vector<EpisodePair>& pairs);

// Endogenous strictly below y = alpha_sep / x; points on the line count as
// exogenous. Pairs unusable for the fit stay Unlabeled.
void label_pairs(std::vector<EpisodePair>& pairs, double alpha_sep);

struct KeywordBeta {
    std::string keyword;
    double total_frequency = 0.0;
    double beta = 0.0;
};

struct BetaRankRow {
    std::string keyword;
    std::size_t rank = 0;  // 1 = highest total frequency
    double beta = 0.0;
};

// Ranks keywords by descending total frequency (ties broken by name) and
// returns rows sorted by rank.
std::vector<BetaRankRow> beta_rank_table(std::vector<KeywordBeta> keywords);

}  // namespace burst
