#pragma once

#include <optional>
#include <vector>

#include "burst/types.hpp"

namespace burst {

struct CcdfPoint {
    double size = 0.0;
    double fraction = 0.0;  // share of observations >= size
};

// Complementary cumulative distribution evaluated at each distinct size,
// ascending; the first point always has fraction 1.
std::vector<CcdfPoint> ccdf(std::vector<double> sizes);

struct PowerLawFit {
    double ccdf_exponent = 0.0;  // log-log slope, negative for real data
    double pdf_exponent = 0.0;   // ccdf_exponent - 1
    double intercept = 0.0;      // log-log intercept
    double r2 = 0.0;
    std::size_t n_points = 0;    // distinct sizes in the fit
    bool passed = false;         // r2 > r2_min and n_points >= min_points
};

// OLS of ln(fraction) on ln(size). Needs at least 2 distinct sizes; the
// min_points gate only affects `passed`.
PowerLawFit fit_power_law(const std::vector<CcdfPoint>& points, double r2_min = 0.96,
                          std::size_t min_points = 5);

struct ClassDistribution {
    std::vector<CcdfPoint> points;
    std::optional<PowerLawFit> fit;          // absent when the class cannot be fitted
    std::optional<double> median_size;
    std::size_t n_bursts = 0;
};

struct ClassDistributions {
    ClassDistribution endogenous;
    ClassDistribution exogenous;
};

// Splits burst sizes by label and fits each side.
ClassDistributions class_distributions(const std::vector<EpisodePair>& pairs,
                                       double r2_min = 0.96, std::size_t min_points = 5);

struct ClassExponent {
    Label cls = Label::Unlabeled;
    PowerLawFit fit;
};

struct HistogramRow {
    double bin_low = 0.0;
    double bin_high = 0.0;
    std::size_t endo_count = 0;
    std::size_t exo_count = 0;
};

// Histogram of ccdf exponents over fits that pass both gates, on bins of
// `bin_width` aligned to multiples of the width.
std::vector<HistogramRow> exponent_histogram(const std::vector<ClassExponent>& fits,
                                             double r2_min = 0.96, std::size_t min_points = 5,
                                             double bin_width = 0.1);

}  // namespace burst
