#include "burst/size_dist.hpp"

#include <algorithm>
#include <cmath>

namespace burst {

std::vector<CcdfPoint> ccdf(std::vector<double> sizes) {
    if (sizes.empty()) throw std::invalid_argument("no sizes for a CCDF");
    for (double s : sizes)
        if (!(s > 0.0)) throw std::invalid_argument("CCDF sizes must be positive");
    std::sort(sizes.begin(), sizes.end());
    double n = static_cast<double>(sizes.size());
    std::vector<CcdfPoint> points;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i > 0 && sizes[i] == sizes[i - 1]) continue;
        // everything at i and later is >= sizes[i]
        points.push_back({sizes[i], static_cast<double>(sizes.size() - i) / n});
    }
    return points;
}

PowerLawFit fit_power_law(const std::vector<CcdfPoint>& points, double r2_min,
                          std::size_t min_points) {
    if (points.size() < 2) throw FitError("power-law fit needs at least 2 distinct sizes");

    std::size_t n = points.size();
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& p : points) {
        mean_x += std::log(p.size);
        mean_y += std::log(p.fraction);
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double ss_xx = 0.0;
    double ss_xy = 0.0;
    double ss_yy = 0.0;
    for (const auto& p : points) {
        double dx = std::log(p.size) - mean_x;
        double dy = std::log(p.fraction) - mean_y;
        ss_xx += dx * dx;
        ss_xy += dx * dy;
        ss_yy += dy * dy;
    }
    if (!(ss_xx > 0.0)) throw FitError("all sizes equal; slope is undefined");

    PowerLawFit fit;
    fit.ccdf_exponent = ss_xy / ss_xx;
    fit.pdf_exponent = fit.ccdf_exponent - 1.0;
    fit.intercept = mean_y - fit.ccdf_exponent * mean_x;

    double ss_res = 0.0;
    for (const auto& p : points) {
        double r = std::log(p.fraction) - (fit.intercept + fit.ccdf_exponent * std::log(p.size));
        ss_res += r * r;
    }
    fit.r2 = ss_yy > 0.0 ? 1.0 - ss_res / ss_yy : 1.0;
    fit.r2 = std::clamp(fit.r2, 0.0, 1.0);
    fit.n_points = n;
    fit.passed = fit.r2 > r2_min && fit.n_points >= min_points;
    return fit;
}

namespace {

std::optional<double> median(std::vector<double> values) {
    if (values.empty()) return std::nullopt;
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

ClassDistribution one_class(std::vector<double> sizes, double r2_min, std::size_t min_points) {
    ClassDistribution dist;
    dist.n_bursts = sizes.size();
    dist.median_size = median(sizes);
    if (sizes.empty()) return dist;
    dist.points = ccdf(std::move(sizes));
    if (dist.points.size() >= 2) dist.fit = fit_power_law(dist.points, r2_min, min_points);
    return dist;
}

}  // namespace

ClassDistributions class_distributions(const std::vector<EpisodePair>& pairs, double r2_min,
                                       std::size_t min_points) {
    std::vector<double> endo;
    std::vector<double> exo;
    for (const auto& p : pairs) {
        if (p.label == Label::Endogenous) endo.push_back(p.size);
        else if (p.label == Label::Exogenous) exo.push_back(p.size);
    }
    ClassDistributions out;
    out.endogenous = one_class(std::move(endo), r2_min, min_points);
    out.exogenous = one_class(std::move(exo), r2_min, min_points);
    return out;
}

std::vector<HistogramRow> exponent_histogram(const std::vector<ClassExponent>& fits,
                                             double r2_min, std::size_t min_points,
                                             double bin_width) {
    if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be positive");

    std::vector<std::pair<Label, double>> passing;
    for (const auto& f : fits) {
        if (f.fit.r2 > r2_min && f.fit.n_points >= min_points)
            passing.push_back({f.cls, f.fit.ccdf_exponent});
    }
    if (passing.empty()) return {};

    auto bin_of = [bin_width](double v) {
        return static_cast<long>(std::floor(v / bin_width));
    };
    long lo = bin_of(passing.front().second);
    long hi = lo;
    for (const auto& [cls, e] : passing) {
        lo = std::min(lo, bin_of(e));
        hi = std::max(hi, bin_of(e));
    }

    std::vector<HistogramRow> rows;
    for (long b = lo; b <= hi; ++b) {
        rows.push_back({static_cast<double>(b) * bin_width,
                        static_cast<double>(b + 1) * bin_width, 0, 0});
    }
    for (const auto& [cls, e] : passing) {
        auto& row = rows[static_cast<std::size_t>(bin_of(e) - lo)];
        if (cls == Label::Endogenous) ++row.endo_count;
        else if (cls == Label::Exogenous) ++row.exo_count;
    }
    return rows;
}

}  // namespace burst
