#include "burst/fluct_response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace burst {

namespace {

struct ClassFlucts {
    std::vector<double> endo;
    std::vector<double> exo;
};

ClassFlucts split_flucts(const std::vector<EpisodePair>& pairs) {
    ClassFlucts out;
    for (const auto& p : pairs) {
        if (p.label == Label::Endogenous) out.endo.push_back(p.fluct);
        else if (p.label == Label::Exogenous) out.exo.push_back(p.fluct);
    }
    if (out.endo.empty() || out.exo.empty())
        throw RocError("ROC needs at least one endogenous and one exogenous pair");
    std::sort(out.endo.begin(), out.endo.end());
    std::sort(out.exo.begin(), out.exo.end());
    return out;
}

double frac_below(const std::vector<double>& sorted, double threshold) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), threshold);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

std::vector<double> distinct_flucts(const ClassFlucts& split) {
    std::vector<double> values;
    values.reserve(split.endo.size() + split.exo.size());
    values.insert(values.end(), split.endo.begin(), split.endo.end());
    values.insert(values.end(), split.exo.begin(), split.exo.end());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

}  // namespace

RocCurve roc_curve(const std::vector<EpisodePair>& pairs) {
    ClassFlucts split = split_flucts(pairs);
    std::vector<double> sweep;
    sweep.push_back(-std::numeric_limits<double>::infinity());
    for (double v : distinct_flucts(split)) sweep.push_back(v);
    sweep.push_back(std::numeric_limits<double>::infinity());

    RocCurve curve;
    curve.thresholds = sweep;
    curve.fpr.reserve(sweep.size());
    curve.tpr.reserve(sweep.size());
    for (double threshold : sweep) {
        curve.tpr.push_back(frac_below(split.endo, threshold));
        curve.fpr.push_back(frac_below(split.exo, threshold));
    }
    curve.auc = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        curve.auc += (curve.fpr[i] - curve.fpr[i - 1]) * (curve.tpr[i] + curve.tpr[i - 1]) / 2.0;
    }
    return curve;
}

RocCurve average_roc(const std::vector<RocCurve>& curves, std::size_t grid_points) {
    if (curves.empty()) throw std::invalid_argument("no curves to average");
    if (grid_points < 2) throw std::invalid_argument("grid needs at least 2 points");

    RocCurve avg;
    avg.thresholds.assign(grid_points, std::numeric_limits<double>::quiet_NaN());
    avg.fpr.resize(grid_points);
    avg.tpr.assign(grid_points, 0.0);
    for (std::size_t g = 0; g < grid_points; ++g)
        avg.fpr[g] = static_cast<double>(g) / static_cast<double>(grid_points - 1);

    for (const auto& curve : curves) {
        // Collapse vertical runs to their top point, then interpolate.
        std::vector<double> fx;
        std::vector<double> fy;
        for (std::size_t i = 0; i < curve.size(); ++i) {
            if (!fx.empty() && curve.fpr[i] == fx.back()) {
                fy.back() = std::max(fy.back(), curve.tpr[i]);
            } else {
                fx.push_back(curve.fpr[i]);
                fy.push_back(curve.tpr[i]);
            }
        }
        for (std::size_t g = 0; g < grid_points; ++g) {
            double x = avg.fpr[g];
            auto it = std::lower_bound(fx.begin(), fx.end(), x);
            std::size_t k = static_cast<std::size_t>(it - fx.begin());
            double y;
            if (k < fx.size() && fx[k] == x) {
                y = fy[k];
            } else {
                double x0 = fx[k - 1];
                double x1 = fx[k];
                y = fy[k - 1] + (fy[k] - fy[k - 1]) * (x - x0) / (x1 - x0);
            }
            avg.tpr[g] += y;
        }
    }
    for (double& y : avg.tpr) y /= static_cast<double>(curves.size());

    avg.auc = 0.0;
    for (std::size_t g = 1; g < grid_points; ++g)
        avg.auc += (avg.fpr[g] - avg.fpr[g - 1]) * (avg.tpr[g] + avg.tpr[g - 1]) / 2.0;
    return avg;
}

CriticalThreshold critical_threshold(const std::vector<EpisodePair>& pairs) {
    ClassFlucts split = split_flucts(pairs);
    CriticalThreshold best;
    bool first = true;
    for (double theta : distinct_flucts(split)) {
        double j = frac_below(split.endo, theta) - frac_below(split.exo, theta);
        if (first || j > best.youden_j) {  // strict: ties keep the smaller theta
            best = {theta, j};
            first = false;
        }
    }
    return best;
}

std::vector<ResponseRow> response_scatter(const std::vector<EpisodePair>& pairs) {
    std::vector<ResponseRow> rows;
    rows.reserve(pairs.size());
    for (const auto& p : pairs) rows.push_back({p.fluct, p.response, p.label});
    return rows;
}

}  // namespace burst
