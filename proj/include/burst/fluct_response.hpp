#pragma once

#include <vector>

#include "burst/types.hpp"

namespace burst {

// Points run from (0,0) to (1,1) with fpr and tpr non-decreasing;
// thresholds[i] is the fluct cutoff that produced point i (+-inf at the
// ends, NaN for averaged curves).
struct RocCurve {
    std::vector<double> thresholds;
    std::vector<double> fpr;
    std::vector<double> tpr;
    double auc = 0.0;

    std::size_t size() const { return fpr.size(); }
};

struct CriticalThreshold {
    double theta = 0.0;     // fluct value with the best TPR - FPR
    double youden_j = 0.0;  // TPR - FPR at theta
};

// Positive class is Endogenous, predicted when fluct < threshold. The
// threshold sweeps -inf, every distinct fluct value, then +inf; AUC by the
// trapezoidal rule. Throws RocError unless both classes are present.
RocCurve roc_curve(const std::vector<EpisodePair>& pairs);

// Vertical averaging: each curve's TPR is interpolated onto a uniform FPR
// grid and averaged pointwise.
RocCurve average_roc(const std::vector<RocCurve>& curves, std::size_t grid_points = 101);

// Maximizes Youden's J = TPR - FPR over the distinct fluct values; ties go
// to the smallest threshold.
CriticalThreshold critical_threshold(const std::vector<EpisodePair>& pairs);

struct ResponseRow {
    double fluct = 0.0;
    double response = 0.0;
    Label label = Label::Unlabeled;
};

std::vector<ResponseRow> response_scatter(const std::vector<EpisodePair>& pairs);

}  // namespace burst
