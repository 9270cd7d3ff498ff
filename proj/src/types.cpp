#include "burst/types.hpp"

namespace burst {

std::string to_string(SegmentKind kind) {
    return kind == SegmentKind::Baseline ? "baseline" : "burst";
}

std::string to_string(Label label) {
    switch (label) {
        case Label::Endogenous: return "endogenous";
        case Label::Exogenous: return "exogenous";
        default: return "unlabeled";
    }
}

SegmentKind segment_kind_from_string(const std::string& text) {
    if (text == "baseline") return SegmentKind::Baseline;
    if (text == "burst") return SegmentKind::Burst;
    throw std::invalid_argument("unknown segment kind: " + text);
}

Label label_from_string(const std::string& text) {
    if (text == "endogenous") return Label::Endogenous;
    if (text == "exogenous") return Label::Exogenous;
    if (text == "unlabeled") return Label::Unlabeled;
    throw std::invalid_argument("unknown label: " + text);
}

}  // namespace burst
