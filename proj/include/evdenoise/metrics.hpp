#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "json.hpp"

#include "evdenoise/event.hpp"
#include "evdenoise/snn.hpp"

namespace evdenoise {

// Contingency counts with signal as the positive class.
struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
    std::uint64_t positives() const noexcept { return tp + fn; }
    std::uint64_t negatives() const noexcept { return fp + tn; }
    // FP / N_N and TP / N_P; 0 when the class is empty.
    double fpr() const noexcept { return negatives() ? static_cast<double>(fp) / negatives() : 0.0; }
    double tpr() const noexcept { return positives() ? static_cast<double>(tp) / positives() : 0.0; }

    ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }
    friend ConfusionCounts operator+(ConfusionCounts a, const ConfusionCounts& b) noexcept { return a += b; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Throws ConfigError on length mismatch and ValidationError on unlabeled entries.
ConfusionCounts confusion(std::span<const Decision> predictions, std::span<const Label> labels);

struct RocPoint {
    double threshold = 0.0;  // score threshold, or tau for sweeps over time windows
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // sorted by fpr, then tpr
    double auc = 0.0;
};

// Trapezoidal area under the (fpr, tpr) polyline.
double auc(const RocCurve& curve);
double auc(std::span<const RocPoint> points);

// Thresholds at every distinct score (descending); equal scores cross
// together. Starts at (0, 0) with threshold +inf and ends at (1, 1). Throws
// ConfigError when either class is missing or lengths differ.
RocCurve roc_from_scores(std::span<const double> scores, std::span<const Label> labels);
RocCurve roc_from_scores(std::span<const std::int64_t> scores, std::span<const Label> labels);

// Builds a curve from operating points (e.g. one per tau), adding the (0, 0)
// and (1, 1) endpoints and sorting by fpr.
RocCurve roc_from_points(std::vector<RocPoint> points);

// "threshold,fpr,tpr" with a header line; infinities written as inf / -inf.
void write_roc_csv(const RocCurve& curve, std::ostream& out);

nlohmann::json summary_json(const RocCurve& curve);
nlohmann::json to_json(const ConfusionCounts& counts);

}  // namespace evdenoise
