#include "evdenoise/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "evdenoise/errors.hpp"

namespace evdenoise {

ConfusionCounts confusion(std::span<const Decision> predictions, std::span<const Label> labels) {
    if (predictions.size() != labels.size()) {
        throw ConfigError("predictions and labels differ in length");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool said_signal = predictions[i] == Decision::kSignal;
        switch (labels[i]) {
            case Label::kSignal:
                (said_signal ? c.tp : c.fn) += 1;
                break;
            case Label::kNoise:
                (said_signal ? c.fp : c.tn) += 1;
                break;
            default:
                throw ValidationError("unlabeled entry at index " + std::to_string(i));
        }
    }
    return c;
}

double auc(std::span<const RocPoint> points) {
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) * 0.5;
    }
    return area;
}

double auc(const RocCurve& curve) { return auc(std::span<const RocPoint>(curve.points)); }

namespace {

template <typename Score>
RocCurve roc_impl(std::span<const Score> scores, std::span<const Label> labels) {
    if (scores.size() != labels.size()) throw ConfigError("scores and labels differ in length");
    std::uint64_t n_pos = 0;
    std::uint64_t n_neg = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == Label::kSignal) {
            ++n_pos;
        } else if (labels[i] == Label::kNoise) {
            ++n_neg;
        } else {
            throw ValidationError("unlabeled entry at index " + std::to_string(i));
        }
    }
    if (n_pos == 0 || n_neg == 0) throw ConfigError("ROC needs at least one signal and one noise sample");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const Score s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            (labels[order[i]] == Label::kSignal ? tp : fp) += 1;
            ++i;
        }
        curve.points.push_back({static_cast<double>(s), static_cast<double>(fp) / static_cast<double>(n_neg),
                                static_cast<double>(tp) / static_cast<double>(n_pos)});
    }
    curve.auc = auc(curve);
    return curve;
}

}  // namespace

RocCurve roc_from_scores(std::span<const double> scores, std::span<const Label> labels) {
    return roc_impl(scores, labels);
}

RocCurve roc_from_scores(std::span<const std::int64_t> scores, std::span<const Label> labels) {
    return roc_impl(scores, labels);
}

RocCurve roc_from_points(std::vector<RocPoint> points) {
    points.push_back({std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0});
    points.push_back({std::numeric_limits<double>::quiet_NaN(), 1.0, 1.0});
    std::stable_sort(points.begin(), points.end(), [](const RocPoint& a, const RocPoint& b) {
        return a.fpr != b.fpr ? a.fpr < b.fpr : a.tpr < b.tpr;
    });
    RocCurve curve{std::move(points), 0.0};
    curve.auc = auc(curve);
    return curve;
}

void write_roc_csv(const RocCurve& curve, std::ostream& out) {
    out << "threshold,fpr,tpr\n";
    auto fmt = [](double v) -> std::string {
        if (std::isnan(v)) return "nan";
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    };
    for (const auto& p : curve.points) {
        out << fmt(p.threshold) << ',' << fmt(p.fpr) << ',' << fmt(p.tpr) << '\n';
    }
}

nlohmann::json to_json(const ConfusionCounts& c) {
    return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

nlohmann::json summary_json(const RocCurve& curve) {
    return {{"auc", curve.auc}, {"points", curve.points.size()}};
}

}  // namespace evdenoise
