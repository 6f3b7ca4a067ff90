#include "evdenoise/baseline.hpp"

#include <cmath>
#include <string>

#include "evdenoise/errors.hpp"
#include "parallel.hpp"

namespace evdenoise {

namespace {

bool within(std::uint64_t stamp, std::uint64_t t, std::uint64_t tau_us) noexcept {
    return tau_us > 0 && stamp != Sae::kNever && stamp <= t && t - stamp <= tau_us;
}

}  // namespace

Sae::Sae(SensorGeometry geometry, bool polarity_split) : geometry_(geometry), split_(polarity_split) {
    geometry_.validate();
    stamps_.assign(geometry_.pixel_count() * (split_ ? 2 : 1), kNever);
}

int Sae::support(const Event& e, std::uint64_t tau_us) const noexcept {
    int count = 0;
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int x = e.x + dx;
            const int y = e.y + dy;
            if (!geometry_.contains(x, y)) continue;
            if (within(stamps_[index(x, y, e.p)], e.t, tau_us)) ++count;
        }
    }
    return count;
}

Decision baf_classify(Sae& sae, const Event& e, std::uint64_t tau_us) {
    return stcf_classify(sae, e, tau_us, 1);
}

Decision stcf_classify(Sae& sae, const Event& e, std::uint64_t tau_us, int k) {
    if (k < 1) throw ConfigError("STCF support count k must be >= 1");
    if (!sae.geometry().contains(e.x, e.y)) throw ValidationError("event outside the sensor");
    const Decision d = sae.support(e, tau_us) >= k ? Decision::kSignal : Decision::kNoise;
    sae.update(e);
    return d;
}

OnfMemory::OnfMemory(SensorGeometry geometry) : geometry_(geometry) {
    geometry_.validate();
    rows_.assign(2 * static_cast<std::size_t>(geometry_.height), Entry{});
    cols_.assign(2 * static_cast<std::size_t>(geometry_.width), Entry{});
}

bool OnfMemory::supported(const Event& e, std::uint64_t tau_us) const noexcept {
    for (const Entry& r : row(e.y)) {
        if (r.valid() && std::abs(int{r.coord} - int{e.x}) == 1 && within(r.t, e.t, tau_us)) return true;
    }
    for (const Entry& c : column(e.x)) {
        if (c.valid() && std::abs(int{c.coord} - int{e.y}) == 1 && within(c.t, e.t, tau_us)) return true;
    }
    return false;
}

void OnfMemory::update(const Event& e) noexcept {
    auto replace = [&](Entry* pair, std::uint16_t coord) {
        // Empty entries carry kNever and count as oldest.
        Entry* older = !pair[0].valid()   ? &pair[0]
                       : !pair[1].valid() ? &pair[1]
                       : pair[1].t < pair[0].t ? &pair[1]
                                               : &pair[0];
        *older = Entry{coord, e.t};
    };
    replace(rows_.data() + 2 * static_cast<std::size_t>(e.y), e.x);
    replace(cols_.data() + 2 * static_cast<std::size_t>(e.x), e.y);
}

Decision onf_classify(OnfMemory& mem, const Event& e, std::uint64_t tau_us) {
    if (!mem.geometry().contains(e.x, e.y)) throw ValidationError("event outside the sensor");
    const Decision d = mem.supported(e, tau_us) ? Decision::kSignal : Decision::kNoise;
    mem.update(e);
    return d;
}

FilterKind parse_filter_kind(std::string_view name) {
    if (name == "baf") return FilterKind::kBaf;
    if (name == "stcf") return FilterKind::kStcf;
    if (name == "onf") return FilterKind::kOnf;
    throw ConfigError("unknown baseline filter '" + std::string(name) + "'");
}

std::string_view to_string(FilterKind kind) {
    switch (kind) {
        case FilterKind::kBaf:
            return "baf";
        case FilterKind::kStcf:
            return "stcf";
        case FilterKind::kOnf:
            return "onf";
    }
    return "?";
}

namespace {

template <typename Sink>
void replay(FilterKind kind, const EventStream& stream, std::uint64_t tau_us, const BaselineOptions& options,
            Sink&& sink) {
    switch (kind) {
        case FilterKind::kBaf:
        case FilterKind::kStcf: {
            const int k = kind == FilterKind::kBaf ? 1 : options.k;
            Sae sae(stream.geometry(), options.polarity_split);
            for (std::size_t i = 0; i < stream.size(); ++i) sink(i, stcf_classify(sae, stream[i], tau_us, k));
            break;
        }
        case FilterKind::kOnf: {
            OnfMemory mem(stream.geometry());
            for (std::size_t i = 0; i < stream.size(); ++i) sink(i, onf_classify(mem, stream[i], tau_us));
            break;
        }
    }
}

}  // namespace

std::vector<Decision> run_filter(FilterKind kind, const EventStream& stream, std::uint64_t tau_us,
                                 const BaselineOptions& options) {
    std::vector<Decision> out(stream.size());
    replay(kind, stream, tau_us, options, [&](std::size_t i, Decision d) { out[i] = d; });
    return out;
}

ConfusionCounts evaluate_filter(FilterKind kind, const EventStream& stream, std::uint64_t tau_us,
                                const BaselineOptions& options) {
    if (!stream.fully_labeled()) throw ValidationError("stream contains unlabeled events");
    ConfusionCounts c;
    replay(kind, stream, tau_us, options, [&](std::size_t i, Decision d) {
        if (i < options.score_from) return;
        const bool signal = stream[i].label == Label::kSignal;
        if (d == Decision::kSignal) {
            (signal ? c.tp : c.fp) += 1;
        } else {
            (signal ? c.fn : c.tn) += 1;
        }
    });
    return c;
}

std::vector<std::uint64_t> default_tau_grid(int points) {
    if (points < 2) throw ConfigError("tau grid needs at least two points");
    std::vector<std::uint64_t> taus;
    const double lo = std::log10(100.0);
    const double hi = std::log10(1'000'000.0);
    for (int i = 0; i < points; ++i) {
        const double exponent = lo + (hi - lo) * i / (points - 1);
        taus.push_back(static_cast<std::uint64_t>(std::llround(std::pow(10.0, exponent))));
    }
    return taus;
}

RocCurve roc_by_tau(FilterKind kind, const EventStream& stream, std::span<const std::uint64_t> taus,
                    const BaselineOptions& options) {
    if (!stream.fully_labeled()) throw ValidationError("stream contains unlabeled events");
    std::vector<RocPoint> points(taus.size());
    detail::parallel_chunks(taus.size(), taus.size(), [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t i = b; i < e; ++i) {
            const auto c = evaluate_filter(kind, stream, taus[i], options);
            points[i] = {static_cast<double>(taus[i]), c.fpr(), c.tpr()};
        }
    });
    return roc_from_points(std::move(points));
}

}  // namespace evdenoise
