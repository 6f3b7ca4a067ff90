#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "evdenoise/event.hpp"
#include "evdenoise/metrics.hpp"
#include "evdenoise/snn.hpp"

namespace evdenoise {

// Surface of active events: latest timestamp per pixel. Polarity-agnostic
// by default; with `polarity_split` each polarity keeps its own surface and
// support is only drawn from the event's own polarity.
class Sae {
public:
    static constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

    explicit Sae(SensorGeometry geometry, bool polarity_split = false);

    const SensorGeometry& geometry() const noexcept { return geometry_; }
    bool polarity_split() const noexcept { return split_; }

    std::uint64_t last(int x, int y, Polarity p = Polarity::kPositive) const noexcept {
        return stamps_[index(x, y, p)];
    }
    void update(const Event& e) noexcept { stamps_[index(e.x, e.y, e.p)] = e.t; }

    // Neighbours in the 3x3 window (centre excluded) with an event in
    // [e.t - tau_us, e.t]. Always 0 when tau_us == 0.
    int support(const Event& e, std::uint64_t tau_us) const noexcept;

private:
    std::size_t index(int x, int y, Polarity p) const noexcept {
        const std::size_t plane = split_ && p == Polarity::kNegative ? geometry_.pixel_count() : 0;
        return plane + static_cast<std::size_t>(y) * geometry_.width + static_cast<std::size_t>(x);
    }
    SensorGeometry geometry_;
    bool split_;
    std::vector<std::uint64_t> stamps_;
};

// Check support first, then write the event into the surface.
Decision baf_classify(Sae& sae, const Event& e, std::uint64_t tau_us);
Decision stcf_classify(Sae& sae, const Event& e, std::uint64_t tau_us, int k);

// Two (coordinate, timestamp) slots per row and per column. Row entries
// hold the column of the stored event, column entries its row.
class OnfMemory {
public:
    struct Entry {
        std::uint16_t coord = 0;
        std::uint64_t t = Sae::kNever;
        bool valid() const noexcept { return t != Sae::kNever; }
    };

    explicit OnfMemory(SensorGeometry geometry);

    const SensorGeometry& geometry() const noexcept { return geometry_; }
    std::span<const Entry, 2> row(int y) const noexcept {
        return std::span<const Entry, 2>(rows_.data() + 2 * static_cast<std::size_t>(y), 2);
    }
    std::span<const Entry, 2> column(int x) const noexcept {
        return std::span<const Entry, 2>(cols_.data() + 2 * static_cast<std::size_t>(x), 2);
    }

    // Support test against the event's own row and column memories: an entry
    // one pixel away (not the same pixel) seen within tau_us.
    bool supported(const Event& e, std::uint64_t tau_us) const noexcept;

    // Replaces the older entry (an empty one first) in the row and column.
    void update(const Event& e) noexcept;

private:
    SensorGeometry geometry_;
    std::vector<Entry> rows_;
    std::vector<Entry> cols_;
};

Decision onf_classify(OnfMemory& mem, const Event& e, std::uint64_t tau_us);

enum class FilterKind { kBaf, kStcf, kOnf };

FilterKind parse_filter_kind(std::string_view name);
std::string_view to_string(FilterKind kind);

struct BaselineOptions {
    int k = 4;  // STCF support count
    bool polarity_split = false;
    // Events before this index still update filter state but are left out
    // of the counts (evaluation on a trailing split).
    std::size_t score_from = 0;
};

// Fresh replay of the whole stream at one tau.
std::vector<Decision> run_filter(FilterKind kind, const EventStream& stream, std::uint64_t tau_us,
                                 const BaselineOptions& options = {});

// Same replay, counting outcomes against the labels. Throws ValidationError
// on unlabeled events.
ConfusionCounts evaluate_filter(FilterKind kind, const EventStream& stream, std::uint64_t tau_us,
                                const BaselineOptions& options = {});

// `points` log-spaced taus from 100 us to 1 s, rounded to whole microseconds.
std::vector<std::uint64_t> default_tau_grid(int points = 25);

// One operating point per tau (threshold = tau), plus the (0, 0) and (1, 1)
// endpoints. Taus are replayed in parallel, each with its own state.
RocCurve roc_by_tau(FilterKind kind, const EventStream& stream, std::span<const std::uint64_t> taus,
                    const BaselineOptions& options = {});

}  // namespace evdenoise
