#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace evdenoise {

enum class Polarity : std::uint8_t { kNegative = 0, kPositive = 1 };

// Numeric values match the on-disk encoding.
enum class Label : std::uint8_t { kNoise = 0, kSignal = 1, kUnlabeled = 2 };

struct SensorGeometry {
    std::uint16_t width = 0;
    std::uint16_t height = 0;

    // Throws ConfigError unless width >= 1 and height >= 1.
    void validate() const;

    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width) * height;
    }
    bool contains(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width && y < height;
    }

    friend bool operator==(const SensorGeometry&, const SensorGeometry&) = default;
};

struct Event {
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    std::uint64_t t = 0;  // microseconds
    Polarity p = Polarity::kPositive;
    Label label = Label::kUnlabeled;

    friend bool operator==(const Event&, const Event&) = default;
};

// A validated, time-ordered sequence of events on a fixed sensor. Immutable
// once constructed.
class EventStream {
public:
    EventStream() = default;

    // Throws ValidationError for out-of-bounds coordinates and OrderingError
    // for decreasing timestamps.
    EventStream(SensorGeometry geometry, std::vector<Event> events);

    const SensorGeometry& geometry() const noexcept { return geometry_; }
    std::span<const Event> events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }
    bool empty() const noexcept { return events_.empty(); }
    const Event& operator[](std::size_t i) const { return events_[i]; }

    auto begin() const noexcept { return events_.begin(); }
    auto end() const noexcept { return events_.end(); }

    // True when every event carries a signal/noise label.
    bool fully_labeled() const noexcept;

    friend bool operator==(const EventStream&, const EventStream&) = default;

private:
    SensorGeometry geometry_{};
    std::vector<Event> events_;
};

// Stable merge by timestamp; on equal timestamps events from `a` come first.
EventStream merge_streams(const EventStream& a, const EventStream& b);

}  // namespace evdenoise
