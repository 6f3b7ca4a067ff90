#include "evdenoise/event.hpp"

#include <algorithm>
#include <string>

#include "evdenoise/errors.hpp"

namespace evdenoise {

void SensorGeometry::validate() const {
    if (width < 1 || height < 1) {
        throw ConfigError("sensor geometry must be at least 1x1, got " + std::to_string(width) +
                          "x" + std::to_string(height));
    }
}

EventStream::EventStream(SensorGeometry geometry, std::vector<Event> events)
    : geometry_(geometry), events_(std::move(events)) {
    geometry_.validate();
    for (std::size_t i = 0; i < events_.size(); ++i) {
        const Event& e = events_[i];
        if (e.x >= geometry_.width || e.y >= geometry_.height) {
            throw ValidationError("event " + std::to_string(i) + " at (" + std::to_string(e.x) +
                                  "," + std::to_string(e.y) + ") lies outside " +
                                  std::to_string(geometry_.width) + "x" +
                                  std::to_string(geometry_.height));
        }
        if (static_cast<std::uint8_t>(e.p) > 1) {
            throw ValidationError("event " + std::to_string(i) + " has invalid polarity");
        }
        if (static_cast<std::uint8_t>(e.label) > 2) {
            throw ValidationError("event " + std::to_string(i) + " has invalid label");
        }
        if (i > 0 && e.t < events_[i - 1].t) {
            throw OrderingError("timestamp decreases at event " + std::to_string(i) + ": " +
                                std::to_string(events_[i - 1].t) + " -> " + std::to_string(e.t));
        }
    }
}

bool EventStream::fully_labeled() const noexcept {
    return std::none_of(events_.begin(), events_.end(),
                        [](const Event& e) { return e.label == Label::kUnlabeled; });
}

EventStream merge_streams(const EventStream& a, const EventStream& b) {
    if (!(a.geometry() == b.geometry())) {
        throw ConfigError("cannot merge streams with different geometries");
    }
    std::vector<Event> out;
    out.reserve(a.size() + b.size());
    // std::merge takes from the first range on ties.
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out),
               [](const Event& l, const Event& r) { return l.t < r.t; });
    return EventStream(a.geometry(), std::move(out));
}

}  // namespace evdenoise
