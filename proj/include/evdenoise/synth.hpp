#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "evdenoise/event.hpp"

namespace evdenoise {

// Homogeneous Poisson noise, independent per pixel, random polarity.
struct ShotNoiseConfig {
    double rate_hz = 0.0;  // per pixel
    std::uint64_t seed = 1;
};

// Positive-only noise with a per-pixel rate drawn once from a log-normal
// distribution whose arithmetic mean is `mean_rate_hz`; `dispersion` is the
// log-space standard deviation.
struct LeakNoiseConfig {
    double mean_rate_hz = 0.0;
    double dispersion = 0.0;
    std::uint64_t seed = 2;
};

enum class EdgeOrientation { kVertical, kHorizontal };

// A bright bar sweeping across the frame. The leading edge emits positive
// events, the trailing edge (bar_width pixels behind) emits negative ones.
// A vertical edge is a column line moving towards +x; a horizontal edge is a
// row line moving towards +y. Position of the leading edge at time t is
// speed * (t - start_us) pixels.
struct MovingEdgeConfig {
    double speed = 100.0;  // pixels per second
    EdgeOrientation orientation = EdgeOrientation::kVertical;
    double event_rate_per_crossing = 1.0;  // mean events per pixel per edge crossing
    double bar_width = 8.0;                // pixels
    std::uint64_t start_us = 0;
    std::uint64_t seed = 3;
};

EventStream gen_shot_noise(SensorGeometry geometry, std::uint64_t duration_us,
                           const ShotNoiseConfig& config);
EventStream gen_leak_noise(SensorGeometry geometry, std::uint64_t duration_us,
                           const LeakNoiseConfig& config);
EventStream gen_moving_edge(SensorGeometry geometry, std::uint64_t duration_us,
                            const MovingEdgeConfig& config);

// Analytic position (pixels along the sweep axis) of the leading and trailing
// edges at time t.
double leading_edge_position(const MovingEdgeConfig& config, std::uint64_t t_us);
double trailing_edge_position(const MovingEdgeConfig& config, std::uint64_t t_us);

// Time at which the trailing edge leaves a frame of `extent` pixels.
std::uint64_t edge_exit_time_us(const MovingEdgeConfig& config, std::uint32_t extent);

// Expected number of signal events each edge config produces inside
// [0, duration_us); used to match noise counts to signal counts.
double expected_edge_events(SensorGeometry geometry, std::uint64_t duration_us,
                            const MovingEdgeConfig& config);

// Whole-scene recipe: any number of edges plus optional noise sources, merged
// signal-first. Serialized as JSON (see README for the schema).
struct SynthConfig {
    SensorGeometry geometry{346, 260};
    std::uint64_t duration_us = 1'000'000;
    std::vector<MovingEdgeConfig> edges;
    std::optional<ShotNoiseConfig> shot;
    std::optional<LeakNoiseConfig> leak;
};

EventStream synthesize(const SynthConfig& config);

// Expected signal events of all edges divided by pixels and seconds: the
// per-pixel shot rate that mixes noise 1:1 with the signal.
double matched_shot_rate(const SynthConfig& config);

// Denoising benchmark scene: a vertical and a horizontal bar (350 px/s, 4
// events per crossing, 8 px wide) over 1 s on 346 x 260, with shot noise at
// the matched rate. About 2.8e6 events.
SynthConfig benchmark_scene(std::uint64_t seed = 1);

void to_json(nlohmann::json& j, const SynthConfig& config);
void from_json(const nlohmann::json& j, SynthConfig& config);

}  // namespace evdenoise
