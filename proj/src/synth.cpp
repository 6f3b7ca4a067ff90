#include "evdenoise/synth.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "evdenoise/errors.hpp"
#include "evdenoise/rng.hpp"

namespace evdenoise {

namespace {

void require_duration(std::uint64_t duration_us) {
    if (duration_us == 0) throw ConfigError("duration_us must be positive");
}

// Superposition of independent per-pixel Poisson processes with rates
// `cumulative` (prefix sums). Equivalent to one process at the total rate with
// each arrival assigned to a pixel proportionally to its rate.
template <typename PolarityFn>
std::vector<Event> superposed_poisson(SensorGeometry g, std::uint64_t duration_us,
                                      double total_rate_hz,
                                      const std::vector<double>* cumulative, CounterRng& rng,
                                      PolarityFn&& polarity) {
    std::vector<Event> events;
    if (total_rate_hz <= 0.0) return events;
    const double duration_s = static_cast<double>(duration_us) * 1e-6;
    events.reserve(static_cast<std::size_t>(total_rate_hz * duration_s * 1.05) + 16);
    double t = 0.0;
    const std::uint64_t pixels = g.pixel_count();
    while (true) {
        t += rng.exponential(total_rate_hz);
        if (t >= duration_s) break;
        std::uint64_t idx;
        if (cumulative == nullptr) {
            idx = rng.below(pixels);
        } else {
            const double target = rng.uniform() * cumulative->back();
            idx = static_cast<std::uint64_t>(
                std::upper_bound(cumulative->begin(), cumulative->end(), target) -
                cumulative->begin());
            idx = std::min<std::uint64_t>(idx, pixels - 1);
        }
        auto t_us = static_cast<std::uint64_t>(t * 1e6);
        t_us = std::min(t_us, duration_us - 1);
        events.push_back(Event{static_cast<std::uint16_t>(idx % g.width),
                               static_cast<std::uint16_t>(idx / g.width), t_us, polarity(rng),
                               Label::kNoise});
    }
    return events;
}

std::uint32_t sweep_extent(SensorGeometry g, EdgeOrientation o) {
    return o == EdgeOrientation::kVertical ? g.width : g.height;
}

std::uint32_t line_length(SensorGeometry g, EdgeOrientation o) {
    return o == EdgeOrientation::kVertical ? g.height : g.width;
}

// Time (fractional microseconds) at which the leading edge reaches `pos`.
double crossing_time_us(const MovingEdgeConfig& c, double pos) {
    return static_cast<double>(c.start_us) + pos * 1e6 / c.speed;
}

void validate_edge(const MovingEdgeConfig& c) {
    if (!(c.speed > 0.0)) throw ConfigError("moving edge speed must be positive");
    if (c.event_rate_per_crossing < 0.0) throw ConfigError("event_rate_per_crossing must be >= 0");
    if (c.bar_width < 0.0) throw ConfigError("bar_width must be >= 0");
}

}  // namespace

EventStream gen_shot_noise(SensorGeometry geometry, std::uint64_t duration_us,
                           const ShotNoiseConfig& config) {
    geometry.validate();
    require_duration(duration_us);
    if (config.rate_hz < 0.0) throw ConfigError("shot noise rate must be >= 0");
    CounterRng rng(config.seed, 0x5407);
    const double total = config.rate_hz * static_cast<double>(geometry.pixel_count());
    auto events = superposed_poisson(geometry, duration_us, total, nullptr, rng, [](CounterRng& r) {
        return r.coin() ? Polarity::kPositive : Polarity::kNegative;
    });
    return EventStream(geometry, std::move(events));
}

EventStream gen_leak_noise(SensorGeometry geometry, std::uint64_t duration_us,
                           const LeakNoiseConfig& config) {
    geometry.validate();
    require_duration(duration_us);
    if (config.mean_rate_hz < 0.0) throw ConfigError("leak noise rate must be >= 0");
    if (config.dispersion < 0.0) throw ConfigError("leak noise dispersion must be >= 0");
    CounterRng rng(config.seed, 0x1EA4);
    const double sigma = config.dispersion;
    std::vector<double> cumulative(geometry.pixel_count());
    double acc = 0.0;
    for (double& c : cumulative) {
        const double factor = sigma == 0.0 ? 1.0 : std::exp(sigma * rng.normal() - 0.5 * sigma * sigma);
        acc += config.mean_rate_hz * factor;
        c = acc;
    }
    auto events = superposed_poisson(geometry, duration_us, acc, &cumulative, rng,
                                     [](CounterRng&) { return Polarity::kPositive; });
    return EventStream(geometry, std::move(events));
}

double leading_edge_position(const MovingEdgeConfig& config, std::uint64_t t_us) {
    const double dt = static_cast<double>(t_us) - static_cast<double>(config.start_us);
    return config.speed * dt * 1e-6;
}

double trailing_edge_position(const MovingEdgeConfig& config, std::uint64_t t_us) {
    return leading_edge_position(config, t_us) - config.bar_width;
}

std::uint64_t edge_exit_time_us(const MovingEdgeConfig& config, std::uint32_t extent) {
    validate_edge(config);
    return static_cast<std::uint64_t>(
        std::ceil(crossing_time_us(config, static_cast<double>(extent) + config.bar_width)));
}

double expected_edge_events(SensorGeometry geometry, std::uint64_t duration_us,
                            const MovingEdgeConfig& config) {
    validate_edge(config);
    const std::uint32_t extent = sweep_extent(geometry, config.orientation);
    const double pixels = line_length(geometry, config.orientation);
    double total = 0.0;
    for (const double lag : {0.0, config.bar_width}) {
        for (std::uint32_t c = 0; c < extent; ++c) {
            const double t0 = crossing_time_us(config, c + lag);
            const double t1 = crossing_time_us(config, c + lag + 1.0);
            const double inside = std::clamp(static_cast<double>(duration_us), t0, t1) - t0;
            total += pixels * config.event_rate_per_crossing * inside / (t1 - t0);
        }
    }
    return total;
}

EventStream gen_moving_edge(SensorGeometry geometry, std::uint64_t duration_us,
                            const MovingEdgeConfig& config) {
    geometry.validate();
    require_duration(duration_us);
    validate_edge(config);
    CounterRng rng(config.seed, 0xED6E);
    const std::uint32_t extent = sweep_extent(geometry, config.orientation);
    const std::uint32_t length = line_length(geometry, config.orientation);
    const bool vertical = config.orientation == EdgeOrientation::kVertical;

    std::vector<Event> events;
    const struct {
        double lag;
        Polarity polarity;
    } edges[] = {{0.0, Polarity::kPositive}, {config.bar_width, Polarity::kNegative}};
    for (const auto& edge : edges) {
        for (std::uint32_t c = 0; c < extent; ++c) {
            if (crossing_time_us(config, c + edge.lag) >= static_cast<double>(duration_us)) break;
            for (std::uint32_t along = 0; along < length; ++along) {
                const auto count = rng.poisson(config.event_rate_per_crossing);
                for (std::uint64_t k = 0; k < count; ++k) {
                    const double pos = c + edge.lag + rng.uniform();
                    const auto t = static_cast<std::uint64_t>(crossing_time_us(config, pos));
                    if (t >= duration_us) continue;
                    const auto line = static_cast<std::uint16_t>(c);
                    const auto other = static_cast<std::uint16_t>(along);
                    events.push_back(Event{vertical ? line : other, vertical ? other : line, t,
                                           edge.polarity, Label::kSignal});
                }
            }
        }
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        return std::tie(a.t, a.y, a.x, a.p) < std::tie(b.t, b.y, b.x, b.p);
    });
    return EventStream(geometry, std::move(events));
}

EventStream synthesize(const SynthConfig& config) {
    config.geometry.validate();
    require_duration(config.duration_us);
    EventStream out(config.geometry, {});
    for (const auto& edge : config.edges) {
        out = merge_streams(out, gen_moving_edge(config.geometry, config.duration_us, edge));
    }
    if (config.shot) {
        out = merge_streams(out, gen_shot_noise(config.geometry, config.duration_us, *config.shot));
    }
    if (config.leak) {
        out = merge_streams(out, gen_leak_noise(config.geometry, config.duration_us, *config.leak));
    }
    return out;
}

double matched_shot_rate(const SynthConfig& config) {
    config.geometry.validate();
    require_duration(config.duration_us);
    double signal = 0.0;
    for (const auto& e : config.edges) signal += expected_edge_events(config.geometry, config.duration_us, e);
    return signal / static_cast<double>(config.geometry.pixel_count()) /
           (static_cast<double>(config.duration_us) * 1e-6);
}

SynthConfig benchmark_scene(std::uint64_t seed) {
    SynthConfig c;
    c.geometry = {346, 260};
    c.duration_us = 1'000'000;
    MovingEdgeConfig vertical;
    vertical.speed = 350.0;
    vertical.event_rate_per_crossing = 4.0;
    vertical.bar_width = 8.0;
    vertical.seed = seed * 7 + 1;
    MovingEdgeConfig horizontal = vertical;
    horizontal.orientation = EdgeOrientation::kHorizontal;
    horizontal.start_us = 250'000;
    horizontal.seed = seed * 7 + 2;
    c.edges = {vertical, horizontal};
    c.shot = ShotNoiseConfig{matched_shot_rate(c), seed * 7 + 3};
    return c;
}

void to_json(nlohmann::json& j, const SynthConfig& c) {
    j = nlohmann::json{{"rng", CounterRng::kAlgorithm},
                       {"width", c.geometry.width},
                       {"height", c.geometry.height},
                       {"duration_us", c.duration_us}};
    auto edges = nlohmann::json::array();
    for (const auto& e : c.edges) {
        edges.push_back({{"speed", e.speed},
                         {"orientation",
                          e.orientation == EdgeOrientation::kVertical ? "vertical" : "horizontal"},
                         {"event_rate_per_crossing", e.event_rate_per_crossing},
                         {"bar_width", e.bar_width},
                         {"start_us", e.start_us},
                         {"seed", e.seed}});
    }
    j["edges"] = edges;
    if (c.shot) j["shot"] = {{"rate_hz", c.shot->rate_hz}, {"seed", c.shot->seed}};
    if (c.leak) {
        j["leak"] = {{"mean_rate_hz", c.leak->mean_rate_hz},
                     {"dispersion", c.leak->dispersion},
                     {"seed", c.leak->seed}};
    }
}

void from_json(const nlohmann::json& j, SynthConfig& c) {
    c = SynthConfig{};
    if (j.contains("rng") && j.at("rng").get<std::string>() != CounterRng::kAlgorithm) {
        throw ConfigError("unsupported rng '" + j.at("rng").get<std::string>() + "'");
    }
    c.geometry.width = j.value("width", c.geometry.width);
    c.geometry.height = j.value("height", c.geometry.height);
    c.duration_us = j.value("duration_us", c.duration_us);
    if (j.contains("edges")) {
        for (const auto& je : j.at("edges")) {
            MovingEdgeConfig e;
            e.speed = je.value("speed", e.speed);
            const std::string orient = je.value("orientation", std::string("vertical"));
            if (orient == "vertical") {
                e.orientation = EdgeOrientation::kVertical;
            } else if (orient == "horizontal") {
                e.orientation = EdgeOrientation::kHorizontal;
            } else {
                throw ConfigError("edge orientation must be vertical or horizontal");
            }
            e.event_rate_per_crossing = je.value("event_rate_per_crossing", e.event_rate_per_crossing);
            e.bar_width = je.value("bar_width", e.bar_width);
            e.start_us = je.value("start_us", e.start_us);
            e.seed = je.value("seed", e.seed);
            c.edges.push_back(e);
        }
    }
    if (j.contains("shot") && !j.at("shot").is_null()) {
        ShotNoiseConfig s;
        s.rate_hz = j.at("shot").value("rate_hz", s.rate_hz);
        s.seed = j.at("shot").value("seed", s.seed);
        c.shot = s;
    }
    if (j.contains("leak") && !j.at("leak").is_null()) {
        LeakNoiseConfig l;
        l.mean_rate_hz = j.at("leak").value("mean_rate_hz", l.mean_rate_hz);
        l.dispersion = j.at("leak").value("dispersion", l.dispersion);
        l.seed = j.at("leak").value("seed", l.seed);
        c.leak = l;
    }
}

}  // namespace evdenoise
