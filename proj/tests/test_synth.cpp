#include <cmath>

#include "doctest.h"

#include "evdenoise/errors.hpp"
#include "evdenoise/rng.hpp"
#include "evdenoise/synth.hpp"

using namespace evdenoise;

TEST_CASE("splitmix64 matches the reference sequence") {
    // First outputs of the reference generator seeded with 1234567.
    std::uint64_t state = 1234567;
    auto ref_next = [&] {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    };
    CHECK(ref_next() == 6457827717110365317ull);
    CHECK(ref_next() == 3203168211198807973ull);
    CHECK(splitmix64(1234567) == 6457827717110365317ull);
}

TEST_CASE("shot noise") {
    const SensorGeometry g{100, 100};
    CHECK(gen_shot_noise(g, 1'000'000, {0.0, 1}).empty());
    const auto s = gen_shot_noise(g, 1'000'000, {1.0, 5});
    // Poisson count with mean 10^4, sigma 100
    CHECK(std::abs(static_cast<double>(s.size()) - 10'000.0) <= 400.0);
    std::size_t positive = 0;
    for (const auto& e : s) {
        CHECK(e.label == Label::kNoise);
        CHECK(e.t < 1'000'000);
        positive += e.p == Polarity::kPositive;
    }
    CHECK(std::abs(static_cast<double>(positive) / s.size() - 0.5) < 0.03);
    CHECK(gen_shot_noise(g, 1'000'000, {1.0, 5}) == s);
    CHECK_FALSE(gen_shot_noise(g, 1'000'000, {1.0, 6}) == s);
    CHECK_THROWS_AS(gen_shot_noise(g, 0, {1.0, 5}), ConfigError);
    CHECK_THROWS_AS(gen_shot_noise(g, 10, {-1.0, 5}), ConfigError);
}

TEST_CASE("leak noise") {
    const SensorGeometry g{50, 40};
    const auto s = gen_leak_noise(g, 2'000'000, {2.0, 0.0, 3});
    CHECK(std::abs(static_cast<double>(s.size()) - 8000.0) <= 4 * std::sqrt(8000.0));
    for (const auto& e : s) {
        CHECK(e.p == Polarity::kPositive);
        CHECK(e.label == Label::kNoise);
    }
    // dispersion keeps the mean rate but spreads it across pixels
    const auto d = gen_leak_noise(g, 2'000'000, {2.0, 1.0, 3});
    CHECK(std::abs(static_cast<double>(d.size()) - 8000.0) < 1500.0);
    std::vector<int> per_pixel(g.pixel_count(), 0), flat(g.pixel_count(), 0);
    for (const auto& e : d) ++per_pixel[e.y * g.width + e.x];
    for (const auto& e : s) ++flat[e.y * g.width + e.x];
    auto var = [](const std::vector<int>& v) {
        double m = 0, q = 0;
        for (int c : v) m += c;
        m /= v.size();
        for (int c : v) q += (c - m) * (c - m);
        return q / v.size();
    };
    CHECK(var(per_pixel) > 2 * var(flat));
}

TEST_CASE("moving edge") {
    const SensorGeometry g{64, 48};
    MovingEdgeConfig c;
    c.speed = 200;
    c.event_rate_per_crossing = 2;
    c.bar_width = 4;
    const std::uint64_t duration = edge_exit_time_us(c, g.width) + 1000;
    const auto s = gen_moving_edge(g, duration, c);
    const double expected = expected_edge_events(g, duration, c);
    CHECK(expected == doctest::Approx(2.0 * 2 * 64 * 48));
    CHECK(std::abs(static_cast<double>(s.size()) - expected) < 4 * std::sqrt(expected));
    for (const auto& e : s) {
        CHECK(e.label == Label::kSignal);
        // events sit on the edge that emitted them
        const double lead = leading_edge_position(c, e.t);
        const double trail = trailing_edge_position(c, e.t);
        const double pos = e.x;
        if (e.p == Polarity::kPositive) {
            CHECK(lead >= pos - 1e-3);
            CHECK(lead <= pos + 1.0 + 1e-2);
        } else {
            CHECK(trail >= pos - 1e-3);
            CHECK(trail <= pos + 1.0 + 1e-2);
        }
    }
    MovingEdgeConfig h = c;
    h.orientation = EdgeOrientation::kHorizontal;
    const auto sh = gen_moving_edge(g, duration, h);
    for (const auto& e : sh) {
        if (e.p == Polarity::kPositive) CHECK(leading_edge_position(h, e.t) >= e.y - 1e-3);
    }
    c.speed = 0;
    CHECK_THROWS_AS(gen_moving_edge(g, duration, c), ConfigError);
}

TEST_CASE("synth config json round trip and the benchmark scene") {
    const SynthConfig scene = benchmark_scene(3);
    const nlohmann::json j = scene;
    const auto back = j.get<SynthConfig>();
    CHECK(nlohmann::json(back) == j);
    CHECK(j.at("rng") == "splitmix64");
    REQUIRE(scene.shot.has_value());
    CHECK(scene.shot->rate_hz == doctest::Approx(matched_shot_rate(scene)));
    nlohmann::json bad = j;
    bad["rng"] = "mt19937";
    CHECK_THROWS_AS(bad.get<SynthConfig>(), ConfigError);
}

TEST_CASE("synthesize merges signal before noise on ties and is deterministic") {
    SynthConfig c;
    c.geometry = {32, 24};
    c.duration_us = 200'000;
    MovingEdgeConfig e;
    e.speed = 300;
    c.edges = {e};
    c.shot = ShotNoiseConfig{5.0, 9};
    const auto a = synthesize(c);
    const auto b = synthesize(c);
    CHECK(a == b);
    std::size_t signal = 0;
    for (const auto& ev : a) signal += ev.label == Label::kSignal;
    CHECK(signal > 0);
    CHECK(signal < a.size());
}
