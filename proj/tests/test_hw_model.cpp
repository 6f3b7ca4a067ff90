#include <sstream>

#include "doctest.h"

#include "evdenoise/errors.hpp"
#include "evdenoise/hw_model.hpp"

using namespace evdenoise;

TEST_CASE("pipeline timing") {
    PipelineConfig p;
    CHECK(latency_cycles(p) == 9);
    CHECK(cycles_per_event(p) == 1);
    CHECK(throughput_meps(p, 400e6) == doctest::Approx(400.0));
    p.mode = PipelineConfig::Mode::kSerial;
    CHECK(cycles_per_event(p) == 9);
    CHECK(throughput_meps(p, 400e6) == doctest::Approx(44.444).epsilon(1e-4));
    p.accounting = PipelineConfig::SerialAccounting::kFpga;
    CHECK(cycles_per_event(p) == 10);
    CHECK(throughput_meps(p, 100e6) == doctest::Approx(10.0));
    p.n_ebbi = 1;
    CHECK(latency_cycles(p) == 8);
    p.n_ebbi = 6;
    CHECK(latency_cycles(p) == 13);
    p.n_ebbi = 0;
    CHECK_THROWS_AS(latency_cycles(p), ConfigError);
}

TEST_CASE("memory footprint") {
    CHECK(memory_bits({346, 260}, 2) == 539760);
    CHECK(memory_bits({1, 1}, 2) == 6);
    CHECK(memory_bits({1280, 960}, 2) == 7372800);
    CHECK(memory_bits({640, 480}, 5) == 12ull * 640 * 480);
    CHECK(filter_memory_bits(HwFilter::kSnnf, {346, 260}) == 539760);
    CHECK(filter_memory_bits(HwFilter::kBaf, {346, 260}) == 32ull * 346 * 260);
    CHECK(filter_memory_bits(HwFilter::kStcf, {346, 260}) == 32ull * 346 * 260);
    CHECK(filter_memory_bits(HwFilter::kOnf, {346, 260}) == 64ull * (346 + 260));
    CHECK(parse_hw_filter("onf") == HwFilter::kOnf);
    CHECK(to_string(HwFilter::kSnnf) == "snnf");
    CHECK_THROWS_AS(parse_hw_filter("x"), ConfigError);
}

TEST_CASE("operation energy model") {
    const SensorGeometry g{346, 260};
    const auto ops = op_counts(HwFilter::kSnnf, g);
    CHECK(ops.reads == 10);
    CHECK(ops.read_bits == 4);
    CHECK(ops.adds == 2ull * 25 * 30 * 2 + 30);
    CHECK(ops.compares == 30ull * 2 + 1);
    CHECK(ops.multiplies == 0);
    const auto baf = op_counts(HwFilter::kBaf, g);
    CHECK(baf.reads == 8);
    CHECK(baf.writes == 1);
    CHECK(baf.read_depth == 346ull * 260);
    const auto onf = op_counts(HwFilter::kOnf, g);
    CHECK(onf.reads == 4);
    CHECK(onf.writes == 2);

    CostTable zero{0, 0, 0, 0, 0};
    for (auto f : {HwFilter::kSnnf, HwFilter::kBaf, HwFilter::kStcf, HwFilter::kOnf}) {
        CHECK(energy_per_event_pj(f, g, zero) == 0.0);
        CHECK(energy_per_event_pj(f, g, CostTable{}) > 0.0);
    }
    CostTable only_add{0, 0, 1, 0, 0};
    CHECK(energy_pj(ops, only_add) == doctest::Approx(static_cast<double>(ops.adds)));
    CostTable reads{1, 0, 0, 0, 0};
    CHECK(reads.read_pj(4, 1024) == doctest::Approx(40.0));
    // costlier per-op costs never lower the total
    CostTable costly = CostTable{};
    costly.add_pj *= 2;
    CHECK(energy_per_event_pj(HwFilter::kSnnf, g, costly) > energy_per_event_pj(HwFilter::kSnnf, g, CostTable{}));
    CostTable negative{};
    negative.compare_pj = -1;
    CHECK_THROWS_AS(negative.validate(), ConfigError);
}

TEST_CASE("power model") {
    const PowerSpec spec;
    CHECK(energy_per_event_nj(spec, 9) == doctest::Approx(1.468).epsilon(1e-3));
    CHECK(power_total_mw(spec, 9, 1e6) == doctest::Approx(1.480).epsilon(1e-3));
    CHECK(power_total_mw(spec, 9, 0.0) == doctest::Approx(0.012));
    CHECK(power_total_mw(spec, 9, 2e6) > power_total_mw(spec, 9, 1e6));
    CHECK(power_total_mw(spec, 10, 1e6) > power_total_mw(spec, 9, 1e6));
}

TEST_CASE("report and sweep") {
    HwReportConfig cfg;
    const auto j = hw_report(cfg);
    CHECK(j.at("memory_bits") == 539760);
    CHECK(j.at("latency_cycles") == 9);
    CHECK(j.at("serial_cycles_per_event") == 9);
    CHECK(j.at("energy_pj_per_event").contains("onf"));
    CHECK(j.at("energy_nj_per_event").get<double>() == doctest::Approx(1.468).epsilon(1e-3));
    const auto back = j.at("config").get<HwReportConfig>();
    CHECK(hw_report(back) == j);

    std::ostringstream csv;
    const auto geoms = default_sweep_geometries();
    write_hw_sweep_csv(cfg, geoms, csv);
    std::size_t lines = 0;
    for (char c : csv.str()) lines += c == '\n';
    CHECK(lines == geoms.size() + 1);
    CHECK(csv.str().find("346,260,539760,") != std::string::npos);
}
