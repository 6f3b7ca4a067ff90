#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "evdenoise/event.hpp"

namespace evdenoise {

// Per-event datapath: address (1) + patch fetch (2) + FCSNN (n_ebbi + 3) +
// compare (1).
struct PipelineConfig {
    enum class Mode { kPipelined, kSerial };
    // Serial accounting: ASIC counts the pipeline latency, FPGA one extra
    // cycle per event.
    enum class SerialAccounting { kAsic, kFpga };

    int n_ebbi = 2;
    Mode mode = Mode::kPipelined;
    SerialAccounting accounting = SerialAccounting::kAsic;

    static constexpr int kAddressCycles = 1;
    static constexpr int kPatchCycles = 2;
    static constexpr int kCompareCycles = 1;
    int fcsnn_cycles() const noexcept { return n_ebbi + 3; }
};

// Throws ConfigError for n_ebbi < 1.
int latency_cycles(const PipelineConfig& cfg);
// Cycles between successive events: 1 pipelined, latency (ASIC) or
// latency + 1 (FPGA) when serial.
int cycles_per_event(const PipelineConfig& cfg);
double throughput_meps(const PipelineConfig& cfg, double f_clk_hz);

// 2 (n_ebbi + 1) W H
std::uint64_t memory_bits(SensorGeometry geometry, int n_ebbi);

enum class HwFilter { kSnnf, kBaf, kStcf, kOnf };
HwFilter parse_hw_filter(std::string_view name);
std::string_view to_string(HwFilter f);

// SNNF as above; BAF/STCF 32-bit timestamp per pixel; ONF two 32-bit words
// per row and per column.
std::uint64_t filter_memory_bits(HwFilter filter, SensorGeometry geometry, int n_ebbi = 2);

// Operation energies in pJ. The defaults are placeholders of the right order
// of magnitude for a 45 nm process, not measured values.
struct CostTable {
    // Read/write cost = per_bit * word_bits * log2(array depth).
    double read_pj_per_bit = 0.02;
    double write_pj_per_bit = 0.02;
    double add_pj = 0.03;
    double multiply_pj = 0.2;
    double compare_pj = 0.03;

    void validate() const;
    double read_pj(int word_bits, std::uint64_t depth) const;
    double write_pj(int word_bits, std::uint64_t depth) const;
};

struct SnnfShape {
    int n_ebbi = 2;
    int patch = 5;
    int n_hidden = 30;
    int n_banks = 5;
    int word_bits = 4;
    int fetch_cycles = 2;  // reads per bank per patch
};

struct OpCounts {
    std::uint64_t reads = 0;
    int read_bits = 0;
    std::uint64_t read_depth = 1;
    std::uint64_t writes = 0;
    int write_bits = 0;
    std::uint64_t write_depth = 1;
    std::uint64_t adds = 0;
    std::uint64_t multiplies = 0;
    std::uint64_t compares = 0;
};

OpCounts op_counts(HwFilter filter, SensorGeometry geometry, const SnnfShape& shape = {});
double energy_pj(const OpCounts& ops, const CostTable& costs);
double energy_per_event_pj(HwFilter filter, SensorGeometry geometry, const CostTable& costs,
                           const SnnfShape& shape = {});

struct PowerSpec {
    double dynamic_power_mw = 65.24;
    double clock_hz = 400e6;
    double leakage_mw = 0.012;

    void validate() const;
};

// E = P / f * N
double energy_per_event_nj(const PowerSpec& spec, int cycles_per_event);
// E * rate + leakage
double power_total_mw(const PowerSpec& spec, int cycles_per_event, double event_rate_hz);

struct HwReportConfig {
    SensorGeometry geometry{346, 260};
    PipelineConfig pipeline{};
    SnnfShape shape{};
    CostTable costs{};
    PowerSpec power{};
    double event_rate_hz = 1e6;
};

nlohmann::json hw_report(const HwReportConfig& cfg);

// Per-geometry memory and energy rows.
std::vector<SensorGeometry> default_sweep_geometries();
void write_hw_sweep_csv(const HwReportConfig& cfg, std::span<const SensorGeometry> geometries, std::ostream& out);

void to_json(nlohmann::json& j, const HwReportConfig& cfg);
void from_json(const nlohmann::json& j, HwReportConfig& cfg);

}  // namespace evdenoise
