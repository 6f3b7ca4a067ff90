#include "evdenoise/hw_model.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "evdenoise/banked_memory.hpp"
#include "evdenoise/errors.hpp"

namespace evdenoise {

int latency_cycles(const PipelineConfig& cfg) {
    if (cfg.n_ebbi < 1) throw ConfigError("n_ebbi must be >= 1");
    return PipelineConfig::kAddressCycles + PipelineConfig::kPatchCycles + cfg.fcsnn_cycles() +
           PipelineConfig::kCompareCycles;
}

int cycles_per_event(const PipelineConfig& cfg) {
    const int latency = latency_cycles(cfg);
    if (cfg.mode == PipelineConfig::Mode::kPipelined) return 1;
    return cfg.accounting == PipelineConfig::SerialAccounting::kFpga ? latency + 1 : latency;
}

double throughput_meps(const PipelineConfig& cfg, double f_clk_hz) {
    if (!(f_clk_hz > 0.0)) throw ConfigError("clock frequency must be positive");
    return f_clk_hz / cycles_per_event(cfg) / 1e6;
}

std::uint64_t memory_bits(SensorGeometry geometry, int n_ebbi) {
    geometry.validate();
    if (n_ebbi < 1) throw ConfigError("n_ebbi must be >= 1");
    return 2ull * static_cast<std::uint64_t>(n_ebbi + 1) * geometry.pixel_count();
}

HwFilter parse_hw_filter(std::string_view name) {
    if (name == "snnf") return HwFilter::kSnnf;
    if (name == "baf") return HwFilter::kBaf;
    if (name == "stcf") return HwFilter::kStcf;
    if (name == "onf") return HwFilter::kOnf;
    throw ConfigError("unknown filter '" + std::string(name) + "'");
}

std::string_view to_string(HwFilter f) {
    switch (f) {
        case HwFilter::kSnnf:
            return "snnf";
        case HwFilter::kBaf:
            return "baf";
        case HwFilter::kStcf:
            return "stcf";
        case HwFilter::kOnf:
            return "onf";
    }
    return "?";
}

std::uint64_t filter_memory_bits(HwFilter filter, SensorGeometry geometry, int n_ebbi) {
    geometry.validate();
    switch (filter) {
        case HwFilter::kSnnf:
            return memory_bits(geometry, n_ebbi);
        case HwFilter::kBaf:
        case HwFilter::kStcf:
            return 32ull * geometry.pixel_count();
        case HwFilter::kOnf:
            return 64ull * (static_cast<std::uint64_t>(geometry.width) + geometry.height);
    }
    throw ConfigError("unknown filter");
}

void CostTable::validate() const {
    for (double c : {read_pj_per_bit, write_pj_per_bit, add_pj, multiply_pj, compare_pj}) {
        if (!(c >= 0.0) || !std::isfinite(c)) throw ConfigError("operation costs must be finite and >= 0");
    }
}

namespace {
double depth_factor(std::uint64_t depth) { return std::log2(static_cast<double>(std::max<std::uint64_t>(depth, 2))); }
}  // namespace

double CostTable::read_pj(int word_bits, std::uint64_t depth) const {
    return read_pj_per_bit * word_bits * depth_factor(depth);
}

double CostTable::write_pj(int word_bits, std::uint64_t depth) const {
    return write_pj_per_bit * word_bits * depth_factor(depth);
}

OpCounts op_counts(HwFilter filter, SensorGeometry geometry, const SnnfShape& shape) {
    geometry.validate();
    OpCounts ops;
    const auto pixels = static_cast<std::uint64_t>(geometry.pixel_count());
    switch (filter) {
        case HwFilter::kSnnf: {
            if (shape.n_ebbi < 1 || shape.patch < 1 || shape.n_hidden < 1) throw ConfigError("invalid SNNF shape");
            const BankConfig banks{shape.n_banks, shape.word_bits};
            banks.validate();
            ops.reads = static_cast<std::uint64_t>(shape.n_banks) * static_cast<std::uint64_t>(shape.fetch_cycles);
            ops.read_bits = shape.word_bits;
            ops.read_depth = static_cast<std::uint64_t>(shape.n_ebbi + 1) * 2 * rows_per_bank(geometry, banks) *
                             words_per_row(geometry, banks);
            const auto n2 = static_cast<std::uint64_t>(shape.patch) * static_cast<std::uint64_t>(shape.patch);
            const auto hidden = static_cast<std::uint64_t>(shape.n_hidden);
            const auto steps = static_cast<std::uint64_t>(shape.n_ebbi);
            ops.adds = 2 * n2 * hidden * steps + hidden;
            ops.compares = hidden * steps + 1;
            break;
        }
        case HwFilter::kBaf:
        case HwFilter::kStcf:
            ops.reads = 8;
            ops.read_bits = 32;
            ops.read_depth = pixels;
            ops.writes = 1;
            ops.write_bits = 32;
            ops.write_depth = pixels;
            ops.compares = 8;
            break;
        case HwFilter::kOnf:
            ops.reads = 4;
            ops.read_bits = 32;
            ops.read_depth = 2ull * (static_cast<std::uint64_t>(geometry.width) + geometry.height);
            ops.writes = 2;
            ops.write_bits = 32;
            ops.write_depth = ops.read_depth;
            ops.compares = 4;
            break;
    }
    return ops;
}

double energy_pj(const OpCounts& ops, const CostTable& costs) {
    costs.validate();
    return static_cast<double>(ops.reads) * costs.read_pj(ops.read_bits, ops.read_depth) +
           static_cast<double>(ops.writes) * costs.write_pj(ops.write_bits, ops.write_depth) +
           static_cast<double>(ops.adds) * costs.add_pj + static_cast<double>(ops.multiplies) * costs.multiply_pj +
           static_cast<double>(ops.compares) * costs.compare_pj;
}

double energy_per_event_pj(HwFilter filter, SensorGeometry geometry, const CostTable& costs,
                           const SnnfShape& shape) {
    return energy_pj(op_counts(filter, geometry, shape), costs);
}

void PowerSpec::validate() const {
    if (!(dynamic_power_mw >= 0.0) || !(leakage_mw >= 0.0) || !(clock_hz > 0.0)) {
        throw ConfigError("power spec needs non-negative power and a positive clock");
    }
}

double energy_per_event_nj(const PowerSpec& spec, int cycles_per_event) {
    spec.validate();
    if (cycles_per_event < 1) throw ConfigError("cycles per event must be >= 1");
    // mW / Hz = 1e-3 J per cycle; convert to nJ.
    return spec.dynamic_power_mw * 1e-3 / spec.clock_hz * cycles_per_event * 1e9;
}

double power_total_mw(const PowerSpec& spec, int cycles_per_event, double event_rate_hz) {
    if (!(event_rate_hz >= 0.0)) throw ConfigError("event rate must be >= 0");
    return energy_per_event_nj(spec, cycles_per_event) * 1e-9 * event_rate_hz * 1e3 + spec.leakage_mw;
}

nlohmann::json hw_report(const HwReportConfig& cfg) {
    const int latency = latency_cycles(cfg.pipeline);
    PipelineConfig serial = cfg.pipeline;
    serial.mode = PipelineConfig::Mode::kSerial;
    const int n_cycles = cycles_per_event(serial);

    nlohmann::json energy = nlohmann::json::object();
    for (auto f : {HwFilter::kSnnf, HwFilter::kBaf, HwFilter::kStcf, HwFilter::kOnf}) {
        energy[std::string(to_string(f))] = energy_per_event_pj(f, cfg.geometry, cfg.costs, cfg.shape);
    }
    const auto bits = memory_bits(cfg.geometry, cfg.pipeline.n_ebbi);
    return {
        {"config", cfg},
        {"memory_bits", bits},
        {"memory_bytes", bits / 8},
        {"latency_cycles", latency},
        {"throughput_meps", throughput_meps(cfg.pipeline, cfg.power.clock_hz)},
        {"serial_cycles_per_event", n_cycles},
        {"energy_pj_per_event", energy},
        {"energy_nj_per_event", energy_per_event_nj(cfg.power, n_cycles)},
        {"power_total_mw", power_total_mw(cfg.power, n_cycles, cfg.event_rate_hz)},
        {"cost_table_note", "placeholder operation costs, not measured values"},
    };
}

std::vector<SensorGeometry> default_sweep_geometries() {
    return {{240, 180}, {346, 260}, {640, 480}, {1280, 960}};
}

void write_hw_sweep_csv(const HwReportConfig& cfg, std::span<const SensorGeometry> geometries, std::ostream& out) {
    out << "width,height,snnf_memory_bits,baf_stcf_memory_bits,onf_memory_bits,snnf_pj,baf_stcf_pj,onf_pj\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };
    for (const auto& g : geometries) {
        out << g.width << ',' << g.height << ',' << filter_memory_bits(HwFilter::kSnnf, g, cfg.pipeline.n_ebbi) << ','
            << filter_memory_bits(HwFilter::kBaf, g) << ',' << filter_memory_bits(HwFilter::kOnf, g) << ','
            << num(energy_per_event_pj(HwFilter::kSnnf, g, cfg.costs, cfg.shape)) << ','
            << num(energy_per_event_pj(HwFilter::kBaf, g, cfg.costs, cfg.shape)) << ','
            << num(energy_per_event_pj(HwFilter::kOnf, g, cfg.costs, cfg.shape)) << '\n';
    }
}

void to_json(nlohmann::json& j, const HwReportConfig& cfg) {
    j = {
        {"width", cfg.geometry.width},
        {"height", cfg.geometry.height},
        {"n_ebbi", cfg.pipeline.n_ebbi},
        {"mode", cfg.pipeline.mode == PipelineConfig::Mode::kPipelined ? "pipelined" : "serial"},
        {"accounting", cfg.pipeline.accounting == PipelineConfig::SerialAccounting::kAsic ? "asic" : "fpga"},
        {"patch", cfg.shape.patch},
        {"n_hidden", cfg.shape.n_hidden},
        {"n_banks", cfg.shape.n_banks},
        {"word_bits", cfg.shape.word_bits},
        {"fetch_cycles", cfg.shape.fetch_cycles},
        {"costs",
         {{"read_pj_per_bit", cfg.costs.read_pj_per_bit},
          {"write_pj_per_bit", cfg.costs.write_pj_per_bit},
          {"add_pj", cfg.costs.add_pj},
          {"multiply_pj", cfg.costs.multiply_pj},
          {"compare_pj", cfg.costs.compare_pj}}},
        {"dynamic_power_mw", cfg.power.dynamic_power_mw},
        {"clock_hz", cfg.power.clock_hz},
        {"leakage_mw", cfg.power.leakage_mw},
        {"event_rate_hz", cfg.event_rate_hz},
    };
}

void from_json(const nlohmann::json& j, HwReportConfig& cfg) {
    cfg.geometry.width = j.value("width", cfg.geometry.width);
    cfg.geometry.height = j.value("height", cfg.geometry.height);
    cfg.pipeline.n_ebbi = j.value("n_ebbi", cfg.pipeline.n_ebbi);
    cfg.shape.n_ebbi = cfg.pipeline.n_ebbi;
    if (j.contains("mode")) {
        const auto m = j.at("mode").get<std::string>();
        if (m == "pipelined") {
            cfg.pipeline.mode = PipelineConfig::Mode::kPipelined;
        } else if (m == "serial") {
            cfg.pipeline.mode = PipelineConfig::Mode::kSerial;
        } else {
            throw ConfigError("mode must be 'pipelined' or 'serial'");
        }
    }
    if (j.contains("accounting")) {
        const auto a = j.at("accounting").get<std::string>();
        if (a == "asic") {
            cfg.pipeline.accounting = PipelineConfig::SerialAccounting::kAsic;
        } else if (a == "fpga") {
            cfg.pipeline.accounting = PipelineConfig::SerialAccounting::kFpga;
        } else {
            throw ConfigError("accounting must be 'asic' or 'fpga'");
        }
    }
    cfg.shape.patch = j.value("patch", cfg.shape.patch);
    cfg.shape.n_hidden = j.value("n_hidden", cfg.shape.n_hidden);
    cfg.shape.n_banks = j.value("n_banks", cfg.shape.n_banks);
    cfg.shape.word_bits = j.value("word_bits", cfg.shape.word_bits);
    cfg.shape.fetch_cycles = j.value("fetch_cycles", cfg.shape.fetch_cycles);
    if (j.contains("costs")) {
        const auto& c = j.at("costs");
        cfg.costs.read_pj_per_bit = c.value("read_pj_per_bit", cfg.costs.read_pj_per_bit);
        cfg.costs.write_pj_per_bit = c.value("write_pj_per_bit", cfg.costs.write_pj_per_bit);
        cfg.costs.add_pj = c.value("add_pj", cfg.costs.add_pj);
        cfg.costs.multiply_pj = c.value("multiply_pj", cfg.costs.multiply_pj);
        cfg.costs.compare_pj = c.value("compare_pj", cfg.costs.compare_pj);
    }
    cfg.power.dynamic_power_mw = j.value("dynamic_power_mw", cfg.power.dynamic_power_mw);
    cfg.power.clock_hz = j.value("clock_hz", cfg.power.clock_hz);
    cfg.power.leakage_mw = j.value("leakage_mw", cfg.power.leakage_mw);
    cfg.event_rate_hz = j.value("event_rate_hz", cfg.event_rate_hz);
}

}  // namespace evdenoise
