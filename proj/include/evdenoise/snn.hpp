#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

#include "evdenoise/ebbi.hpp"

namespace evdenoise {

inline constexpr int kMembraneBits = 12;
inline constexpr std::int32_t kMembraneMax = (1 << (kMembraneBits - 1)) - 1;  //  2047
inline constexpr std::int32_t kMembraneMin = -(1 << (kMembraneBits - 1));     // -2048

// Clamp to the signed 12-bit membrane range.
constexpr std::int32_t saturate_membrane(std::int64_t v) noexcept {
    return static_cast<std::int32_t>(v < kMembraneMin ? kMembraneMin : v > kMembraneMax ? kMembraneMax : v);
}

// Leak with beta = 1 - 2^-shift, realised as v - (v >> shift) (arithmetic
// shift). shift = 1 gives beta = 0.5.
constexpr std::int32_t leak(std::int32_t v, int shift) noexcept { return v - (v >> shift); }

// Single-hidden-layer spiking classifier with 8-bit weights and 12-bit
// saturating membranes. Weights are integers in units of s1 (hidden layer)
// and s2 (readout).
struct QuantizedFcsnn {
    int input_dim = 0;
    int n_hidden = 0;
    std::vector<std::int8_t> w1;  // n_hidden x input_dim, row-major
    std::vector<std::int8_t> w2;  // n_hidden
    std::int32_t v_th = 1;
    std::uint8_t beta_shift = 1;
    float s1 = 1.0f;
    float s2 = 1.0f;

    // Throws ConfigError on shape mismatch, v_th <= 0, v_th beyond the membrane
    // range or beta_shift > 15.
    void validate() const;

    std::int8_t weight(int j, int i) const {
        return w1[static_cast<std::size_t>(j) * static_cast<std::size_t>(input_dim) + static_cast<std::size_t>(i)];
    }

    friend bool operator==(const QuantizedFcsnn&, const QuantizedFcsnn&) = default;
};

struct LifState {
    std::vector<std::int32_t> membranes;
    std::vector<std::uint8_t> spikes;  // spikes from the previous step

    explicit LifState(int n_hidden = 0)
        : membranes(static_cast<std::size_t>(n_hidden), 0), spikes(static_cast<std::size_t>(n_hidden), 0) {}

    void reset() {
        std::fill(membranes.begin(), membranes.end(), 0);
        std::fill(spikes.begin(), spikes.end(), 0);
    }
};

// One timestep: v = sat12(leak(v_prev * (1 - s_prev)) + sum_i w1[j,i] x[i]),
// s = v >= v_th. The weighted sum is accumulated exactly and saturated once.
// Returns the new spike vector (also stored in `state`).
std::span<const std::uint8_t> lif_step(const QuantizedFcsnn& net, LifState& state,
                                       std::span<const std::uint8_t> input);

// score = sum_j w2[j] * spikes[j]
std::int64_t readout(const QuantizedFcsnn& net, std::span<const std::uint8_t> spikes);

enum class Decision : std::uint8_t { kNoise = 0, kSignal = 1 };

struct Classification {
    Decision decision = Decision::kNoise;
    std::int64_t score = 0;
};

// Comparison threshold against the raw readout score; signal iff score >= theta.
struct ClassificationThreshold {
    std::int64_t theta = 0;

    static constexpr ClassificationThreshold accept_all() {
        return {std::numeric_limits<std::int64_t>::min()};
    }
    static constexpr ClassificationThreshold reject_all() {
        return {std::numeric_limits<std::int64_t>::max()};
    }
};

// Raw score of the final-timestep spike pattern after running every step of
// the sequence from a reset state. `scratch` is reused to avoid allocation.
std::int64_t score_sequence(const QuantizedFcsnn& net, const PatchSequence& seq, LifState& scratch);

Classification classify_event(const QuantizedFcsnn& net, const PatchSequence& seq,
                              ClassificationThreshold theta);

// Network file: "SNNF", u16 version, u16 input_dim, u16 n_hidden, i32 v_th,
// u8 beta_shift, f32 s1, f32 s2, w1 (i8, row-major), w2 (i8); little-endian.
inline constexpr std::uint16_t kNetworkFormatVersion = 1;

void save_network(const QuantizedFcsnn& net, const std::filesystem::path& path);
QuantizedFcsnn load_network(const std::filesystem::path& path);

}  // namespace evdenoise
