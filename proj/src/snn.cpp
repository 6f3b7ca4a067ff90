#include "evdenoise/snn.hpp"

#include <fstream>
#include <string>

#include "evdenoise/errors.hpp"
#include "evdenoise/file_util.hpp"
#include "le_io.hpp"

namespace evdenoise {

namespace {
constexpr std::string_view kNetworkMagic = "SNNF";
}

void QuantizedFcsnn::validate() const {
    if (input_dim < 1 || n_hidden < 1) throw ConfigError("network dimensions must be positive");
    if (w1.size() != static_cast<std::size_t>(input_dim) * static_cast<std::size_t>(n_hidden)) {
        throw ConfigError("w1 has " + std::to_string(w1.size()) + " entries, expected " +
                          std::to_string(input_dim * n_hidden));
    }
    if (w2.size() != static_cast<std::size_t>(n_hidden)) {
        throw ConfigError("w2 has " + std::to_string(w2.size()) + " entries, expected " +
                          std::to_string(n_hidden));
    }
    if (v_th <= 0 || v_th > kMembraneMax) throw ConfigError("v_th must be in [1, 2047]");
    if (beta_shift > 15) throw ConfigError("beta_shift must be <= 15");
}

std::span<const std::uint8_t> lif_step(const QuantizedFcsnn& net, LifState& state,
                                       std::span<const std::uint8_t> input) {
    if (input.size() != static_cast<std::size_t>(net.input_dim)) {
        throw ConfigError("input vector has " + std::to_string(input.size()) +
                          " entries, network expects " + std::to_string(net.input_dim));
    }
    if (state.membranes.size() != static_cast<std::size_t>(net.n_hidden)) {
        state = LifState(net.n_hidden);
    }
    // Binary input: the weighted sum only touches active columns.
    thread_local std::vector<int> active;
    active.clear();
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (input[i]) active.push_back(static_cast<int>(i));
    }
    for (int j = 0; j < net.n_hidden; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        const std::int32_t carried = state.spikes[ju] ? 0 : leak(state.membranes[ju], net.beta_shift);
        const std::int8_t* row = net.w1.data() + ju * static_cast<std::size_t>(net.input_dim);
        std::int64_t current = 0;
        for (int i : active) current += row[i];
        const std::int32_t v = saturate_membrane(static_cast<std::int64_t>(carried) + current);
        state.membranes[ju] = v;
        state.spikes[ju] = v >= net.v_th ? 1 : 0;
    }
    return state.spikes;
}

std::int64_t readout(const QuantizedFcsnn& net, std::span<const std::uint8_t> spikes) {
    if (spikes.size() != static_cast<std::size_t>(net.n_hidden)) {
        throw ConfigError("spike vector has " + std::to_string(spikes.size()) +
                          " entries, network has " + std::to_string(net.n_hidden) + " neurons");
    }
    std::int64_t score = 0;
    for (std::size_t j = 0; j < spikes.size(); ++j) {
        if (spikes[j]) score += net.w2[j];
    }
    return score;
}

std::int64_t score_sequence(const QuantizedFcsnn& net, const PatchSequence& seq, LifState& scratch) {
    if (seq.dim() != net.input_dim) {
        throw ConfigError("sequence vectors have " + std::to_string(seq.dim()) +
                          " entries, network expects " + std::to_string(net.input_dim));
    }
    scratch.reset();
    std::span<const std::uint8_t> spikes;
    for (int k = 0; k < seq.steps(); ++k) spikes = lif_step(net, scratch, seq.step(k));
    return readout(net, spikes);
}

Classification classify_event(const QuantizedFcsnn& net, const PatchSequence& seq,
                              ClassificationThreshold theta) {
    LifState state(net.n_hidden);
    const std::int64_t score = score_sequence(net, seq, state);
    return {score >= theta.theta ? Decision::kSignal : Decision::kNoise, score};
}

void save_network(const QuantizedFcsnn& net, const std::filesystem::path& path) {
    net.validate();
    if (net.input_dim > 0xFFFF || net.n_hidden > 0xFFFF) throw ConfigError("network too large for file format");
    write_file_atomic(path, [&](std::ostream& out) {
        out.write(kNetworkMagic.data(), kNetworkMagic.size());
        detail::put_le(out, kNetworkFormatVersion);
        detail::put_le(out, static_cast<std::uint16_t>(net.input_dim));
        detail::put_le(out, static_cast<std::uint16_t>(net.n_hidden));
        detail::put_le(out, net.v_th);
        detail::put_le(out, net.beta_shift);
        detail::put_le(out, net.s1);
        detail::put_le(out, net.s2);
        for (auto w : net.w1) detail::put_le(out, w);
        for (auto w : net.w2) detail::put_le(out, w);
    });
}

QuantizedFcsnn load_network(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open network file " + path.string());
    std::size_t offset = 0;
    detail::expect_magic(in, kNetworkMagic, offset);
    const auto version = detail::get_le<std::uint16_t>(in, offset);
    if (version != kNetworkFormatVersion) {
        throw ParseError("unsupported network format version " + std::to_string(version), offset - 2);
    }
    QuantizedFcsnn net;
    net.input_dim = detail::get_le<std::uint16_t>(in, offset);
    net.n_hidden = detail::get_le<std::uint16_t>(in, offset);
    net.v_th = detail::get_le<std::int32_t>(in, offset);
    net.beta_shift = detail::get_le<std::uint8_t>(in, offset);
    net.s1 = detail::get_le<float>(in, offset);
    net.s2 = detail::get_le<float>(in, offset);
    net.w1.resize(static_cast<std::size_t>(net.input_dim) * static_cast<std::size_t>(net.n_hidden));
    for (auto& w : net.w1) w = detail::get_le<std::int8_t>(in, offset);
    net.w2.resize(static_cast<std::size_t>(net.n_hidden));
    for (auto& w : net.w2) w = detail::get_le<std::int8_t>(in, offset);
    if (in.peek() != std::char_traits<char>::eof()) {
        throw ParseError("trailing bytes in network file", offset);
    }
    net.validate();
    return net;
}

}  // namespace evdenoise
