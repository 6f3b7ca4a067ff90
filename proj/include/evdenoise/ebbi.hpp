#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "evdenoise/event.hpp"

namespace evdenoise {

// W x H binary image, one bit per pixel, rows packed into 64-bit words.
class BitImage {
public:
    BitImage() = default;
    explicit BitImage(SensorGeometry geometry);

    const SensorGeometry& geometry() const noexcept { return geometry_; }

    bool get(int x, int y) const noexcept {
        return (words_[index(y, x)] >> (x & 63)) & 1u;
    }
    void set(int x, int y) noexcept { words_[index(y, x)] |= std::uint64_t{1} << (x & 63); }
    void clear() noexcept;

    std::size_t count() const noexcept;
    bool none() const noexcept { return count() == 0; }

    friend bool operator==(const BitImage&, const BitImage&) = default;

private:
    std::size_t index(int y, int x) const noexcept {
        return static_cast<std::size_t>(y) * words_per_row_ + static_cast<std::size_t>(x >> 6);
    }

    SensorGeometry geometry_{};
    std::size_t words_per_row_ = 0;
    std::vector<std::uint64_t> words_;
};

// Writes the image as a binary PBM (P4); set bits are black.
void write_pbm(const BitImage& image, const std::filesystem::path& path);

struct EbbiPair {
    BitImage positive;
    BitImage negative;

    const BitImage& plane(Polarity p) const noexcept {
        return p == Polarity::kPositive ? positive : negative;
    }
    BitImage& plane(Polarity p) noexcept { return p == Polarity::kPositive ? positive : negative; }
    std::size_t count() const noexcept { return positive.count() + negative.count(); }
};

// When the active pair is archived.
struct WindowPolicy {
    enum class Mode { kFixedTime, kFixedCount };
    Mode mode = Mode::kFixedTime;
    std::uint64_t value = 25'000;  // microseconds (fixed time) or event count (fixed count)

    static WindowPolicy fixed_time(std::uint64_t duration_us) { return {Mode::kFixedTime, duration_us}; }
    static WindowPolicy fixed_count(std::uint64_t events) { return {Mode::kFixedCount, events}; }
};

// Round-robin stack of n_ebbi + 1 EBBI pairs: one active, n_ebbi - 1
// historical and one cleared. Slot numbers are 1-based, in [1, n_ebbi + 1].
// The cleared slot always sits just before the active one (cyclically), so
// the slot after the active one is the oldest historical pair.
class EbbiStack {
public:
    // Throws ConfigError if n_ebbi == 0 or the window value is 0.
    EbbiStack(SensorGeometry geometry, int n_ebbi, WindowPolicy policy);

    const SensorGeometry& geometry() const noexcept { return geometry_; }
    int n_ebbi() const noexcept { return n_ebbi_; }
    int slot_count() const noexcept { return n_ebbi_ + 1; }
    int active_slot() const noexcept { return active_; }
    int clear_slot() const noexcept { return clear_; }
    std::uint64_t event_count() const noexcept { return event_count_; }
    std::optional<std::uint64_t> window_start() const noexcept { return t_start_; }
    const WindowPolicy& policy() const noexcept { return policy_; }

    const EbbiPair& pair(int slot) const { return slots_.at(static_cast<std::size_t>(slot - 1)); }

    // Sets the event's bit in the active pair, then archives the pair if the
    // window closed. Returns true when a transition happened.
    bool process_event(const Event& e);

    // The n_ebbi slots used for feature extraction, oldest first, active last.
    std::vector<int> processing_order() const;

    std::size_t total_set_bits() const noexcept;

private:
    SensorGeometry geometry_;
    int n_ebbi_;
    WindowPolicy policy_;
    std::vector<EbbiPair> slots_;
    int active_ = 1;
    int clear_;
    std::uint64_t event_count_ = 0;
    std::optional<std::uint64_t> t_start_;
};

// Patch around an event. Cells are indexed [column offset][row offset]:
// at(i, j) is the pixel (x_c + i - r, y_c + j - r) with r = n / 2, and the
// row-major flattening therefore walks rows offsets fastest.
struct BinaryPatch {
    int n = 0;
    std::vector<std::uint8_t> cells;  // n * n, index i * n + j

    std::uint8_t at(int i, int j) const { return cells[static_cast<std::size_t>(i * n + j)]; }
    friend bool operator==(const BinaryPatch&, const BinaryPatch&) = default;
};

// Zero-padded n x n patch centred on (x_c, y_c). Throws ConfigError for even
// or non-positive n.
BinaryPatch extract_patch(const BitImage& image, int x_c, int y_c, int n);

// Per-event input to the classifier: `steps` binary vectors of length 2 n^2,
// each the flattened positive patch followed by the flattened negative patch.
// Step 0 is the oldest pair, the last step the active pair.
class PatchSequence {
public:
    PatchSequence() = default;
    PatchSequence(int n, int steps);

    int n() const noexcept { return n_; }
    int steps() const noexcept { return steps_; }
    int dim() const noexcept { return 2 * n_ * n_; }

    std::span<const std::uint8_t> step(int k) const {
        return {bits_.data() + static_cast<std::size_t>(k) * dim(), static_cast<std::size_t>(dim())};
    }
    std::span<std::uint8_t> step(int k) {
        return {bits_.data() + static_cast<std::size_t>(k) * dim(), static_cast<std::size_t>(dim())};
    }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    friend bool operator==(const PatchSequence&, const PatchSequence&) = default;

private:
    int n_ = 0;
    int steps_ = 0;
    std::vector<std::uint8_t> bits_;
};

// Reads the patch sequence straight from the stack's bit images.
PatchSequence extract_sequence(const EbbiStack& stack, const Event& e, int n);

}  // namespace evdenoise
