#pragma once

#include <cstdint>
#include <vector>

#include "evdenoise/ebbi.hpp"
#include "evdenoise/event.hpp"

namespace evdenoise {

// Physical layout of the EBBI stack across parallel single-port banks.
//
// Rows are interleaved: row y lives in bank y mod n_banks, at bank row
// y / n_banks. Inside a bank the address space is split into one region per
// (slot, polarity), slot-major then polarity (positive first); each region
// holds rows_per_bank rows of words_per_row words. Column x maps to word
// x / word_bits of its row, bit x mod word_bits (bit 0 = lowest column).
//
// Example, 346 x 260 sensor, 5 banks, 4-bit words, 3 slots:
//   rows_per_bank = 52, words_per_row = 87, region = 52 * 87 = 4524 words.
//   Pixel (x=6, y=7) in slot 2, negative polarity:
//   bank 7 mod 5 = 2, bank row 1, region (2-1)*2 + 1 = 3,
//   word address 3 * 4524 + 1 * 87 + 6 / 4 = 13660, bit 6 mod 4 = 2.
struct BankConfig {
    int n_banks = 5;
    int word_bits = 4;

    // Throws ConfigError unless 1 <= n_banks and 1 <= word_bits <= 32.
    void validate() const;
};

struct BankLocation {
    int bank = 0;
    std::size_t word_address = 0;
    int bit = 0;

    friend bool operator==(const BankLocation&, const BankLocation&) = default;
};

std::size_t rows_per_bank(SensorGeometry geometry, const BankConfig& config);
std::size_t words_per_row(SensorGeometry geometry, const BankConfig& config);

// `slot` is 1-based as in EbbiStack.
BankLocation bank_locate(SensorGeometry geometry, const BankConfig& config, int slot,
                         Polarity polarity, int x, int y);

class BankedMemory {
public:
    BankedMemory(SensorGeometry geometry, BankConfig config, int slot_count);

    const SensorGeometry& geometry() const noexcept { return geometry_; }
    const BankConfig& config() const noexcept { return config_; }
    int slot_count() const noexcept { return slot_count_; }
    std::size_t words_per_bank() const noexcept { return words_per_bank_; }

    void set(int slot, Polarity polarity, int x, int y);
    bool get(int slot, Polarity polarity, int x, int y) const;
    void clear_slot(int slot);

    // One addressable word; the low word_bits bits are meaningful.
    std::uint32_t read_word(int bank, std::size_t address) const {
        return banks_[static_cast<std::size_t>(bank)][address];
    }

    // Pixel bits held, 2 * slots * W * H.
    std::size_t payload_bits() const noexcept;
    // Bits allocated including row padding up to whole words.
    std::size_t physical_bits() const noexcept;

private:
    SensorGeometry geometry_;
    BankConfig config_;
    int slot_count_;
    std::size_t rows_per_bank_;
    std::size_t words_per_row_;
    std::size_t words_per_bank_;
    std::vector<std::vector<std::uint32_t>> banks_;
};

// Words fetched from one bank for one patch row.
struct BankRowRead {
    int bank = 0;
    int y = 0;           // image row
    int first_word = 0;  // word index within the row
    std::vector<std::uint32_t> words;
};

struct PatchFetch {
    int x_c = 0;
    int y_c = 0;
    int n = 0;
    int word_bits = 0;
    std::vector<BankRowRead> rows;  // in-frame rows only, top to bottom
    int cycles_used = 0;            // sequential reads on the busiest bank

    std::size_t word_reads() const noexcept;
};

// Reads the words covering columns [x_c - n/2, x_c + n/2] (clipped to the
// frame) on the rows of an n x n patch. Requires n odd and n <= n_banks so
// every patch row hits a different bank.
PatchFetch fetch_patch_words(const BankedMemory& memory, int slot, Polarity polarity, int x_c,
                             int y_c, int n);

// Selects the patch pixels out of fetched words.
BinaryPatch assemble_patch(const PatchFetch& fetch);

// Feature sequence obtained through the banked fetch path. Slot order comes
// from `stack`; pixel data comes from `memory` only.
PatchSequence extract_sequence(const EbbiStack& stack, const BankedMemory& memory, const Event& e,
                               int n);

// Keeps an EbbiStack and its BankedMemory mirror in lockstep.
class EbbiStore {
public:
    EbbiStore(SensorGeometry geometry, int n_ebbi, WindowPolicy policy, BankConfig banks = {});

    bool process_event(const Event& e);

    const EbbiStack& stack() const noexcept { return stack_; }
    const BankedMemory& memory() const noexcept { return memory_; }

private:
    EbbiStack stack_;
    BankedMemory memory_;
};

}  // namespace evdenoise
