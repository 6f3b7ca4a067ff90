#include "evdenoise/banked_memory.hpp"

#include <algorithm>
#include <string>

#include "evdenoise/errors.hpp"

namespace evdenoise {

void BankConfig::validate() const {
    if (n_banks < 1) throw ConfigError("need at least one memory bank");
    if (word_bits < 1 || word_bits > 32) throw ConfigError("word_bits must be in [1, 32]");
}

std::size_t rows_per_bank(SensorGeometry geometry, const BankConfig& config) {
    const auto banks = static_cast<std::size_t>(config.n_banks);
    return (geometry.height + banks - 1) / banks;
}

std::size_t words_per_row(SensorGeometry geometry, const BankConfig& config) {
    const auto bits = static_cast<std::size_t>(config.word_bits);
    return (geometry.width + bits - 1) / bits;
}

BankLocation bank_locate(SensorGeometry geometry, const BankConfig& config, int slot,
                         Polarity polarity, int x, int y) {
    const std::size_t region = static_cast<std::size_t>(slot - 1) * 2 +
                               (polarity == Polarity::kPositive ? 0u : 1u);
    const std::size_t wpr = words_per_row(geometry, config);
    const std::size_t region_words = rows_per_bank(geometry, config) * wpr;
    const auto bank_row = static_cast<std::size_t>(y / config.n_banks);
    return BankLocation{
        y % config.n_banks,
        region * region_words + bank_row * wpr + static_cast<std::size_t>(x / config.word_bits),
        x % config.word_bits};
}

BankedMemory::BankedMemory(SensorGeometry geometry, BankConfig config, int slot_count)
    : geometry_(geometry), config_(config), slot_count_(slot_count) {
    geometry_.validate();
    config_.validate();
    if (slot_count < 1) throw ConfigError("banked memory needs at least one slot");
    rows_per_bank_ = rows_per_bank(geometry_, config_);
    words_per_row_ = words_per_row(geometry_, config_);
    words_per_bank_ = static_cast<std::size_t>(slot_count_) * 2 * rows_per_bank_ * words_per_row_;
    banks_.assign(static_cast<std::size_t>(config_.n_banks),
                  std::vector<std::uint32_t>(words_per_bank_, 0));
}

void BankedMemory::set(int slot, Polarity polarity, int x, int y) {
    const auto loc = bank_locate(geometry_, config_, slot, polarity, x, y);
    banks_[static_cast<std::size_t>(loc.bank)][loc.word_address] |= std::uint32_t{1} << loc.bit;
}

bool BankedMemory::get(int slot, Polarity polarity, int x, int y) const {
    const auto loc = bank_locate(geometry_, config_, slot, polarity, x, y);
    return (banks_[static_cast<std::size_t>(loc.bank)][loc.word_address] >> loc.bit) & 1u;
}

void BankedMemory::clear_slot(int slot) {
    if (slot < 1 || slot > slot_count_) throw ConfigError("slot out of range");
    const std::size_t region_words = rows_per_bank_ * words_per_row_;
    const auto first = static_cast<std::ptrdiff_t>(static_cast<std::size_t>(slot - 1) * 2 * region_words);
    const auto last = first + static_cast<std::ptrdiff_t>(2 * region_words);
    for (auto& bank : banks_) std::fill(bank.begin() + first, bank.begin() + last, 0u);
}

std::size_t BankedMemory::payload_bits() const noexcept {
    return 2u * static_cast<std::size_t>(slot_count_) * geometry_.pixel_count();
}

std::size_t BankedMemory::physical_bits() const noexcept {
    return words_per_bank_ * banks_.size() * static_cast<std::size_t>(config_.word_bits);
}

std::size_t PatchFetch::word_reads() const noexcept {
    std::size_t total = 0;
    for (const auto& row : rows) total += row.words.size();
    return total;
}

PatchFetch fetch_patch_words(const BankedMemory& memory, int slot, Polarity polarity, int x_c,
                             int y_c, int n) {
    if (n <= 0 || n % 2 == 0) throw ConfigError("patch size must be a positive odd number");
    const auto& cfg = memory.config();
    if (n > cfg.n_banks) {
        throw ConfigError("patch size " + std::to_string(n) + " exceeds bank count " +
                          std::to_string(cfg.n_banks));
    }
    const auto& g = memory.geometry();
    const int r = n / 2;
    const int x_lo = std::max(0, x_c - r);
    const int x_hi = std::min<int>(g.width - 1, x_c + r);

    PatchFetch fetch;
    fetch.x_c = x_c;
    fetch.y_c = y_c;
    fetch.n = n;
    fetch.word_bits = cfg.word_bits;
    std::vector<int> reads_per_bank(static_cast<std::size_t>(cfg.n_banks), 0);
    if (x_lo > x_hi) return fetch;

    const int first_word = x_lo / cfg.word_bits;
    const int last_word = x_hi / cfg.word_bits;
    for (int dy = -r; dy <= r; ++dy) {
        const int y = y_c + dy;
        if (y < 0 || y >= g.height) continue;
        const auto base = bank_locate(g, cfg, slot, polarity, 0, y);
        BankRowRead row{base.bank, y, first_word, {}};
        for (int w = first_word; w <= last_word; ++w) {
            row.words.push_back(memory.read_word(base.bank, base.word_address + static_cast<std::size_t>(w)));
            ++reads_per_bank[static_cast<std::size_t>(base.bank)];
        }
        fetch.rows.push_back(std::move(row));
    }
    fetch.cycles_used = *std::max_element(reads_per_bank.begin(), reads_per_bank.end());
    return fetch;
}

BinaryPatch assemble_patch(const PatchFetch& fetch) {
    const int n = fetch.n;
    const int r = n / 2;
    BinaryPatch patch{n, std::vector<std::uint8_t>(static_cast<std::size_t>(n * n), 0)};
    for (const auto& row : fetch.rows) {
        const int j = row.y - fetch.y_c + r;
        const int column0 = row.first_word * fetch.word_bits;
        const int columns = static_cast<int>(row.words.size()) * fetch.word_bits;
        for (int i = 0; i < n; ++i) {
            const int offset = fetch.x_c - r + i - column0;
            if (offset < 0 || offset >= columns) continue;
            const std::uint32_t word = row.words[static_cast<std::size_t>(offset / fetch.word_bits)];
            patch.cells[static_cast<std::size_t>(i * n + j)] =
                static_cast<std::uint8_t>((word >> (offset % fetch.word_bits)) & 1u);
        }
    }
    return patch;
}

PatchSequence extract_sequence(const EbbiStack& stack, const BankedMemory& memory, const Event& e,
                               int n) {
    PatchSequence seq(n, stack.n_ebbi());
    const auto order = stack.processing_order();
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    for (int k = 0; k < stack.n_ebbi(); ++k) {
        const int slot = order[static_cast<std::size_t>(k)];
        auto out = seq.step(k);
        const auto pos = assemble_patch(fetch_patch_words(memory, slot, Polarity::kPositive, e.x, e.y, n));
        const auto neg = assemble_patch(fetch_patch_words(memory, slot, Polarity::kNegative, e.x, e.y, n));
        std::copy(pos.cells.begin(), pos.cells.end(), out.begin());
        std::copy(neg.cells.begin(), neg.cells.end(), out.begin() + static_cast<std::ptrdiff_t>(nn));
    }
    return seq;
}

EbbiStore::EbbiStore(SensorGeometry geometry, int n_ebbi, WindowPolicy policy, BankConfig banks)
    : stack_(geometry, n_ebbi, policy), memory_(geometry, banks, n_ebbi + 1) {}

bool EbbiStore::process_event(const Event& e) {
    const int written_slot = stack_.active_slot();
    const bool transitioned = stack_.process_event(e);
    memory_.set(written_slot, e.p, e.x, e.y);
    if (transitioned) memory_.clear_slot(stack_.clear_slot());
    return transitioned;
}

}  // namespace evdenoise
