#include "evdenoise/ebbi.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <ostream>
#include <string>

#include "evdenoise/errors.hpp"
#include "evdenoise/file_util.hpp"

namespace evdenoise {

BitImage::BitImage(SensorGeometry geometry)
    : geometry_(geometry), words_per_row_((geometry.width + 63u) / 64u) {
    geometry_.validate();
    words_.assign(words_per_row_ * geometry_.height, 0);
}

void BitImage::clear() noexcept { std::fill(words_.begin(), words_.end(), 0); }

std::size_t BitImage::count() const noexcept {
    std::size_t total = 0;
    for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
}

void write_pbm(const BitImage& image, const std::filesystem::path& path) {
    write_file_atomic(path, [&](std::ostream& out) {
        const auto& g = image.geometry();
        out << "P4\n" << g.width << ' ' << g.height << '\n';
        const std::size_t row_bytes = (g.width + 7u) / 8u;
        std::string row(row_bytes, '\0');
        for (int y = 0; y < g.height; ++y) {
            std::fill(row.begin(), row.end(), '\0');
            for (int x = 0; x < g.width; ++x) {
                if (image.get(x, y)) row[x / 8] |= static_cast<char>(0x80u >> (x % 8));
            }
            out.write(row.data(), static_cast<std::streamsize>(row.size()));
        }
    });
}

EbbiStack::EbbiStack(SensorGeometry geometry, int n_ebbi, WindowPolicy policy)
    : geometry_(geometry), n_ebbi_(n_ebbi), policy_(policy), clear_(n_ebbi + 1) {
    geometry_.validate();
    if (n_ebbi < 1) throw ConfigError("N_EBBI must be at least 1");
    if (policy.value == 0) throw ConfigError("EBBI window length must be positive");
    slots_.reserve(static_cast<std::size_t>(n_ebbi) + 1);
    for (int k = 0; k < n_ebbi + 1; ++k) {
        slots_.push_back(EbbiPair{BitImage(geometry_), BitImage(geometry_)});
    }
}

bool EbbiStack::process_event(const Event& e) {
    if (!geometry_.contains(e.x, e.y)) {
        throw ValidationError("event (" + std::to_string(e.x) + "," + std::to_string(e.y) +
                              ") outside the EBBI geometry");
    }
    if (!t_start_) t_start_ = e.t;

    slots_[static_cast<std::size_t>(active_ - 1)].plane(e.p).set(e.x, e.y);
    ++event_count_;

    const bool window_closed = policy_.mode == WindowPolicy::Mode::kFixedTime
                                   ? e.t - *t_start_ >= policy_.value
                                   : event_count_ >= policy_.value;
    if (!window_closed) return false;

    active_ = clear_;
    clear_ = clear_ - 1;
    if (clear_ == 0) clear_ = n_ebbi_ + 1;
    auto& cleared = slots_[static_cast<std::size_t>(clear_ - 1)];
    cleared.positive.clear();
    cleared.negative.clear();
    event_count_ = 0;
    t_start_ = e.t;
    return true;
}

std::vector<int> EbbiStack::processing_order() const {
    std::vector<int> order(static_cast<std::size_t>(n_ebbi_));
    const int slots = n_ebbi_ + 1;
    for (int k = 0; k < n_ebbi_; ++k) {
        // k-th entry is (n_ebbi - 1 - k) steps older than the active slot.
        const int age = n_ebbi_ - 1 - k;
        order[static_cast<std::size_t>(k)] = (active_ - 1 + age) % slots + 1;
    }
    return order;
}

std::size_t EbbiStack::total_set_bits() const noexcept {
    return std::accumulate(slots_.begin(), slots_.end(), std::size_t{0},
                           [](std::size_t acc, const EbbiPair& p) { return acc + p.count(); });
}

BinaryPatch extract_patch(const BitImage& image, int x_c, int y_c, int n) {
    if (n <= 0 || n % 2 == 0) throw ConfigError("patch size must be a positive odd number");
    const int r = n / 2;
    const auto& g = image.geometry();
    BinaryPatch patch{n, std::vector<std::uint8_t>(static_cast<std::size_t>(n * n), 0)};
    for (int dx = -r; dx <= r; ++dx) {
        const int x = x_c + dx;
        if (x < 0 || x >= g.width) continue;
        for (int dy = -r; dy <= r; ++dy) {
            const int y = y_c + dy;
            if (y < 0 || y >= g.height) continue;
            patch.cells[static_cast<std::size_t>((dx + r) * n + (dy + r))] = image.get(x, y);
        }
    }
    return patch;
}

PatchSequence::PatchSequence(int n, int steps) : n_(n), steps_(steps) {
    if (n <= 0 || n % 2 == 0) throw ConfigError("patch size must be a positive odd number");
    if (steps < 1) throw ConfigError("patch sequence needs at least one step");
    bits_.assign(static_cast<std::size_t>(steps) * static_cast<std::size_t>(2 * n * n), 0);
}

PatchSequence extract_sequence(const EbbiStack& stack, const Event& e, int n) {
    PatchSequence seq(n, stack.n_ebbi());
    const auto order = stack.processing_order();
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    for (int k = 0; k < stack.n_ebbi(); ++k) {
        const EbbiPair& pair = stack.pair(order[static_cast<std::size_t>(k)]);
        auto out = seq.step(k);
        const auto pos = extract_patch(pair.positive, e.x, e.y, n);
        const auto neg = extract_patch(pair.negative, e.x, e.y, n);
        std::copy(pos.cells.begin(), pos.cells.end(), out.begin());
        std::copy(neg.cells.begin(), neg.cells.end(), out.begin() + static_cast<std::ptrdiff_t>(nn));
    }
    return seq;
}

}  // namespace evdenoise
