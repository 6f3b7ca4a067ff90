#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "evdenoise/banked_memory.hpp"
#include "evdenoise/errors.hpp"

using namespace evdenoise;

TEST_CASE("address map worked example") {
    const SensorGeometry g{346, 260};
    const BankConfig cfg{5, 4};
    CHECK(rows_per_bank(g, cfg) == 52);
    CHECK(words_per_row(g, cfg) == 87);
    const auto loc = bank_locate(g, cfg, 2, Polarity::kNegative, 6, 7);
    CHECK(loc.bank == 2);
    CHECK(loc.word_address == 13660);
    CHECK(loc.bit == 2);
    // positive plane of slot 1 starts at address 0
    CHECK(bank_locate(g, cfg, 1, Polarity::kPositive, 0, 0) == BankLocation{0, 0, 0});
    CHECK(bank_locate(g, cfg, 1, Polarity::kPositive, 345, 259) == BankLocation{4, 51 * 87 + 86, 1});
}

TEST_CASE("bank config validation") {
    CHECK_THROWS_AS((BankConfig{0, 4}.validate()), ConfigError);
    CHECK_THROWS_AS((BankConfig{5, 0}.validate()), ConfigError);
    CHECK_THROWS_AS((BankConfig{5, 33}.validate()), ConfigError);
    CHECK_NOTHROW((BankConfig{5, 32}.validate()));
}

TEST_CASE("set/get/clear and sizes") {
    const SensorGeometry g{10, 7};
    BankedMemory m(g, {5, 4}, 3);
    m.set(2, Polarity::kNegative, 9, 6);
    CHECK(m.get(2, Polarity::kNegative, 9, 6));
    CHECK_FALSE(m.get(2, Polarity::kPositive, 9, 6));
    CHECK_FALSE(m.get(1, Polarity::kNegative, 9, 6));
    m.set(1, Polarity::kPositive, 0, 0);
    m.clear_slot(2);
    CHECK_FALSE(m.get(2, Polarity::kNegative, 9, 6));
    CHECK(m.get(1, Polarity::kPositive, 0, 0));
    CHECK(m.payload_bits() == 2 * 3 * 70);
    // 2 rows per bank, 3 words of 4 bits per row
    CHECK(m.physical_bits() == 5 * (3 * 2 * 2 * 3) * 4);
    CHECK(m.payload_bits() <= m.physical_bits());
}

TEST_CASE("patch fetch cycles follow the word width") {
    const SensorGeometry g{64, 32};
    for (int x = 2; x < 62; ++x) {
        BankedMemory w4(g, {5, 4}, 3);
        BankedMemory w8(g, {5, 8}, 3);
        BankedMemory w2(g, {5, 2}, 3);
        const auto f4 = fetch_patch_words(w4, 1, Polarity::kPositive, x, 10, 5);
        const auto f8 = fetch_patch_words(w8, 1, Polarity::kPositive, x, 10, 5);
        const auto f2 = fetch_patch_words(w2, 1, Polarity::kPositive, x, 10, 5);
        // five columns always straddle exactly two 4-bit words
        CHECK(f4.cycles_used == 2);
        CHECK(f4.word_reads() == 10);
        const int lo = x - 2, hi = x + 2;
        CHECK(f8.cycles_used == hi / 8 - lo / 8 + 1);
        CHECK(f2.cycles_used == 3);
        // every patch row in its own bank
        std::vector<int> banks;
        for (const auto& r : f4.rows) banks.push_back(r.bank);
        std::sort(banks.begin(), banks.end());
        CHECK(std::adjacent_find(banks.begin(), banks.end()) == banks.end());
    }
    BankedMemory m(g, {3, 4}, 3);
    CHECK_THROWS_AS(fetch_patch_words(m, 1, Polarity::kPositive, 5, 5, 5), ConfigError);
    CHECK_THROWS_AS(fetch_patch_words(m, 1, Polarity::kPositive, 5, 5, 2), ConfigError);
}

TEST_CASE("corner patches clip to the frame") {
    const SensorGeometry g{9, 9};
    BankedMemory m(g, {5, 4}, 2);
    m.set(1, Polarity::kPositive, 0, 0);
    const auto f = fetch_patch_words(m, 1, Polarity::kPositive, 0, 0, 5);
    CHECK(f.rows.size() == 3);
    const auto p = assemble_patch(f);
    CHECK(p.at(2, 2) == 1);
    int total = 0;
    for (auto c : p.cells) total += c;
    CHECK(total == 1);
}

TEST_CASE("banked path reproduces the stack path") {
    std::mt19937_64 rng(99);
    for (int word_bits : {1, 3, 4, 8, 32}) {
        for (int n : {1, 3, 5}) {
            const SensorGeometry g{37, 23};
            const auto events = oracle::random_events(rng, 37, 23, 1500, 4);
            EbbiStore store(g, 3, WindowPolicy::fixed_count(50), {5, word_bits});
            for (const auto& e : events) {
                const auto a = extract_sequence(store.stack(), e, n);
                const auto b = extract_sequence(store.stack(), store.memory(), e, n);
                REQUIRE(a == b);
                store.process_event(e);
            }
            // the mirror holds exactly the stack's bits
            for (int slot = 1; slot <= store.stack().slot_count(); ++slot) {
                for (auto p : {Polarity::kPositive, Polarity::kNegative}) {
                    const auto& img = store.stack().pair(slot).plane(p);
                    for (int y = 0; y < g.height; ++y) {
                        for (int x = 0; x < g.width; ++x) {
                            REQUIRE(img.get(x, y) == store.memory().get(slot, p, x, y));
                        }
                    }
                }
            }
        }
    }
}
