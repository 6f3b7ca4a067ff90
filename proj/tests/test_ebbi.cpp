#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

#include "evdenoise/ebbi.hpp"
#include "evdenoise/errors.hpp"

using namespace evdenoise;

namespace {

Event ev(int x, int y, std::uint64_t t, Polarity p = Polarity::kPositive) {
    return Event{static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), t, p, Label::kSignal};
}

}  // namespace

TEST_CASE("bit image") {
    BitImage img({130, 3});
    CHECK(img.none());
    img.set(129, 2);
    img.set(0, 0);
    img.set(64, 1);
    CHECK(img.get(129, 2));
    CHECK(img.get(64, 1));
    CHECK_FALSE(img.get(63, 1));
    CHECK(img.count() == 3);
    img.clear();
    CHECK(img.none());
}

TEST_CASE("initial stack layout") {
    EbbiStack s({8, 8}, 2, WindowPolicy::fixed_time(10));
    CHECK(s.slot_count() == 3);
    CHECK(s.active_slot() == 1);
    CHECK(s.clear_slot() == 3);
    CHECK(s.processing_order() == std::vector<int>{2, 1});
    CHECK_FALSE(s.window_start().has_value());
    CHECK_THROWS_AS(EbbiStack({8, 8}, 0, WindowPolicy::fixed_time(10)), ConfigError);
    CHECK_THROWS_AS(EbbiStack({8, 8}, 2, WindowPolicy::fixed_time(0)), ConfigError);
    CHECK_THROWS_AS(s.process_event(ev(8, 0, 0)), ValidationError);
    CHECK(s.total_set_bits() == 0);
}

TEST_CASE("window transitions") {
    SUBCASE("fixed count archives after the k-th event") {
        EbbiStack s({8, 8}, 2, WindowPolicy::fixed_count(3));
        CHECK_FALSE(s.process_event(ev(1, 1, 0)));
        CHECK_FALSE(s.process_event(ev(2, 1, 1)));
        CHECK(s.process_event(ev(3, 1, 2)));
        CHECK(s.active_slot() == 3);
        CHECK(s.clear_slot() == 2);
        CHECK(s.pair(1).count() == 3);
        CHECK(s.pair(3).count() == 0);
        CHECK(s.event_count() == 0);
        CHECK(s.processing_order() == std::vector<int>{1, 3});
    }
    SUBCASE("fixed time closes on the event reaching the boundary") {
        EbbiStack s({8, 8}, 2, WindowPolicy::fixed_time(100));
        CHECK_FALSE(s.process_event(ev(1, 1, 50)));
        CHECK(*s.window_start() == 50);
        CHECK_FALSE(s.process_event(ev(1, 2, 149)));
        CHECK(s.process_event(ev(1, 3, 150)));
        CHECK(*s.window_start() == 150);
        // the boundary event belongs to the archived window
        CHECK(s.pair(1).positive.get(1, 3));
        CHECK(s.pair(s.active_slot()).count() == 0);
    }
    SUBCASE("a single late event closes a long idle window once") {
        EbbiStack s({8, 8}, 3, WindowPolicy::fixed_time(10));
        s.process_event(ev(0, 0, 0));
        CHECK(s.process_event(ev(0, 1, 1'000'000)));
        CHECK_FALSE(s.process_event(ev(0, 2, 1'000'001)));
    }
    SUBCASE("n_ebbi = 1 keeps only the active pair") {
        EbbiStack s({4, 4}, 1, WindowPolicy::fixed_count(1));
        CHECK(s.processing_order() == std::vector<int>{1});
        s.process_event(ev(0, 0, 0));
        CHECK(s.active_slot() == 2);
        CHECK(s.processing_order() == std::vector<int>{2});
        CHECK(s.pair(2).count() == 0);
    }
}

TEST_CASE("stack invariants under random streams") {
    std::mt19937_64 rng(11);
    for (int n_ebbi : {1, 2, 3, 5}) {
        const auto events = oracle::random_events(rng, 16, 12, 3000, 7);
        EbbiStack s({16, 12}, n_ebbi, WindowPolicy::fixed_count(37));
        int transitions = 0;
        std::vector<int> active_history{s.active_slot()};
        for (const auto& e : events) {
            const bool closed = s.process_event(e);
            // fixed count: the closing event leaves the new active slot empty
            if (closed) {
                ++transitions;
                active_history.push_back(s.active_slot());
                CHECK(s.pair(s.active_slot()).count() == 0);
            }
            CHECK(s.pair(s.clear_slot()).count() == 0);
            const auto order = s.processing_order();
            CHECK(order.size() == static_cast<std::size_t>(n_ebbi));
            CHECK(order.back() == s.active_slot());
            std::set<int> distinct(order.begin(), order.end());
            distinct.insert(s.clear_slot());
            CHECK(distinct.size() == static_cast<std::size_t>(n_ebbi + 1));
            // cleared slot sits just before the active one
            const int expected_clear = s.active_slot() == 1 ? n_ebbi + 1 : s.active_slot() - 1;
            CHECK(s.clear_slot() == expected_clear);
        }
        CHECK(transitions == 3000 / 37);
        // the active slot cycles with period n_ebbi + 1
        for (std::size_t i = static_cast<std::size_t>(n_ebbi) + 1; i < active_history.size(); ++i) {
            CHECK(active_history[i] == active_history[i - static_cast<std::size_t>(n_ebbi) - 1]);
        }
    }
}

TEST_CASE("patch extraction") {
    BitImage img({6, 5});
    img.set(0, 0);
    img.set(1, 0);
    img.set(0, 2);
    const auto p = extract_patch(img, 0, 0, 3);
    CHECK(p.n == 3);
    // at(i, j) = pixel (x - 1 + i, y - 1 + j)
    CHECK(p.at(1, 1) == 1);
    CHECK(p.at(2, 1) == 1);
    CHECK(p.at(1, 2) == 0);
    int total = 0;
    for (auto c : p.cells) total += c;
    CHECK(total == 2);
    // column offset major flattening
    CHECK(p.cells[2 * 3 + 1] == 1);
    const auto q = extract_patch(img, 0, 1, 3);
    CHECK(q.at(1, 2) == 1);
    CHECK(q.cells[1 * 3 + 2] == 1);
    CHECK_THROWS_AS(extract_patch(img, 0, 0, 4), ConfigError);
    CHECK_THROWS_AS(extract_patch(img, 0, 0, 0), ConfigError);
    const auto one = extract_patch(img, 1, 0, 1);
    CHECK(one.cells == std::vector<std::uint8_t>{1});
}

TEST_CASE("feature sequences match the reference stack") {
    std::mt19937_64 rng(3);
    for (bool fixed_time : {true, false}) {
        for (int n_ebbi : {1, 2, 4}) {
            const int w = 20, h = 15, n = 5;
            const std::uint64_t window = fixed_time ? 40 : 23;
            const auto events = oracle::random_events(rng, w, h, 2000, 3);
            oracle::RefEbbi ref(w, h, n_ebbi, fixed_time, window);
            EbbiStack s({20, 15},
                        n_ebbi, fixed_time ? WindowPolicy::fixed_time(window) : WindowPolicy::fixed_count(window));
            for (const auto& e : events) {
                // features are read before the event is stored
                const auto seq = extract_sequence(s, e, n);
                const auto expected = ref.sequence(e.x, e.y, n);
                REQUIRE(seq.steps() == n_ebbi);
                REQUIRE(seq.bits().size() == expected.size());
                CHECK(std::equal(seq.bits().begin(), seq.bits().end(), expected.begin()));
                s.process_event(e);
                ref.process(e);
            }
        }
    }
}

TEST_CASE("pbm output") {
    TempDir dir;
    BitImage img({10, 2});
    img.set(0, 0);
    img.set(9, 1);
    write_pbm(img, dir / "a.pbm");
    std::ifstream in(dir / "a.pbm", std::ios::binary);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::string header = "P4\n10 2\n";
    REQUIRE(all.size() == header.size() + 4);
    CHECK(all.substr(0, header.size()) == header);
    CHECK(static_cast<unsigned char>(all[header.size()]) == 0x80);
    CHECK(static_cast<unsigned char>(all[header.size() + 3]) == 0x40);
}
