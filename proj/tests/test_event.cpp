#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

#include "evdenoise/errors.hpp"
#include "evdenoise/event.hpp"
#include "evdenoise/event_io.hpp"

using namespace evdenoise;

namespace {

EventStream parse_csv(const std::string& text) {
    std::istringstream in(text);
    return read_events(in, EventFormat::kCsv);
}

}  // namespace

TEST_CASE("csv record maps straight onto event fields") {
    const auto s = parse_csv("# evdenoise-csv v1 W=10 H=10\n3,4,1000,1,1\n");
    REQUIRE(s.size() == 1);
    CHECK(s.geometry() == SensorGeometry{10, 10});
    CHECK(s[0] == Event{3, 4, 1000, Polarity::kPositive, Label::kSignal});
}

TEST_CASE("header-only files give empty streams") {
    CHECK(parse_csv("# evdenoise-csv v1 W=10 H=10\n").empty());
    std::stringstream packed;
    write_events(EventStream({5, 6}, {}), packed, EventFormat::kPacked);
    CHECK(packed.str().size() == kPackedHeaderBytes);
    const auto back = read_events(packed, EventFormat::kPacked);
    CHECK(back.empty());
    CHECK(back.geometry() == SensorGeometry{5, 6});

    std::stringstream csv;
    write_events(EventStream({5, 6}, {}), csv, EventFormat::kCsv);
    CHECK(csv.str() == "# evdenoise-csv v1 W=5 H=6\n");
}

TEST_CASE("packed records are 14 bytes") {
    CHECK(kPackedRecordBytes == 14);
    std::stringstream packed;
    write_events(EventStream({10, 10}, {{1, 2, 3, Polarity::kNegative, Label::kNoise},
                                         {4, 5, 6, Polarity::kPositive, Label::kUnlabeled}}),
                 packed, EventFormat::kPacked);
    CHECK(packed.str().size() == kPackedHeaderBytes + 2 * kPackedRecordBytes);
    CHECK(packed.str().substr(0, 4) == "EVD1");
}

TEST_CASE("malformed input reports where it failed") {
    SUBCASE("bad field, line number") {
        try {
            parse_csv("# evdenoise-csv v1 W=10 H=10\n1,1,1,1,1\n1,x,2,1,1\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.location() == 3);
        }
    }
    SUBCASE("missing header") { CHECK_THROWS_AS(parse_csv("1,1,1,1,1\n"), ParseError); }
    SUBCASE("too few fields") { CHECK_THROWS_AS(parse_csv("# evdenoise-csv v1 W=10 H=10\n1,1,1,1\n"), ParseError); }
    SUBCASE("out of bounds") {
        CHECK_THROWS_AS(parse_csv("# evdenoise-csv v1 W=10 H=10\n10,1,1,1,1\n"), ValidationError);
    }
    SUBCASE("bad polarity or label is a malformed record") {
        CHECK_THROWS_AS(parse_csv("# evdenoise-csv v1 W=10 H=10\n1,1,1,2,1\n"), ParseError);
        CHECK_THROWS_AS(parse_csv("# evdenoise-csv v1 W=10 H=10\n1,1,1,1,3\n"), ParseError);
    }
    SUBCASE("decreasing time") {
        CHECK_THROWS_AS(parse_csv("# evdenoise-csv v1 W=10 H=10\n1,1,5,1,1\n1,1,4,1,1\n"), OrderingError);
    }
    SUBCASE("truncated packed file") {
        std::stringstream packed;
        write_events(EventStream({10, 10}, {{1, 2, 3, Polarity::kNegative, Label::kNoise}}), packed,
                     EventFormat::kPacked);
        std::string bytes = packed.str();
        bytes.pop_back();
        std::istringstream in(bytes);
        try {
            read_events(in, EventFormat::kPacked);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.location() >= kPackedHeaderBytes);
        }
    }
    SUBCASE("bad magic") {
        std::istringstream in(std::string("EVD2") + std::string(12, '\0'));
        CHECK_THROWS_AS(read_events(in, EventFormat::kPacked), ParseError);
    }
}

TEST_CASE("stream construction validates bounds and order") {
    CHECK_THROWS_AS(EventStream({4, 4}, {{4, 0, 0, Polarity::kPositive, Label::kNoise}}), ValidationError);
    CHECK_THROWS_AS(EventStream({4, 4}, {{0, 0, 2, Polarity::kPositive, Label::kNoise},
                                         {0, 0, 1, Polarity::kPositive, Label::kNoise}}),
                    OrderingError);
    CHECK_THROWS_AS(EventStream({0, 4}, {}), ConfigError);
}

TEST_CASE("round trip of 10^4 random events in both formats") {
    std::mt19937_64 rng(42);
    const EventStream s({346, 260}, oracle::random_events(rng, 346, 260, 10'000, 50));
    TempDir dir;
    for (auto fmt : {EventFormat::kCsv, EventFormat::kPacked}) {
        const auto path = dir / (fmt == EventFormat::kCsv ? "a.csv" : "a.evd");
        write_events(s, path, fmt);
        CHECK(read_events(path, fmt) == s);
        CHECK_FALSE(std::filesystem::exists(path.string() + ".partial"));
    }
    CHECK(format_from_path("x.evd") == EventFormat::kPacked);
    CHECK(format_from_path("x.bin") == EventFormat::kPacked);
    CHECK(format_from_path("x.csv") == EventFormat::kCsv);
}

TEST_CASE("merge_streams") {
    const SensorGeometry g{8, 8};
    SUBCASE("orders by time") {
        const auto m = merge_streams(EventStream(g, {{0, 0, 1, Polarity::kPositive, Label::kSignal}}),
                                     EventStream(g, {{0, 0, 2, Polarity::kPositive, Label::kNoise}}));
        REQUIRE(m.size() == 2);
        CHECK(m[0].t == 1);
        CHECK(m[1].t == 2);
    }
    SUBCASE("ties favour the first stream") {
        const auto m = merge_streams(EventStream(g, {{1, 1, 5, Polarity::kPositive, Label::kSignal}}),
                                     EventStream(g, {{2, 2, 5, Polarity::kPositive, Label::kNoise}}));
        CHECK(m[0].label == Label::kSignal);
        CHECK(m[1].label == Label::kNoise);
    }
    SUBCASE("geometry mismatch") {
        CHECK_THROWS_AS(merge_streams(EventStream(g, {}), EventStream({8, 9}, {})), ConfigError);
    }
    SUBCASE("random interleave matches a reference stable sort") {
        std::mt19937_64 rng(7);
        const auto ea = oracle::random_events(rng, 8, 8, 1000, 5);
        const auto eb = oracle::random_events(rng, 8, 8, 1000, 5);
        const auto m = merge_streams(EventStream(g, ea), EventStream(g, eb));
        std::vector<Event> ref = ea;
        ref.insert(ref.end(), eb.begin(), eb.end());
        std::stable_sort(ref.begin(), ref.end(), [](const Event& x, const Event& y) { return x.t < y.t; });
        CHECK(m.size() == 2000);
        CHECK(std::equal(m.begin(), m.end(), ref.begin(), ref.end()));
        // label-preserving multiset
        auto key = [](const Event& e) { return std::tuple(e.x, e.y, e.t, e.p, e.label); };
        std::vector<decltype(key(ea[0]))> km, kr;
        for (const auto& e : m) km.push_back(key(e));
        for (const auto& e : ref) kr.push_back(key(e));
        std::sort(km.begin(), km.end());
        std::sort(kr.begin(), kr.end());
        CHECK(km == kr);
    }
}
