#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

#include "evdenoise/errors.hpp"
#include "evdenoise/snn.hpp"

using namespace evdenoise;

namespace {

QuantizedFcsnn random_net(std::mt19937_64& rng, int input_dim, int n_hidden, int v_th, int shift) {
    std::uniform_int_distribution<int> w(-127, 127);
    QuantizedFcsnn net;
    net.input_dim = input_dim;
    net.n_hidden = n_hidden;
    for (int i = 0; i < input_dim * n_hidden; ++i) net.w1.push_back(static_cast<std::int8_t>(w(rng)));
    for (int j = 0; j < n_hidden; ++j) net.w2.push_back(static_cast<std::int8_t>(w(rng)));
    net.v_th = v_th;
    net.beta_shift = static_cast<std::uint8_t>(shift);
    net.s1 = 0.01f;
    net.s2 = 0.02f;
    return net;
}

oracle::RefLif as_ref(const QuantizedFcsnn& net) {
    oracle::RefLif r{net.input_dim, net.n_hidden, {}, {}, net.v_th, net.beta_shift};
    r.w1.assign(net.w1.begin(), net.w1.end());
    r.w2.assign(net.w2.begin(), net.w2.end());
    return r;
}

}  // namespace

TEST_CASE("membrane helpers") {
    CHECK(saturate_membrane(5000) == 2047);
    CHECK(saturate_membrane(-5000) == -2048);
    CHECK(saturate_membrane(-7) == -7);
    CHECK(leak(100, 1) == 50);
    CHECK(leak(101, 1) == 51);
    // arithmetic shift floors towards -inf
    CHECK(leak(-101, 1) == -50);
    CHECK(leak(-1, 15) == 0);
    CHECK(leak(7, 0) == 0);
}

TEST_CASE("single neuron dynamics") {
    QuantizedFcsnn net;
    net.input_dim = 2;
    net.n_hidden = 1;
    net.w1 = {60, -30};
    net.w2 = {5};
    net.v_th = 100;
    net.beta_shift = 1;
    LifState st(1);
    const std::vector<std::uint8_t> on{1, 0}, both{1, 1};
    CHECK(lif_step(net, st, on)[0] == 0);
    CHECK(st.membranes[0] == 60);
    // 60 - 30 + 60 = 90
    CHECK(lif_step(net, st, on)[0] == 0);
    CHECK(st.membranes[0] == 90);
    CHECK(lif_step(net, st, on)[0] == 1);
    CHECK(st.membranes[0] == 105);
    // hard reset: previous potential is discarded after a spike
    CHECK(lif_step(net, st, both)[0] == 0);
    CHECK(st.membranes[0] == 30);
    CHECK(readout(net, std::vector<std::uint8_t>{1}) == 5);
}

TEST_CASE("membrane saturates once per step") {
    QuantizedFcsnn net;
    net.input_dim = 40;
    net.n_hidden = 2;
    net.w1.assign(80, 127);
    for (int i = 0; i < 20; ++i) net.w1[40 + i] = -127;
    for (int i = 20; i < 40; ++i) net.w1[40 + i] = 100;
    net.w2 = {1, 1};
    net.v_th = 2047;
    net.beta_shift = 4;
    LifState st(2);
    const std::vector<std::uint8_t> x(40, 1);
    lif_step(net, st, x);
    CHECK(st.membranes[0] == 2047);
    CHECK(st.spikes[0] == 1);
    // -2540 + 2000 = -540 exactly; no intermediate clamp
    CHECK(st.membranes[1] == -540);
    CHECK_THROWS_AS(lif_step(net, st, std::vector<std::uint8_t>(39, 1)), ConfigError);
}

TEST_CASE("integer network matches the reference simulation") {
    std::mt19937_64 rng(5);
    std::bernoulli_distribution bit(0.3);
    for (int trial = 0; trial < 40; ++trial) {
        const int steps = 1 + trial % 4;
        const int n = trial % 2 ? 3 : 5;
        const int dim = 2 * n * n;
        const int shift = trial % 16;
        const auto net = random_net(rng, dim, 30, 1 + static_cast<int>(rng() % 600), shift);
        const auto ref = as_ref(net);
        LifState scratch(net.n_hidden);
        for (int s = 0; s < 50; ++s) {
            PatchSequence seq(n, steps);
            std::vector<std::vector<std::uint8_t>> plain;
            for (int k = 0; k < steps; ++k) {
                auto step = seq.step(k);
                for (auto& b : step) b = bit(rng);
                plain.emplace_back(step.begin(), step.end());
            }
            REQUIRE(score_sequence(net, seq, scratch) == ref.score(plain));
        }
    }
}

TEST_CASE("classification threshold") {
    std::mt19937_64 rng(8);
    const auto net = random_net(rng, 18, 10, 50, 1);
    PatchSequence seq(3, 2);
    for (auto& b : seq.step(1)) b = 1;
    LifState st(10);
    const auto score = score_sequence(net, seq, st);
    CHECK(classify_event(net, seq, {score}).decision == Decision::kSignal);
    CHECK(classify_event(net, seq, {score + 1}).decision == Decision::kNoise);
    CHECK(classify_event(net, seq, ClassificationThreshold::accept_all()).decision == Decision::kSignal);
    CHECK(classify_event(net, seq, ClassificationThreshold::reject_all()).decision == Decision::kNoise);
    CHECK(classify_event(net, seq, {0}).score == score);
}

TEST_CASE("validation") {
    std::mt19937_64 rng(1);
    auto net = random_net(rng, 4, 2, 10, 1);
    CHECK_NOTHROW(net.validate());
    auto bad = net;
    bad.v_th = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = net;
    bad.v_th = 2048;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = net;
    bad.beta_shift = 16;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = net;
    bad.w2.pop_back();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("network file round trip and corruption") {
    TempDir dir;
    std::mt19937_64 rng(2);
    const auto net = random_net(rng, 50, 30, 321, 3);
    const auto path = dir / "net.snnf";
    save_network(net, path);
    CHECK(load_network(path) == net);
    CHECK(std::filesystem::file_size(path) == 4 + 2 + 2 + 2 + 4 + 1 + 4 + 4 + 50 * 30 + 30);

    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    auto write = [&](const std::string& b) {
        std::ofstream out(dir / "bad.snnf", std::ios::binary);
        out << b;
    };
    write(bytes.substr(0, bytes.size() - 1));
    CHECK_THROWS_AS(load_network(dir / "bad.snnf"), ParseError);
    write(bytes + "x");
    CHECK_THROWS_AS(load_network(dir / "bad.snnf"), ParseError);
    std::string wrong_magic = bytes;
    wrong_magic[0] = 'X';
    write(wrong_magic);
    CHECK_THROWS_AS(load_network(dir / "bad.snnf"), ParseError);
    std::string wrong_version = bytes;
    wrong_version[4] = 9;
    write(wrong_version);
    CHECK_THROWS_AS(load_network(dir / "bad.snnf"), ParseError);
    CHECK_THROWS_AS(load_network(dir / "missing.snnf"), IoError);
}
