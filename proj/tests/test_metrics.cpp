#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"

#include "evdenoise/errors.hpp"
#include "evdenoise/metrics.hpp"

using namespace evdenoise;

namespace {

constexpr Label S = Label::kSignal;
constexpr Label N = Label::kNoise;

double roc_auc(const std::vector<double>& scores, const std::vector<Label>& labels) {
    return roc_from_scores(scores, labels).auc;
}

}  // namespace

TEST_CASE("confusion counts") {
    const std::vector<Decision> d{Decision::kSignal, Decision::kSignal, Decision::kNoise, Decision::kNoise,
                                  Decision::kSignal};
    const std::vector<Label> l{S, N, N, S, S};
    const auto c = confusion(d, l);
    CHECK(c == ConfusionCounts{2, 1, 1, 1});
    CHECK(c.tpr() == doctest::Approx(2.0 / 3.0));
    CHECK(c.fpr() == doctest::Approx(0.5));
    CHECK((c + c).total() == 10);
    CHECK(ConfusionCounts{}.tpr() == 0.0);
    CHECK_THROWS_AS(confusion(d, std::vector<Label>{S}), ConfigError);
    CHECK_THROWS_AS(confusion(std::vector<Decision>{Decision::kNoise}, std::vector<Label>{Label::kUnlabeled}),
                    ValidationError);
    const auto j = to_json(c);
    CHECK(j.at("tp") == 2);
}

TEST_CASE("worked AUC examples") {
    CHECK(roc_auc({0.9, 0.8, 0.2, 0.1}, {S, S, N, N}) == 1.0);
    CHECK(roc_auc({0.1, 0.2, 0.8, 0.9}, {S, S, N, N}) == 0.0);
    CHECK(roc_auc({0.9, 0.3, 0.5, 0.1}, {S, S, N, N}) == doctest::Approx(0.75));
    // all tied: the single diagonal segment
    CHECK(roc_auc({1, 1, 1, 1}, {S, N, S, N}) == doctest::Approx(0.5));
    CHECK(auc(std::vector<RocPoint>{{0, 0, 0}, {0, 0, 1}, {0, 1, 1}}) == 1.0);
    CHECK(auc(std::vector<RocPoint>{{0, 0, 0}, {0, 1, 1}}) == 0.5);
    CHECK_THROWS_AS(roc_auc({1, 2}, {S, S}), ConfigError);
    CHECK_THROWS_AS(roc_auc({1, 2}, {S}), ConfigError);
}

TEST_CASE("curve shape") {
    const auto roc = roc_from_scores(std::vector<double>{3, 2, 2, 1}, std::vector<Label>{S, N, S, N});
    REQUIRE(roc.points.size() == 4);
    CHECK(std::isinf(roc.points[0].threshold));
    CHECK(roc.points[0].fpr == 0.0);
    CHECK(roc.points[1].threshold == 3.0);
    // tie crosses together
    CHECK(roc.points[2].threshold == 2.0);
    CHECK(roc.points[2].fpr == 0.5);
    CHECK(roc.points[2].tpr == 1.0);
    CHECK(roc.points[3].fpr == 1.0);
    CHECK(roc.auc == doctest::Approx(0.875));
    std::ostringstream csv;
    write_roc_csv(roc, csv);
    CHECK(csv.str().rfind("threshold,fpr,tpr\ninf,0,0\n3,0,0.5\n", 0) == 0);
    const auto j = summary_json(roc);
    CHECK(j.at("auc").get<double>() == doctest::Approx(0.875));
    CHECK(j.at("points") == 4);
}

TEST_CASE("AUC equals Mann-Whitney concordance") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 50 + trial * 10;
        std::vector<double> scores(n);
        std::vector<std::int64_t> iscores(n);
        std::vector<Label> labels(n);
        std::uniform_int_distribution<int> coarse(0, trial % 3 == 0 ? 4 : 1000);
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = i < 2 ? (i ? S : N) : (rng() & 1 ? S : N);
            iscores[i] = coarse(rng) + (labels[i] == S ? trial % 5 : 0);
            scores[i] = static_cast<double>(iscores[i]);
        }
        const double ref = oracle::concordance_auc(scores, labels);
        CHECK(std::abs(roc_from_scores(scores, labels).auc - ref) < 1e-12);
        CHECK(std::abs(roc_from_scores(iscores, labels).auc - ref) < 1e-12);
        std::vector<double> reversed(scores);
        for (auto& s : reversed) s = -s;
        CHECK(std::abs(roc_from_scores(reversed, labels).auc - (1.0 - ref)) < 1e-12);
        const auto roc = roc_from_scores(scores, labels);
        for (std::size_t k = 1; k < roc.points.size(); ++k) {
            CHECK(roc.points[k].fpr >= roc.points[k - 1].fpr);
            CHECK(roc.points[k].tpr >= roc.points[k - 1].tpr);
        }
    }
}

TEST_CASE("curves from operating points") {
    const auto roc = roc_from_points({{10, 0.5, 0.9}, {1, 0.1, 0.6}});
    REQUIRE(roc.points.size() == 4);
    CHECK(roc.points.front().fpr == 0.0);
    CHECK(roc.points.back().tpr == 1.0);
    CHECK(roc.points[1].threshold == 1.0);
    const double expected = 0.1 * 0.6 / 2 + 0.4 * (0.6 + 0.9) / 2 + 0.5 * (0.9 + 1.0) / 2;
    CHECK(roc.auc == doctest::Approx(expected));
}
