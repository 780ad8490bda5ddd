#include "scoring.hpp"
#include "error.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace cvad;

TEST_CASE("fuse: hand arithmetic and zero input") {
    scoring::FusionWeights w{0.6, 0.3, 0.1};
    CHECK(scoring::fuse(0.2, 0.9, 0.5, w) == doctest::Approx(0.44).epsilon(1e-12));
    CHECK(scoring::fuse(0.0, 0.0, 0.0, w) == 0.0);
}

TEST_CASE("fuse matches a scalar oracle on random triples") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> score(0.0, 1.0);
    std::uniform_real_distribution<double> weight(0.0, 2.0);
    for (int i = 0; i < 1000; ++i) {
        scoring::FusionWeights w{weight(rng), weight(rng), weight(rng) + 1e-6};
        double a = score(rng), b = score(rng), c = score(rng);
        double expected = w.frame * a + w.position * b + w.temporal * c;
        CHECK(scoring::fuse(a, b, c, w) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("fuse is monotone in each input") {
    scoring::FusionWeights w{0.5, 0.3, 0.2};
    double base = scoring::fuse(0.4, 0.4, 0.4, w);
    CHECK(scoring::fuse(0.5, 0.4, 0.4, w) >= base);
    CHECK(scoring::fuse(0.4, 0.5, 0.4, w) >= base);
    CHECK(scoring::fuse(0.4, 0.4, 0.5, w) >= base);
}

TEST_CASE("invalid weights are rejected") {
    scoring::FusionWeights negative{-0.1, 0.5, 0.5};
    scoring::FusionWeights all_zero{0.0, 0.0, 0.0};
    CHECK_THROWS_AS(negative.validate(), Error);
    CHECK_THROWS_AS(all_zero.validate(), Error);
    scoring::FusionWeights frame_only{1.0, 0.0, 0.0};
    frame_only.validate(); // fine
}

TEST_CASE("expand duplicates segment scores over frames") {
    auto out = scoring::expand({0.1, 0.9}, {4, 4}, 8);
    CHECK(out == std::vector<double>{0.1, 0.1, 0.1, 0.1, 0.9, 0.9, 0.9, 0.9});
}

TEST_CASE("expand backfills dropped tail frames with the last segment score") {
    auto out = scoring::expand({0.5}, {24}, 26);
    CHECK(out.size() == 26);
    CHECK(std::all_of(out.begin(), out.end(), [](double v) { return v == 0.5; }));
}

TEST_CASE("expand validates its inputs") {
    CHECK_THROWS_AS(scoring::expand({}, {}, 0), Error);
    CHECK_THROWS_AS(scoring::expand({0.5}, {4, 4}, 8), Error);
    CHECK_THROWS_AS(scoring::expand({0.5, 0.6}, {4, 4}, 6), Error);
}

TEST_CASE("smoothing preserves constant series") {
    std::vector<double> series(100, 0.42);
    auto out = scoring::gaussian_smooth(series, 10.0);
    for (double v : out) CHECK(v == doctest::Approx(0.42).epsilon(1e-9));
}

TEST_CASE("kernel mass is preserved on a centered impulse") {
    std::vector<double> series(201, 0.0);
    series[100] = 1.0;
    auto out = scoring::gaussian_smooth(series, 10.0);
    double sum = std::accumulate(out.begin(), out.end(), 0.0);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("tiny sigma approximates identity") {
    std::vector<double> series{0.1, 0.9, 0.3, 0.7, 0.2};
    auto out = scoring::gaussian_smooth(series, 0.01);
    for (std::size_t i = 0; i < series.size(); ++i)
        CHECK(out[i] == doctest::Approx(series[i]).epsilon(1e-6));
}

TEST_CASE("smoothed series stays inside the raw range") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> series(64);
    for (double& v : series) v = dist(rng);
    auto out = scoring::gaussian_smooth(series, 4.0);
    double lo = *std::min_element(series.begin(), series.end());
    double hi = *std::max_element(series.begin(), series.end());
    for (double v : out) {
        CHECK(v >= lo - 1e-12);
        CHECK(v <= hi + 1e-12);
    }
}

TEST_CASE("smoothing rejects non-positive sigma") {
    CHECK_THROWS_AS(scoring::gaussian_smooth({0.1}, 0.0), Error);
    CHECK_THROWS_AS(scoring::gaussian_smooth({0.1}, -1.0), Error);
}

TEST_CASE("aggregate_max basics") {
    CHECK(scoring::aggregate_max({{0.3, 0.6}}) == std::vector<double>{0.3, 0.6});
    CHECK(scoring::aggregate_max({{0.1, 0.9}, {0.5, 0.2}}) ==
          std::vector<double>{0.5, 0.9});
    CHECK_THROWS_AS(scoring::aggregate_max({}), Error);
    CHECK_THROWS_AS(scoring::aggregate_max({{0.1}, {0.1, 0.2}}), Error);
}

TEST_CASE("aggregation is invariant to query order") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<std::vector<double>> series(5, std::vector<double>(32));
    for (auto& s : series)
        for (double& v : s) v = dist(rng);
    auto expected = scoring::aggregate_max(series);
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(series.begin(), series.end(), rng);
        CHECK(scoring::aggregate_max(series) == expected);
    }
}
