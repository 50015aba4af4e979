#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "arena/errors.hpp"
#include "arena/metrics.hpp"

using namespace arena;

TEST_CASE("compute_errors: hand-evaluated fixture") {
    const std::vector<double> actual{100.0};
    const std::vector<double> predicted{110.0};
    const ForecastErrors e = compute_errors(actual, predicted);
    CHECK(e.mape == doctest::Approx(0.10).epsilon(1e-12));
    CHECK(e.mae == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(e.mse == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(e.rmse == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("compute_errors: identical series gives zero everywhere") {
    const std::vector<double> v{3.0, 4.0, 5.0};
    const ForecastErrors e = compute_errors(v, v);
    CHECK(e.mae == 0.0);
    CHECK(e.mse == 0.0);
    CHECK(e.rmse == 0.0);
    CHECK(e.mape == 0.0);
}

TEST_CASE("compute_errors: error paths") {
    CHECK_THROWS_AS(compute_errors(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}),
                    LengthMismatch);
    CHECK_THROWS_AS(compute_errors(std::vector<double>{0.0, 2.0}, std::vector<double>{1.0, 2.0}),
                    ZeroActualForMape);
}

TEST_CASE("compute_errors: rmse is sqrt of mse") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a, p;
        const int n = 1 + static_cast<int>(rng() % 30);
        for (int i = 0; i < n; ++i) {
            a.push_back(1.0 + static_cast<double>(rng() % 1000));
            p.push_back(1.0 + static_cast<double>(rng() % 1000));
        }
        const ForecastErrors e = compute_errors(a, p);
        CHECK(std::fabs(e.rmse - std::sqrt(e.mse)) < 1e-12);
    }
}

TEST_CASE("mmn: hand-evaluated fixture and degenerate cases") {
    const std::vector<double> out = mmn(std::vector<double>{0.05, 0.10, 0.15});
    REQUIRE(out.size() == 3);
    CHECK(out[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out[2] == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> flat = mmn(std::vector<double>{0.07, 0.07});
    CHECK(flat[0] == 0.5);
    CHECK(flat[1] == 0.5);

    const std::vector<double> single = mmn(std::vector<double>{3.2});
    CHECK(single[0] == 0.5);
}

TEST_CASE("mmn: invariant under positive affine transforms") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 20);
        std::vector<double> v;
        for (int i = 0; i < n; ++i) v.push_back(static_cast<double>(rng() % 10000) / 100.0);
        const double a = 0.1 + static_cast<double>(rng() % 100) / 10.0;
        const double b = static_cast<double>(rng() % 100) - 50.0;
        std::vector<double> w;
        for (double x : v) w.push_back(a * x + b);
        const auto nv = mmn(v);
        const auto nw = mmn(w);
        for (int i = 0; i < n; ++i) CHECK(std::fabs(nv[static_cast<std::size_t>(i)] -
                                                    nw[static_cast<std::size_t>(i)]) < 1e-9);
    }
}

TEST_CASE("hhi: fixtures") {
    CHECK(hhi(std::vector<double>{1.0}) == doctest::Approx(1.0));
    CHECK(hhi(std::vector<double>{3.0, 1.0}) == doctest::Approx(0.625).epsilon(1e-12));
    const std::vector<double> equal(8, 2.5);
    CHECK(hhi(equal) == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
    CHECK_THROWS_AS(hhi(std::vector<double>{1.0, 0.0}), NonPositiveScore);
    CHECK_THROWS_AS(hhi(std::vector<double>{}), NonPositiveScore);
}

TEST_CASE("hhi: scale invariance and bounds") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 30);
        std::vector<double> v, scaled;
        const double c = 0.01 + static_cast<double>(rng() % 1000) / 10.0;
        for (int i = 0; i < n; ++i) {
            const double x = 0.1 + static_cast<double>(rng() % 1000);
            v.push_back(x);
            scaled.push_back(c * x);
        }
        const double h = hhi(v);
        CHECK(std::fabs(h - hhi(scaled)) < 1e-12);
        CHECK(h >= 1.0 / static_cast<double>(n) - 1e-12);
        CHECK(h <= 1.0 + 1e-12);
    }
}
