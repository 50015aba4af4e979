#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "arena/errors.hpp"
#include "arena/evaluation.hpp"

using namespace arena;

TEST_CASE("compute_em: hand-evaluated three-agent fixture") {
    const std::map<int, double> mapes{{1, 0.05}, {2, 0.10}, {3, 0.15}};
    const EmRound em = compute_em(mapes);
    CHECK(em.mean_mape == doctest::Approx(0.10).epsilon(1e-12));
    CHECK(em.best_mape == doctest::Approx(0.05).epsilon(1e-12));
    CHECK_FALSE(em.degenerate_top);

    const EmScore& a = em.of(1);
    CHECK(a.rank == 1);
    CHECK(a.top == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a.ave == doctest::Approx(-0.5).epsilon(1e-12));

    const EmScore& c = em.of(3);
    CHECK(c.rank == 3);
    CHECK(c.top == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(c.ave == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("compute_em: equal mapes tie-break by ascending agent id") {
    const std::map<int, double> mapes{{7, 0.2}, {3, 0.2}, {5, 0.2}};
    const EmRound em = compute_em(mapes);
    CHECK(em.of(3).rank == 1);
    CHECK(em.of(5).rank == 2);
    CHECK(em.of(7).rank == 3);
    for (const EmScore& s : em.scores) {
        CHECK(s.top == 0.0);
        CHECK(s.ave == 0.0);
    }
}

TEST_CASE("compute_em: zero best mape flags the round, top falls back to absolute") {
    const std::map<int, double> mapes{{1, 0.0}, {2, 0.08}};
    const EmRound em = compute_em(mapes);
    CHECK(em.degenerate_top);
    CHECK(em.of(1).top == 0.0);
    CHECK(em.of(2).top == doctest::Approx(0.08));
}

TEST_CASE("compute_em: needs two agents") {
    CHECK_THROWS_AS(compute_em(std::map<int, double>{{1, 0.1}}), TooFewAgents);
}

TEST_CASE("compute_em: ranks are invariant under scaling all mapes") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        std::map<int, double> mapes, scaled;
        const int n = 2 + static_cast<int>(rng() % 12);
        const double c = 0.01 + static_cast<double>(rng() % 500) / 10.0;
        for (int i = 0; i < n; ++i) {
            const double m = static_cast<double>(rng() % 1000) / 1000.0;
            mapes[i] = m;
            scaled[i] = c * m;
        }
        const EmRound a = compute_em(mapes);
        const EmRound b = compute_em(scaled);
        for (int i = 0; i < n; ++i) CHECK(a.of(i).rank == b.of(i).rank);
    }
}

TEST_CASE("update_cs: hand-evaluated fixture") {
    const std::map<int, double> m_prev{{1, 1.0}, {2, 1.0}, {3, 1.0}};
    const std::map<int, double> mapes{{1, 0.05}, {2, 0.10}, {3, 0.15}};
    const std::map<int, double> out = update_cs(m_prev, mapes);
    CHECK(out.at(1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(out.at(2) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(out.at(3) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("update_cs: all-equal mapes multiply every score by 1.5") {
    const std::map<int, double> m_prev{{1, 2.0}, {2, 4.0}};
    const std::map<int, double> mapes{{1, 0.3}, {2, 0.3}};
    const std::map<int, double> out = update_cs(m_prev, mapes);
    CHECK(out.at(1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(out.at(2) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("update_cs: the best agent exactly doubles, the worst is unchanged") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 10);
        std::map<int, double> m_prev, mapes;
        for (int i = 0; i < n; ++i) {
            m_prev[i] = 0.5 + static_cast<double>(rng() % 1000) / 100.0;
            mapes[i] = static_cast<double>(rng() % 100000) / 100000.0;
        }
        const auto [mn_it, mx_it] =
            std::minmax_element(mapes.begin(), mapes.end(),
                                [](const auto& a, const auto& b) { return a.second < b.second; });
        if (mn_it->second == mx_it->second) continue;  // degenerate draw
        const auto out = update_cs(m_prev, mapes);
        CHECK(out.at(mn_it->first) == 2.0 * m_prev.at(mn_it->first));  // exact
        CHECK(out.at(mx_it->first) == m_prev.at(mx_it->first));       // exact
        for (const auto& [id, m] : out) CHECK(m >= m_prev.at(id));    // never decreases
    }
}

TEST_CASE("update_cs: key mismatch and non-positive scores are rejected") {
    CHECK_THROWS_AS(update_cs({{1, 1.0}}, {{1, 0.1}, {2, 0.2}}), KeyMismatch);
    CHECK_THROWS_AS(update_cs({{1, 1.0}, {3, 1.0}}, {{1, 0.1}, {2, 0.2}}), KeyMismatch);
    CHECK_THROWS_AS(update_cs({{1, 0.0}, {2, 1.0}}, {{1, 0.1}, {2, 0.2}}), NonPositiveScore);
}

TEST_CASE("apply_sf: fixtures") {
    std::vector<SfCandidate> ten;
    for (int i = 1; i <= 10; ++i) ten.push_back({i, static_cast<double>(i), 0.1});
    const SfOutcome big = apply_sf(ten, 0.7);
    CHECK(big.eliminated.size() == 3);  // floor(0.3 * 10)
    CHECK(big.survivors.size() == 7);
    CHECK(big.eliminated == std::vector<int>{1, 2, 3});

    const SfOutcome none = apply_sf(ten, 1.0);
    CHECK(none.eliminated.empty());
    CHECK(none.survivors.size() == 10);

    std::vector<SfCandidate> five;
    for (int i = 1; i <= 5; ++i) five.push_back({i, static_cast<double>(6 - i), 0.1});
    // scores 5,4,3,2,1 on ids 1..5; alpha 0.6 eliminates the two lowest scores
    const SfOutcome out = apply_sf(five, 0.6);
    REQUIRE(out.eliminated.size() == 2);
    CHECK(out.eliminated == std::vector<int>{5, 4});  // M=1 then M=2
    CHECK(out.survivors == std::vector<int>{1, 2, 3});
}

TEST_CASE("apply_sf: cs ties eliminate higher last-round mape, then higher id") {
    std::vector<SfCandidate> agents{
        {1, 1.0, 0.10},
        {2, 1.0, 0.30},
        {3, 1.0, 0.30},
        {4, 5.0, 0.50},
    };
    const SfOutcome out = apply_sf(agents, 0.5);  // eliminate floor(0.5*4) = 2
    REQUIRE(out.eliminated.size() == 2);
    CHECK(out.eliminated[0] == 3);  // tie on CS and MAPE -> higher id first
    CHECK(out.eliminated[1] == 2);
    CHECK(out.survivors == std::vector<int>{1, 4});
}

TEST_CASE("apply_sf: overrides, degenerate populations") {
    std::vector<SfCandidate> two{{1, 2.0, 0.1}, {2, 1.0, 0.2}};
    const SfOutcome forced = apply_sf(two, 1.0, 1);
    CHECK(forced.eliminated == std::vector<int>{2});
    CHECK_THROWS_AS(apply_sf(two, 1.0, 2), AllWouldBeEliminated);
    CHECK_THROWS_AS(apply_sf(std::vector<SfCandidate>{{1, 1.0, 0.1}}, 0.5), TooFewAgents);
    CHECK_THROWS_AS(apply_sf(two, 0.0), ConfigInvalid);
}

TEST_CASE("apply_sf: agreement with a brute-force sort oracle") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 49);
        std::vector<SfCandidate> agents;
        for (int i = 1; i <= n; ++i) {
            // coarse buckets force plenty of exact CS ties
            agents.push_back({i, static_cast<double>(rng() % 8),
                              static_cast<double>(rng() % 5) / 10.0});
        }
        for (auto& a : agents) a.cumulative_score += 1.0;  // keep scores positive
        const double alpha = 0.02 + 0.98 * static_cast<double>(rng() % 1000) / 1000.0;
        const int expected_k = static_cast<int>(std::floor((1.0 - alpha) * n));
        if (expected_k >= n) continue;

        const SfOutcome out = apply_sf(agents, alpha);

        // oracle: full sort worst-to-best by (cs asc, mape desc, id desc)
        std::vector<SfCandidate> sorted = agents;
        std::sort(sorted.begin(), sorted.end(), [](const SfCandidate& a, const SfCandidate& b) {
            if (a.cumulative_score != b.cumulative_score) {
                return a.cumulative_score < b.cumulative_score;
            }
            if (a.last_mape != b.last_mape) return a.last_mape > b.last_mape;
            return a.id > b.id;
        });
        std::vector<int> expected_elim;
        for (int i = 0; i < expected_k; ++i) expected_elim.push_back(sorted[static_cast<std::size_t>(i)].id);

        CHECK(out.eliminated == expected_elim);
        CHECK(out.eliminated.size() + out.survivors.size() == static_cast<std::size_t>(n));
        // survivors hold the top cumulative scores
        double worst_survivor = 1e300;
        for (int id : out.survivors) {
            for (const auto& a : agents) {
                if (a.id == id) worst_survivor = std::min(worst_survivor, a.cumulative_score);
            }
        }
        for (int id : out.eliminated) {
            for (const auto& a : agents) {
                if (a.id == id) CHECK(a.cumulative_score <= worst_survivor + 1e-15);
            }
        }
    }
}
