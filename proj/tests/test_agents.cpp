#include <doctest.h>

#include "arena/agents.hpp"
#include "arena/errors.hpp"

using namespace arena;

TEST_CASE("normalize_clauses: markers, sentences, whitespace, duplicates") {
    const std::string text =
        "Positive Issues Leading to Increase in Load Consumption:\n"
        "\n"
        "1. Economic Growth: A surge in economic   activity increases energy consumption.\n"
        "2. Seasonal Factors: Extreme weather increases the use of air conditioning.\n"
        "- Political Stability: Impacts energy policies and investments.\n"
        "(3) Urbanization: Expansion of cities contributes to higher energy usage.\n"
        "1. Economic Growth: A surge in economic activity increases energy consumption.\n";
    const auto clauses = normalize_clauses(text);
    REQUIRE(clauses.size() == 5);
    CHECK(clauses[0] == "Positive Issues Leading to Increase in Load Consumption:");
    CHECK(clauses[1] == "Economic Growth: A surge in economic activity increases energy consumption.");
    CHECK(clauses[2] == "Seasonal Factors: Extreme weather increases the use of air conditioning.");
    CHECK(clauses[3] == "Political Stability: Impacts energy policies and investments.");
    CHECK(clauses[4] == "Urbanization: Expansion of cities contributes to higher energy usage.");
}

TEST_CASE("normalize_clauses: sentence boundaries split blocks") {
    const auto clauses =
        normalize_clauses("Demand rises in summer. Heatwaves drive cooling load. e.g. compressors");
    REQUIRE(clauses.size() == 2);
    CHECK(clauses[0] == "Demand rises in summer.");
    CHECK(clauses[1] == "Heatwaves drive cooling load. e.g. compressors");
}

TEST_CASE("normalize_clauses: continuation lines join their block") {
    const auto clauses = normalize_clauses("1. A long clause\n   that wraps onto a second line\n");
    REQUIRE(clauses.size() == 1);
    CHECK(clauses[0] == "A long clause that wraps onto a second line");
}

TEST_CASE("logic_text round-trips through normalize_clauses") {
    LogicDocument doc;
    doc.clauses = {"Watch fuel prices.", "Heatwaves drive cooling demand.",
                   "Factory openings raise baseline load."};
    doc.version = 3;
    const LogicDocument again = logic_from_text(logic_text(doc), 4, LogicProvenance::reflected);
    CHECK(again.clauses == doc.clauses);
    CHECK(again.version == 4);
}

TEST_CASE("init_agents: profile counts follow round-half-up of ci * count") {
    const auto a = init_agents(10, 0.6, 7);
    int high = 0;
    for (const Agent& ag : a) high += ag.profile == Profile::high_competitive ? 1 : 0;
    CHECK(high == 6);

    int high_zero = 0;
    for (const Agent& ag : init_agents(10, 0.0, 7)) {
        high_zero += ag.profile == Profile::high_competitive ? 1 : 0;
    }
    CHECK(high_zero == 0);

    int high_q = 0;
    for (const Agent& ag : init_agents(10, 0.25, 7)) {
        high_q += ag.profile == Profile::high_competitive ? 1 : 0;  // 2.5 rounds up to 3
    }
    CHECK(high_q == 3);
}

TEST_CASE("init_agents: uniform starting state, seeded assignment") {
    const auto a = init_agents(8, 0.5, 1);
    const auto b = init_agents(8, 0.5, 1);
    const auto c = init_agents(8, 0.5, 2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == static_cast<int>(i) + 1);
        CHECK(a[i].cumulative_score == 1.0);
        CHECK(a[i].alive);
        CHECK(a[i].logic.version == 0);
        CHECK(a[i].logic.empty());
        CHECK(a[i].profile == b[i].profile);  // deterministic per seed
    }
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) differs |= a[i].profile != c[i].profile;
    CHECK(differs);  // a different seed shuffles the assignment
    CHECK_THROWS_AS(init_agents(1, 0.5, 1), ConfigInvalid);
}

TEST_CASE("cld/cpd: counted from authentic publications") {
    Agent a;
    a.id = 4;
    for (int i = 0; i < 4; ++i) {
        PublicationRecord p;
        p.authentic = i != 2;  // 3 of 4 authentic
        a.publication_log.push_back(p);
    }
    CHECK(cld(a) == doctest::Approx(0.75));
    CHECK(cpd(a) == doctest::Approx(0.25));
    CHECK(cld(a) + cpd(a) == doctest::Approx(1.0).epsilon(1e-15));

    Agent all_true;
    all_true.id = 5;
    PublicationRecord p;
    p.authentic = true;
    all_true.publication_log.assign(3, p);
    CHECK(cld(all_true) == 1.0);

    Agent none;
    none.id = 6;
    CHECK_THROWS_AS(cld(none), NoPublications);
}
