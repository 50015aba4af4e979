#include <doctest.h>

#include <cmath>
#include <random>

#include "arena/errors.hpp"
#include "arena/reflection.hpp"
#include "arena/sim_strategy.hpp"
#include "testing_support.hpp"

using namespace arena;

namespace {

// News fixture keyed by signal keywords; one item per keyword inside each
// window's candidate range plus one noise item.
struct AblationFixture {
    NewsDb db;
    std::vector<Window> windows;
    std::shared_ptr<ScriptedPredictor> predictor;

    explicit AblationFixture(const std::vector<std::string>& keywords, int window_count = 3) {
        std::vector<NewsItem> items;
        ScriptedPredictorConfig cfg;
        cfg.base = 0.5;
        cfg.gain = 0.04;
        const Date base = *parse_iso_date("2021-02-01");
        for (int w = 0; w < window_count; ++w) {
            for (std::size_t k = 0; k < keywords.size(); ++k) {
                NewsItem n;
                n.date = base + std::chrono::days(7 * w + static_cast<int>(k % 7));
                n.region = "series";
                n.text = "A severe " + keywords[k] + " warning was issued across the area on day " +
                         std::to_string(7 * w + static_cast<int>(k)) + ".";
                n.id = news_id(n.date, n.region, n.text);
                cfg.relevant_ids.insert(n.id);
                items.push_back(n);
            }
            NewsItem noise;
            noise.date = base + std::chrono::days(7 * w + 2);
            noise.region = "series";
            noise.text = "Fresh celebrity chatter dominated the feeds near day " +
                         std::to_string(7 * w) + ".";
            noise.id = news_id(noise.date, noise.region, noise.text);
            items.push_back(noise);

            std::vector<double> history, target;
            for (int i = 0; i < 7; ++i) history.push_back(100.0 + i + w);
            for (int i = 0; i < 7; ++i) target.push_back(110.0 + i + w);
            windows.push_back(testing::make_window(
                w, history, target, format_iso_date(base + std::chrono::days(7 * w))));
        }
        db = NewsDb(std::move(items));
        predictor = std::make_shared<ScriptedPredictor>(cfg);
    }
};

LogicDocument doc_of(const std::vector<std::string>& clauses, int version = 1) {
    LogicDocument d;
    d.clauses = clauses;
    d.version = version;
    return d;
}

}  // namespace

TEST_CASE("diff_logic: additions only, in candidate order") {
    const LogicDocument prev = doc_of({"A", "B"});
    CHECK(diff_logic(prev, prev).empty());

    const std::vector<Delta> added = diff_logic(doc_of({"A", "B", "C", "D"}, 2), prev);
    REQUIRE(added.size() == 2);
    CHECK(added[0].clause == "C");
    CHECK(added[1].clause == "D");
    for (const Delta& d : added) CHECK(d.classification == DeltaClass::pending);

    // a removed clause is not a delta
    const std::vector<Delta> swapped = diff_logic(doc_of({"A", "C"}, 2), prev);
    REQUIRE(swapped.size() == 1);
    CHECK(swapped[0].clause == "C");
}

TEST_CASE("classify_delta: signal clause is good, no-effect clause is bad, tie is bad") {
    AblationFixture fx({"heatwave", "blackout"}, 1);
    const LogicDocument candidate = doc_of({
        sim_signal_clause("heatwave"),
        sim_signal_clause("blackout"),
        sim_noise_clause(0),
    });

    const std::vector<Delta> deltas = classify_deltas(
        candidate,
        {{sim_signal_clause("blackout"), DeltaClass::pending, 0, 0},
         {sim_noise_clause(0), DeltaClass::pending, 0, 0}},
        fx.windows, *fx.predictor, fx.db, 7);

    REQUIRE(deltas.size() == 2);
    // removing the blackout clause loses one relevant selection on the window
    CHECK(deltas[0].classification == DeltaClass::good);
    CHECK(deltas[0].ir_without > deltas[0].ir_with);
    CHECK(deltas[0].ir_without - deltas[0].ir_with == doctest::Approx(0.04).epsilon(1e-9));
    // the noise clause changes nothing: exact tie, labeled bad
    CHECK(deltas[1].classification == DeltaClass::bad);
    CHECK(deltas[1].ir_without == deltas[1].ir_with);
}

TEST_CASE("classify_delta: misleading clause that lowers error when removed is bad") {
    AblationFixture fx({"heatwave"}, 1);
    // penalize the noise item so selecting it strictly hurts
    ScriptedPredictorConfig cfg;
    cfg.base = 0.09;
    cfg.gain = 0.0;
    cfg.penalty = 0.02;
    for (const NewsItem& n : fx.db.all()) {
        if (n.text.find("celebrity") != std::string::npos) cfg.penalized_ids.insert(n.id);
    }
    ScriptedPredictor trap(cfg);

    const LogicDocument candidate = doc_of({sim_signal_clause("heatwave"), sim_noise_clause(0)});
    const Delta d = classify_delta({sim_noise_clause(0), DeltaClass::pending, 0, 0}, candidate,
                                   fx.windows, trap, fx.db, 7);
    CHECK(d.classification == DeltaClass::bad);
    CHECK(d.ir_with == doctest::Approx(0.11).epsilon(1e-9));
    CHECK(d.ir_without == doctest::Approx(0.09).epsilon(1e-9));
    CHECK(d.ir_without < d.ir_with);
}

TEST_CASE("classify_deltas: paired evaluation shares one baseline") {
    AblationFixture fx({"heatwave", "blackout", "stimulus"});
    const LogicDocument candidate = doc_of({
        sim_signal_clause("heatwave"),
        sim_signal_clause("blackout"),
        sim_signal_clause("stimulus"),
    });
    const auto deltas = classify_deltas(candidate,
                                        {{sim_signal_clause("blackout"), DeltaClass::pending, 0, 0},
                                         {sim_signal_clause("stimulus"), DeltaClass::pending, 0, 0}},
                                        fx.windows, *fx.predictor, fx.db, 7);
    REQUIRE(deltas.size() == 2);
    CHECK(deltas[0].ir_with == deltas[1].ir_with);  // same windows, same candidate
}

TEST_CASE("classify_delta: brute-force single-ablation oracle agreement") {
    const std::vector<std::string> all_keywords = {"heatwave", "blackout", "stimulus", "festival"};
    std::mt19937_64 rng(97);
    int cases = 0;
    for (int trial = 0; trial < 60; ++trial) {
        AblationFixture fx(all_keywords, 2 + static_cast<int>(rng() % 3));

        // candidate: random mix of signal and noise clauses, up to 4 deltas
        std::vector<std::string> clauses{"Factors behind regional load swings are listed below."};
        std::vector<std::string> delta_clauses;
        for (const std::string& kw : all_keywords) {
            if (rng() % 2) {
                clauses.push_back(sim_signal_clause(kw));
                if (rng() % 2 && delta_clauses.size() < 4) {
                    delta_clauses.push_back(clauses.back());
                }
            }
        }
        if (rng() % 2) {
            clauses.push_back(sim_noise_clause(rng() % sim_noise_clause_count()));
            if (delta_clauses.size() < 4) delta_clauses.push_back(clauses.back());
        }
        if (delta_clauses.empty()) continue;
        const LogicDocument candidate = doc_of(clauses, 2);

        std::vector<Delta> pending;
        for (const std::string& c : delta_clauses) pending.push_back({c, DeltaClass::pending, 0, 0});
        const auto labeled = classify_deltas(candidate, pending, fx.windows, *fx.predictor, fx.db, 7);

        // oracle: recompute each ablation pair independently
        for (const Delta& d : labeled) {
            const double ir_with = ir_mape(candidate, fx.windows, *fx.predictor, fx.db, 7);
            LogicDocument ablated = candidate;
            std::erase(ablated.clauses, d.clause);
            const double ir_without = ir_mape(ablated, fx.windows, *fx.predictor, fx.db, 7);
            const DeltaClass expected =
                ir_without > ir_with ? DeltaClass::good : DeltaClass::bad;
            CHECK(d.classification == expected);
            CHECK(d.ir_with == ir_with);
            CHECK(d.ir_without == ir_without);
            ++cases;
        }
    }
    CHECK(cases >= 50);
}

TEST_CASE("stage1_update: scripted replies reshape the candidate") {
    Agent agent;
    agent.id = 2;
    agent.alive = true;
    agent.logic = doc_of({"Alpha clause.", "Beta clause."}, 3);
    const EmScore em{2, 1, 0.0, -0.1, 0.05};

    auto backend = std::make_shared<ScriptedLlm>();
    backend->add_response("reflection_improve", "*",
                          "(1) Thought Process:\nthinking\n\n(2) Final Adjusted Logic:\n1. Alpha "
                          "clause.\n2. Beta clause.\n3. Gamma clause.\n");
    LlmGateway gw(backend, RetryPolicy{0, 0});
    const LogicDocument candidate =
        stage1_update(agent, {}, em, 4, gw, PromptVariant::original, {1, 2, 2});
    CHECK(candidate.version == 4);
    CHECK(candidate.provenance == LogicProvenance::reflected);
    REQUIRE(candidate.clauses.size() == 3);
    CHECK(candidate.clauses[2] == "Gamma clause.");

    // echoing the old logic verbatim produces an empty diff later
    auto echo = std::make_shared<ScriptedLlm>();
    echo->add_response("reflection_improve", "*",
                       "(2) Final Adjusted Logic:\n1. Alpha clause.\n2. Beta clause.\n");
    LlmGateway gw2(echo, RetryPolicy{0, 0});
    const LogicDocument unchanged =
        stage1_update(agent, {}, em, 4, gw2, PromptVariant::original, {1, 2, 2});
    CHECK(unchanged.clauses == agent.logic.clauses);
    CHECK(diff_logic(unchanged, agent.logic).empty());
}

TEST_CASE("stage1_update: adopted opponent clause lands in the candidate") {
    Agent agent;
    agent.id = 1;
    agent.logic = doc_of({"Alpha clause."}, 1);
    const EmScore em{1, 2, 0.5, 0.2, 0.2};
    const std::vector<InboxItem> inbox{{3, "1. Lunar cycles drive demand."}};

    auto backend = std::make_shared<ScriptedLlm>();
    backend->add_response("reflection_improve", "*",
                          "(2) Final Adjusted Logic:\n1. Alpha clause.\n2. Lunar cycles drive "
                          "demand.\n");
    LlmGateway gw(backend, RetryPolicy{0, 0});
    const LogicDocument candidate =
        stage1_update(agent, inbox, em, 3, gw, PromptVariant::original, {1, 1, 1});
    CHECK(candidate.contains("Lunar cycles drive demand."));
    const auto deltas = diff_logic(candidate, agent.logic);
    REQUIRE(deltas.size() == 1);
    CHECK(deltas[0].clause == "Lunar cycles drive demand.");
}

TEST_CASE("stage1_update: malformed reply repairs once then raises") {
    Agent agent;
    agent.id = 1;
    agent.logic = doc_of({"Alpha clause."}, 1);
    auto backend = std::make_shared<ScriptedLlm>();
    backend->add_response("reflection_improve", "*", "no recognizable sections");
    LlmGateway gw(backend, RetryPolicy{0, 0});
    CHECK_THROWS_AS(stage1_update(agent, {}, EmScore{1, 1, 0, 0, 0.1}, 2, gw,
                                  PromptVariant::original, {1, 1, 1}),
                    MalformedReflection);
}

TEST_CASE("stage3_finalize: deterministic fallback keeps near-neutral bad deltas") {
    const LogicDocument candidate = doc_of({"A", "B"});
    std::vector<Delta> deltas{{"B", DeltaClass::bad, 0.0800, 0.0805}};
    const ReflectionOutcome near = stage3_finalize(candidate, deltas, {}, nullptr, 0.001);
    CHECK(near.removed.empty());  // |0.0805-0.0800| < 0.001
    CHECK(near.final_logic.clauses == candidate.clauses);

    deltas[0].ir_without = 0.095;  // clearly harmful to keep
    const ReflectionOutcome far = stage3_finalize(candidate, deltas, {}, nullptr, 0.001);
    REQUIRE(far.removed.size() == 1);
    CHECK(far.final_logic.clauses == std::vector<std::string>{"A"});
}

TEST_CASE("stage3_finalize: scripted retention verdict removes the clause") {
    const LogicDocument candidate = doc_of({"A", "B"});
    const std::vector<Delta> deltas{{"B", DeltaClass::bad, 0.08, 0.07}};
    auto backend = std::make_shared<ScriptedLlm>();
    backend->add_response("msr_finalize", "*",
                          R"({"content": "B", "conclusion": "no", "reason": "r", "logic": "A"})");
    LlmGateway gw(backend, RetryPolicy{0, 0});
    const ReflectionOutcome out = stage3_finalize(candidate, deltas, {}, &gw, 0.001, {1, 1, 1});
    REQUIRE(out.removed.size() == 1);
    CHECK(out.removed[0].clause == "B");
    CHECK(out.final_logic.clauses == std::vector<std::string>{"A"});

    auto keep = std::make_shared<ScriptedLlm>();
    keep->add_response("msr_finalize", "*",
                       R"({"content": "B", "conclusion": "yes", "reason": "r", "logic": "A B"})");
    LlmGateway gw2(keep, RetryPolicy{0, 0});
    const ReflectionOutcome kept = stage3_finalize(candidate, deltas, {}, &gw2, 0.001, {1, 1, 1});
    CHECK(kept.removed.empty());
}

TEST_CASE("stage3_finalize: good deltas always survive; no bad deltas is the identity") {
    const LogicDocument candidate = doc_of({"A", "B", "C"});
    const std::vector<Delta> deltas{{"B", DeltaClass::good, 0.08, 0.12},
                                    {"C", DeltaClass::good, 0.08, 0.09}};
    const ReflectionOutcome out = stage3_finalize(candidate, deltas, {}, nullptr, 0.001);
    CHECK(out.removed.empty());
    CHECK(out.final_logic.clauses == candidate.clauses);

    const ReflectionOutcome empty = stage3_finalize(candidate, {}, {}, nullptr, 0.001);
    CHECK(empty.final_logic.clauses == candidate.clauses);

    CHECK_THROWS_AS(
        stage3_finalize(candidate, {{"B", DeltaClass::pending, 0, 0}}, {}, nullptr, 0.001), Error);
}
