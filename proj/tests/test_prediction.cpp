#include <doctest.h>

#include <cmath>
#include <random>

#include "arena/errors.hpp"
#include "arena/metrics.hpp"
#include "arena/prediction.hpp"
#include "arena/sim_strategy.hpp"
#include "testing_support.hpp"

using namespace arena;
using arena::testing::TempDir;

namespace {

NewsDb fixture_news() {
    std::vector<NewsItem> items;
    auto add = [&](const std::string& date, const std::string& text) {
        NewsItem n;
        n.date = *parse_iso_date(date);
        n.region = "series";
        n.text = text;
        n.id = news_id(n.date, n.region, n.text);
        items.push_back(n);
    };
    add("2021-02-01", "A severe heatwave warning was issued across the area.");
    add("2021-02-05", "A severe blackout warning was issued across the area.");
    add("2021-02-07", "A severe stimulus warning was issued across the area.");
    add("2021-02-08", "Fresh celebrity chatter dominated the feeds.");
    add("2021-01-20", "far outside any window range");
    return NewsDb(std::move(items));
}

Window fixture_window() {
    // history 2021-02-01..07, prediction date 2021-02-08
    return testing::make_window(0, {100, 101, 102, 103, 104, 105, 106}, {110, 111, 112, 113},
                                "2021-02-01");
}

SelectedNews selection_of(const NewsDb& db, const std::vector<std::string>& texts) {
    SelectedNews s;
    for (const NewsItem& n : db.all()) {
        for (const std::string& t : texts) {
            if (n.text.find(t) != std::string::npos) s.long_term.push_back({n.id, "r"});
        }
    }
    return s;
}

}  // namespace

TEST_CASE("persistence predictor repeats the last history value") {
    PersistencePredictor p;
    const Window w = fixture_window();
    const Forecast f = p.predict(w, SelectedNews{}, fixture_news());
    REQUIRE(f.values.size() == w.target.size());
    for (double v : f.values) CHECK(v == 106.0);
}

TEST_CASE("scripted predictor: error falls with relevant-news overlap") {
    const NewsDb db = fixture_news();
    ScriptedPredictorConfig cfg;
    cfg.base = 0.2;
    cfg.gain = 0.05;
    for (const NewsItem& n : db.all()) {
        if (n.text.find("severe") != std::string::npos) cfg.relevant_ids.insert(n.id);
    }
    ScriptedPredictor p(cfg);
    const Window w = fixture_window();

    const SelectedNews none;
    const SelectedNews one = selection_of(db, {"heatwave"});
    const SelectedNews two = selection_of(db, {"heatwave", "blackout"});
    const SelectedNews with_noise = selection_of(db, {"heatwave", "blackout", "celebrity"});

    const double e0 = compute_errors(w.target, p.predict(w, none, db).values).mape;
    const double e1 = compute_errors(w.target, p.predict(w, one, db).values).mape;
    const double e2 = compute_errors(w.target, p.predict(w, two, db).values).mape;
    const double e2n = compute_errors(w.target, p.predict(w, with_noise, db).values).mape;
    CHECK(e0 == doctest::Approx(0.20).epsilon(1e-9));
    CHECK(e1 == doctest::Approx(0.15).epsilon(1e-9));
    CHECK(e2 == doctest::Approx(0.10).epsilon(1e-9));
    CHECK(e2n == doctest::Approx(e2).epsilon(1e-12));  // irrelevant news changes nothing

    // a selection that strictly contains another never forecasts worse
    CHECK(e2 <= e1);
    CHECK(e1 <= e0);

    // error clamps at zero instead of going negative
    ScriptedPredictorConfig strong = cfg;
    strong.gain = 0.5;
    ScriptedPredictor p2(strong);
    const double clamped = compute_errors(w.target, p2.predict(w, two, db).values).mape;
    CHECK(clamped == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("remote predictor: unreachable endpoint raises PredictorFailure") {
    RemotePredictorConfig cfg;
    cfg.base_url = "http://127.0.0.1:9";
    cfg.timeout_ms = 300;
    RemotePredictor p(cfg);
    CHECK_THROWS_AS(p.predict(fixture_window(), SelectedNews{}, fixture_news()), PredictorFailure);
}

TEST_CASE("candidate_news: lookback bounds the pool") {
    const NewsDb db = fixture_news();
    const Window w = fixture_window();
    const auto pool = candidate_news(w, db, 7);
    // [start-7, prediction date] = [2021-01-25, 2021-02-08]
    CHECK(pool.size() == 4);
    for (const NewsItem* n : pool) CHECK(n->text.find("outside") == std::string::npos);
}

TEST_CASE("select_news: parses the three-bucket reply through the gateway") {
    const NewsDb db = fixture_news();
    const Window w = fixture_window();
    const auto pool = candidate_news(w, db, 7);
    REQUIRE(pool.size() >= 3);

    nlohmann::json reply{
        {"Long-Term Effect on Future Load Consumption",
         nlohmann::json::array({{{"id", pool[0]->id}, {"rationality", "industrial build-out"}},
                                {{"id", pool[1]->id}, {"rationality", "grid expansion"}}})},
        {"Short-Term Effect on Today's Load Consumption",
         nlohmann::json::array({{{"id", pool[2]->id}, {"rationality", "heat spike"}},
                                {{"id", pool[3]->id}, {"rationality", "event crowd"}}})},
        {"Real-Time Direct Effect on Today's Load Consumption",
         nlohmann::json::array({{{"id", pool[0]->id}, {"rationality", "outage"}},
                                {{"id", pool[1]->id}, {"rationality", "storm cell"}}})},
    };
    auto backend = std::make_shared<ScriptedLlm>();
    backend->add_response("filter_news", "*", reply.dump());
    LlmGateway gw(backend, RetryPolicy{0, 0});

    const LogicDocument logic = logic_from_text("1. anything", 1, LogicProvenance::initial);
    const SelectedNews sel = select_news(logic, w, db, gw, 7);
    CHECK(sel.long_term.size() == 2);
    CHECK(sel.short_term.size() == 2);
    CHECK(sel.real_time.size() == 2);
    CHECK(sel.dropped_unknown == 0);
    CHECK(sel.long_term[0].rationality == "industrial build-out");
}

TEST_CASE("select_news: unknown ids are dropped with a warning count") {
    const NewsDb db = fixture_news();
    const Window w = fixture_window();
    const auto pool = candidate_news(w, db, 7);
    nlohmann::json reply{
        {"Long-Term Effect on Future Load Consumption",
         nlohmann::json::array({{{"id", pool[0]->id}, {"rationality", "ok"}},
                                {{"id", "bogus-id"}, {"rationality", "ghost"}}})},
    };
    auto backend = std::make_shared<ScriptedLlm>();
    backend->add_response("filter_news", "*", reply.dump());
    LlmGateway gw(backend, RetryPolicy{0, 0});
    std::vector<std::string> warnings;
    const SelectedNews sel = select_news(logic_from_text("1. x", 1, LogicProvenance::initial), w,
                                         db, gw, 7, {}, &warnings);
    CHECK(sel.long_term.size() == 1);
    CHECK(sel.dropped_unknown == 1);
    CHECK(warnings.size() == 1);
}

TEST_CASE("select_news: empty candidate pool short-circuits without a gateway call") {
    std::vector<NewsItem> far;
    NewsItem n;
    n.date = *parse_iso_date("1999-01-01");
    n.region = "x";
    n.text = "ancient";
    n.id = news_id(n.date, n.region, n.text);
    far.push_back(n);
    const NewsDb db(std::move(far));
    auto backend = std::make_shared<ScriptedLlm>();  // no entries: any call would throw
    LlmGateway gw(backend, RetryPolicy{0, 0});
    const SelectedNews sel = select_news(logic_from_text("1. x", 1, LogicProvenance::initial),
                                         fixture_window(), db, gw, 7);
    CHECK(sel.empty());
}

TEST_CASE("deterministic selector matches the sim strategy's filter handler") {
    const NewsDb db = fixture_news();
    const Window w = fixture_window();
    const LogicDocument logic = logic_from_text(
        "1. " + sim_signal_clause("heatwave") + "\n2. " + sim_signal_clause("blackout"), 1,
        LogicProvenance::initial);

    const SelectedNews direct = select_news_deterministic(logic, w, db, 7);

    auto backend = std::make_shared<ScriptedLlm>();
    install_sim_strategy(*backend, SimStrategyConfig{{"heatwave", "blackout"}});
    LlmGateway gw(backend, RetryPolicy{0, 0});
    const SelectedNews via_gateway = select_news(logic, w, db, gw, 7);

    CHECK(direct.all_ids() == via_gateway.all_ids());
    REQUIRE(direct.all_ids().size() == 2);

    // bucketing by distance to the prediction date
    // heatwave on 02-01 is 7 days before 02-08 -> long_term
    // blackout on 02-05 is 3 days before -> short_term
    CHECK(direct.long_term.size() == 1);
    CHECK(direct.short_term.size() == 1);
    CHECK(direct.real_time.empty());
}

TEST_CASE("selection_tokens: keyword tokens only, stopwords removed") {
    const auto tokens = selection_tokens(sim_signal_clause("heatwave"));
    REQUIRE(tokens.size() == 1);
    CHECK(tokens[0] == "heatwave");
    CHECK(selection_tokens("in at of by").empty());
}

TEST_CASE("aggregate: fixtures") {
    std::map<int, Forecast> forecasts{
        {1, Forecast{0, 1, {100.0}}},
        {2, Forecast{0, 2, {200.0}}},
    };
    const std::map<int, double> scores{{1, 3.0}, {2, 1.0}};
    const Forecast out = aggregate(forecasts, scores);
    REQUIRE(out.values.size() == 1);
    CHECK(out.values[0] == doctest::Approx(125.0).epsilon(1e-12));
    CHECK(out.agent_id == kEnsembleId);

    std::map<int, Forecast> same{
        {1, Forecast{0, 1, {7.0, 8.0}}},
        {2, Forecast{0, 2, {7.0, 8.0}}},
    };
    const Forecast fixed = aggregate(same, scores);
    CHECK(fixed.values[0] == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(fixed.values[1] == doctest::Approx(8.0).epsilon(1e-12));

    std::map<int, double> scaled{{1, 30.0}, {2, 10.0}};
    const Forecast rescaled = aggregate(forecasts, scaled);
    CHECK(rescaled.values[0] == doctest::Approx(out.values[0]).epsilon(1e-12));
}

TEST_CASE("aggregate: typed error paths") {
    std::map<int, Forecast> forecasts{{1, Forecast{0, 1, {1.0}}}, {2, Forecast{0, 2, {1.0, 2.0}}}};
    const std::map<int, double> scores{{1, 1.0}, {2, 1.0}};
    CHECK_THROWS_AS(aggregate(forecasts, scores), LengthMismatch);
    std::map<int, Forecast> one{{1, Forecast{0, 1, {1.0}}}};
    CHECK_THROWS_AS(aggregate(one, scores), KeyMismatch);
    std::map<int, Forecast> ok{{1, Forecast{0, 1, {1.0}}}, {2, Forecast{0, 2, {2.0}}}};
    CHECK_THROWS_AS(aggregate(ok, std::map<int, double>{{1, 1.0}, {2, 0.0}}), NonPositiveScore);
}

TEST_CASE("aggregate: ensemble stays within the member envelope") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 6);
        const int len = 1 + static_cast<int>(rng() % 10);
        std::map<int, Forecast> forecasts;
        std::map<int, double> scores;
        for (int i = 0; i < n; ++i) {
            Forecast f{0, i, {}};
            for (int k = 0; k < len; ++k) f.values.push_back(static_cast<double>(rng() % 1000));
            forecasts[i] = std::move(f);
            scores[i] = 0.5 + static_cast<double>(rng() % 100);
        }
        const Forecast ens = aggregate(forecasts, scores);
        for (int k = 0; k < len; ++k) {
            double lo = 1e300, hi = -1e300;
            for (const auto& [id, f] : forecasts) {
                lo = std::min(lo, f.values[static_cast<std::size_t>(k)]);
                hi = std::max(hi, f.values[static_cast<std::size_t>(k)]);
            }
            CHECK(ens.values[static_cast<std::size_t>(k)] >= lo - 1e-9);
            CHECK(ens.values[static_cast<std::size_t>(k)] <= hi + 1e-9);
        }
    }
}

TEST_CASE("format_predictor_input: instruction-style serialization") {
    const NewsDb db = fixture_news();
    Window w = fixture_window();
    w.meta.start_covariates = {{"holiday", "none"}, {"minimum temperature", "284.96"}};
    w.meta.prediction_covariates = {{"holiday", "Good Friday"}};
    const SelectedNews sel = selection_of(db, {"heatwave"});
    const std::string text = format_predictor_input(w, sel, db);
    CHECK(text.find("The historical load data is:") != std::string::npos);
    CHECK(text.find("The region for prediction is series.") != std::string::npos);
    CHECK(text.find("it is a public holiday: Good Friday") != std::string::npos);
    CHECK(text.find("it is not a public holiday") != std::string::npos);
    CHECK(text.find("the minimum temperature is 284.96") != std::string::npos);
    CHECK(text.find("the news was: 'A severe heatwave warning") != std::string::npos);
    CHECK(text.find("1440 minutes per point") != std::string::npos);  // daily granularity
    // numbers are serialized to three significant digits
    CHECK(text.find("\"The historical load data is: 100,101,102,103,104,105,106\"") !=
          std::string::npos);
}

TEST_CASE("export_forecasts_csv: schema and determinism") {
    TempDir dir("csv");
    std::vector<Forecast> forecasts{
        Forecast{3, 1, {1.5, 2.5}},
        Forecast{3, kEnsembleId, {2.0, 3.0}},
    };
    export_forecasts_csv(dir.file("f.csv"), forecasts);
    const std::string a = testing::slurp(dir.file("f.csv"));
    CHECK(a == "window_id,agent_id,step,value\n3,1,0,1.5\n3,1,1,2.5\n3,-1,0,2.0\n3,-1,1,3.0\n");
    export_forecasts_csv(dir.file("g.csv"), forecasts);
    CHECK(a == testing::slurp(dir.file("g.csv")));
}
