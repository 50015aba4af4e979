#include <doctest.h>

#include <algorithm>
#include <set>

#include "arena/errors.hpp"
#include "arena/prompt_catalog.hpp"

using namespace arena;

TEST_CASE("catalog: eighteen templates, declared placeholders match the bodies") {
    CHECK(catalog_all().size() == 18);
    for (const PromptTemplate& t : catalog_all()) {
        const std::vector<std::string> scanned = scan_placeholders(t.body);
        std::set<std::string> declared(t.placeholders.begin(), t.placeholders.end());
        std::set<std::string> found(scanned.begin(), scanned.end());
        INFO("template ", t.name);
        CHECK(declared == found);
        CHECK(catalog_find(t.name) == &t);
    }
}

TEST_CASE("render: standing notice contains the rank verbatim") {
    const std::string text = render(PromptId::mie_rank_top_ave, Bindings{
                                                                    {"total", "10"},
                                                                    {"rank", "3"},
                                                                    {"top_value", "5.00%"},
                                                                    {"average_value", "9.80%"},
                                                                });
    CHECK(text.find("a total of 10 participants") != std::string::npos);
    CHECK(text.find("you achieved rank 3") != std::string::npos);
    CHECK(text.find("5.00%") != std::string::npos);
    CHECK(text.find("{") == std::string::npos);  // nothing unsubstituted
}

TEST_CASE("render: template without placeholders passes through unchanged") {
    const PromptTemplate& t = catalog_get(PromptId::initial_logic);
    CHECK(render(PromptId::initial_logic, {}) == std::string(t.body));
}

TEST_CASE("render: missing binding and unknown template raise typed errors") {
    CHECK_THROWS_AS(render(PromptId::mie_rank_top_ave,
                           Bindings{{"total", "10"},
                                    {"top_value", "1%"},
                                    {"average_value", "2%"}}),
                    MissingBinding);
    try {
        render(PromptId::mie_rank_top_ave,
               Bindings{{"total", "10"}, {"top_value", "1%"}, {"average_value", "2%"}});
    } catch (const MissingBinding& e) {
        CHECK(std::string(e.what()).find("rank") != std::string::npos);
    }
    CHECK_THROWS_AS(catalog_require("prompt_19"), UnknownTemplate);
}

TEST_CASE("render: extra bindings are permitted") {
    const std::string text =
        render(PromptId::self_logic_eval, Bindings{{"logic", "царь"}, {"unused", "x"}});
    CHECK(text.find("царь") != std::string::npos);
}

TEST_CASE("catalog: publication template keeps its section anchors") {
    const std::string text = render(PromptId::ia_publish, Bindings{
                                                              {"total", "6"},
                                                              {"rank", "2"},
                                                              {"competitive_stance", "stance"},
                                                              {"initial_logic", "1. a clause"},
                                                          });
    CHECK(text.find("Final Disclosed Logic") != std::string::npos);
    CHECK(text.find("TARGETS:") != std::string::npos);
    CHECK(text.find("6 participants reached the final stage, and you ranked 2th") !=
          std::string::npos);
}

TEST_CASE("catalog: news filter and retention templates keep their anchors") {
    const std::string filter = render(PromptId::filter_news,
                                      Bindings{{"logic", "L"}, {"candidate_news", "[]"}});
    CHECK(filter.find("Long-Term Effect on Future Load Consumption") != std::string::npos);
    CHECK(filter.find("Short-Term Effect on Today's Load Consumption") != std::string::npos);
    CHECK(filter.find("Real-Time Direct Effect on Today's Load Consumption") != std::string::npos);

    const std::string finalize = render(PromptId::msr_finalize, Bindings{
                                                                    {"updateContent", "{}"},
                                                                    {"background", "b"},
                                                                    {"relatedNews", "n"},
                                                                    {"historyTimeSeries", "h"},
                                                                    {"actualValue", "v"},
                                                                    {"updatedLogic", "l"},
                                                                });
    CHECK(finalize.find("\"conclusion\": no") != std::string::npos);
}

TEST_CASE("variant_of: paraphrase flag selects the twin templates") {
    CHECK(variant_of(PromptId::ia_publish, PromptVariant::paraphrased) == PromptId::ia_publish_alt);
    CHECK(variant_of(PromptId::reflection_improve, PromptVariant::paraphrased) ==
          PromptId::reflection_improve_alt);
    CHECK(variant_of(PromptId::vote_like, PromptVariant::paraphrased) == PromptId::vote_like_alt);
    CHECK(variant_of(PromptId::filter_news, PromptVariant::paraphrased) == PromptId::filter_news);
    CHECK(variant_of(PromptId::ia_publish, PromptVariant::original) == PromptId::ia_publish);
    CHECK(parse_prompt_variant("paraphrased") == PromptVariant::paraphrased);
    CHECK_THROWS_AS(parse_prompt_variant("fancy"), ConfigInvalid);
}
