#include <doctest.h>

#include <cmath>

#include "arena/embedding.hpp"
#include "arena/errors.hpp"
#include "testing_support.hpp"

using namespace arena;
using arena::testing::TempDir;

TEST_CASE("scripted embedder: deterministic per text, unit norm") {
    ScriptedEmbedder e(64);
    const EmbeddingVector a = embed(e, "competition breeds innovation");
    const EmbeddingVector b = embed(e, "competition breeds innovation");
    const EmbeddingVector c = embed(e, "a different sentence");
    CHECK(a.values == b.values);
    CHECK(a.values.size() == 64);
    CHECK(a.values != c.values);
    double norm = 0.0;
    for (double x : a.values) norm += x * x;
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cosine_sim: fixtures") {
    const EmbeddingVector a{{1.0, 0.0}, "m"};
    const EmbeddingVector b{{1.0, 1.0}, "m"};
    const EmbeddingVector ortho{{0.0, 1.0}, "m"};
    CHECK(cosine_sim(a, a) == doctest::Approx(1.0));
    CHECK(cosine_sim(a, ortho) == doctest::Approx(0.0));
    CHECK(cosine_sim(a, b) == doctest::Approx(0.7071).epsilon(1e-4));
}

TEST_CASE("cosine_sim: dimension, model and zero-norm guards") {
    const EmbeddingVector a{{1.0, 0.0}, "m"};
    const EmbeddingVector wrong_dim{{1.0, 0.0, 0.0}, "m"};
    const EmbeddingVector wrong_model{{1.0, 0.0}, "other"};
    const EmbeddingVector zero{{0.0, 0.0}, "m"};
    CHECK_THROWS_AS(cosine_sim(a, wrong_dim), DimensionMismatch);
    CHECK_THROWS_AS(cosine_sim(a, wrong_model), DimensionMismatch);
    CHECK_THROWS_AS(cosine_sim(a, zero), ZeroNorm);
}

TEST_CASE("lud: identity, orthogonal and antipodal constructions") {
    ScriptedEmbedder e(2);
    e.pin("prev", {1.0, 0.0});
    e.pin("next", {0.0, 1.0});
    e.pin("anti", {-1.0, 0.0});
    CHECK(lud("prev", "prev", e) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(lud("prev", "next", e) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(lud("prev", "anti", e) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("lud: zero on self and symmetric for arbitrary texts") {
    ScriptedEmbedder e(32);
    const std::vector<std::string> texts = {
        "watch the demand",
        "heatwaves drive cooling load",
        "policy shifts move industry",
    };
    for (const std::string& t : texts) CHECK(std::fabs(lud(t, t, e)) < 1e-6);
    for (const std::string& t1 : texts) {
        for (const std::string& t2 : texts) {
            CHECK(lud(t1, t2, e) == doctest::Approx(lud(t2, t1, e)).epsilon(1e-12));
        }
    }
}

TEST_CASE("embed: over-limit text is truncated with a ledger warning") {
    TempDir dir("embed");
    RunLedger ledger = RunLedger::create(dir.file("l.jsonl"));
    ScriptedEmbedder e(8, 16);  // 16-token limit
    std::string text;
    for (int i = 0; i < 9000; ++i) text += "tok" + std::to_string(i) + " ";
    const EmbeddingVector v = embed(e, text, &ledger);
    CHECK(v.values.size() == 8);

    bool warned = false;
    for (const auto& rec : RunLedger::read_all(dir.file("l.jsonl"))) {
        if (rec["type"] == "warning" &&
            rec["data"]["message"].get<std::string>().find("truncated") != std::string::npos) {
            warned = true;
        }
    }
    CHECK(warned);

    std::string sixteen;
    for (int i = 0; i < 16; ++i) sixteen += "tok" + std::to_string(i) + " ";
    CHECK(embed(e, text).values == e.embed_raw(sixteen).values);
}

TEST_CASE("mean_pairwise_similarity: averages all unordered pairs") {
    const EmbeddingVector x{{1.0, 0.0}, "m"};
    const EmbeddingVector y{{0.0, 1.0}, "m"};
    const EmbeddingVector z{{1.0, 0.0}, "m"};
    // pairs: (x,y)=0, (x,z)=1, (y,z)=0 -> mean 1/3
    const std::vector<EmbeddingVector> all{x, y, z};
    CHECK(mean_pairwise_similarity(all) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(mean_pairwise_similarity(std::vector<EmbeddingVector>{x}), Error);
}
