#include "arena/embedding.hpp"

#include <cmath>
#include <cstdlib>
#include <random>

#include <httplib.h>
#include <json.hpp>

#include "arena/errors.hpp"
#include "arena/kernels.hpp"
#include "arena/util.hpp"

namespace arena {

// --- ScriptedEmbedder -----------------------------------------------------------

ScriptedEmbedder::ScriptedEmbedder(std::size_t dim, std::size_t token_limit)
    : dim_(dim), token_limit_(token_limit) {}

void ScriptedEmbedder::pin(std::string_view text, std::vector<double> vector) {
    pins_[std::string(text)] = std::move(vector);
}

std::string ScriptedEmbedder::id() const { return "scripted-" + std::to_string(dim_); }

EmbeddingVector ScriptedEmbedder::embed_raw(std::string_view text) {
    EmbeddingVector v;
    v.model_id = id();
    if (auto it = pins_.find(text); it != pins_.end()) {
        v.values = it->second;
        return v;
    }
    std::mt19937_64 rng(mix64(fnv1a64(text)));
    v.values.resize(dim_);
    for (double& x : v.values) x = unit_real(rng) * 2.0 - 1.0;
    const double norm = std::sqrt(kernels::sum_sq(v.values));
    if (norm > 0) {
        for (double& x : v.values) x /= norm;
    }
    return v;
}

// --- HttpEmbedder ----------------------------------------------------------------

HttpEmbedder::HttpEmbedder(HttpEmbedderConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) {
        throw ConfigInvalid("http embedder needs a base url (ARENA_EMBED_BASE_URL)");
    }
}

HttpEmbedderConfig HttpEmbedder::config_from_env() {
    HttpEmbedderConfig c;
    if (const char* v = std::getenv("ARENA_EMBED_BASE_URL")) c.base_url = v;
    if (const char* v = std::getenv("ARENA_EMBED_API_KEY")) c.api_key = v;
    else if (const char* k = std::getenv("ARENA_LLM_API_KEY")) c.api_key = k;
    if (const char* v = std::getenv("ARENA_EMBED_MODEL")) c.model = v;
    return c;
}

EmbeddingVector HttpEmbedder::embed_raw(std::string_view text) {
    std::string::size_type scheme = config_.base_url.find("://");
    std::string::size_type path_start = scheme == std::string::npos
                                            ? config_.base_url.find('/')
                                            : config_.base_url.find('/', scheme + 3);
    std::string origin = path_start == std::string::npos ? config_.base_url
                                                         : config_.base_url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : config_.base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

    httplib::Client client(origin);
    client.set_connection_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
    client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    nlohmann::json body{{"model", config_.model}, {"input", nlohmann::json::array({std::string(text)})}};
    httplib::Result res = client.Post(prefix + "/embeddings", headers, body.dump(), "application/json");
    if (!res) throw BackendUnavailable("embedding endpoint unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200) {
        throw BackendUnavailable("embedding endpoint returned " + std::to_string(res->status));
    }
    nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("data") || j["data"].empty() ||
        !j["data"][0].contains("embedding")) {
        throw BackendUnavailable("embedding endpoint returned an unexpected payload");
    }
    EmbeddingVector v;
    v.model_id = id();
    for (const auto& x : j["data"][0]["embedding"]) v.values.push_back(x.get<double>());
    return v;
}

// --- free functions ---------------------------------------------------------------

EmbeddingVector embed(EmbedBackend& backend, std::string_view text, RunLedger* ledger,
                      RunLedger::Coords coords) {
    if (trim(text).empty()) throw Error("embed: empty text");
    std::string truncated;
    const std::size_t tokens = approx_token_count(text);
    if (tokens > backend.token_limit()) {
        truncated = truncate_tokens(text, backend.token_limit());
        if (ledger) {
            ledger->warn("embedding input truncated from " + std::to_string(tokens) + " to " +
                             std::to_string(backend.token_limit()) + " tokens",
                         coords);
        }
        text = truncated;
    }
    return backend.embed_raw(text);
}

double cosine_sim(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.model_id != b.model_id) {
        throw DimensionMismatch("cosine_sim: vectors from different models ('" + a.model_id +
                                "' vs '" + b.model_id + "')");
    }
    if (a.values.size() != b.values.size()) {
        throw DimensionMismatch("cosine_sim: dimensions " + std::to_string(a.values.size()) +
                                " vs " + std::to_string(b.values.size()));
    }
    const double na = kernels::sum_sq(a.values);
    const double nb = kernels::sum_sq(b.values);
    if (na == 0.0 || nb == 0.0) throw ZeroNorm("cosine_sim: zero-norm vector");
    return kernels::dot(a.values, b.values) / (std::sqrt(na) * std::sqrt(nb));
}

double lud(std::string_view prev_logic, std::string_view next_logic, EmbedBackend& backend) {
    const EmbeddingVector a = embed(backend, prev_logic);
    const EmbeddingVector b = embed(backend, next_logic);
    return 1.0 - cosine_sim(a, b);
}

double mean_pairwise_similarity(std::span<const EmbeddingVector> vectors) {
    if (vectors.size() < 2) throw Error("mean_pairwise_similarity: need at least two vectors");
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = i + 1; j < vectors.size(); ++j) {
            total += cosine_sim(vectors[i], vectors[j]);
            ++pairs;
        }
    }
    return total / static_cast<double>(pairs);
}

}  // namespace arena
