#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arena/ledger.hpp"

namespace arena {

struct EmbeddingVector {
    std::vector<double> values;
    std::string model_id;
};

class EmbedBackend {
  public:
    virtual ~EmbedBackend() = default;
    virtual EmbeddingVector embed_raw(std::string_view text) = 0;
    virtual std::string id() const = 0;
    virtual std::size_t token_limit() const { return 8192; }
};

// Hash-seeded pseudo-embeddings: the vector is a pure function of the text,
// so similarity analytics replay exactly. Individual texts can be pinned to
// exact vectors for fixture construction.
class ScriptedEmbedder : public EmbedBackend {
  public:
    explicit ScriptedEmbedder(std::size_t dim = 64, std::size_t token_limit = 8192);

    void pin(std::string_view text, std::vector<double> vector);

    EmbeddingVector embed_raw(std::string_view text) override;
    std::string id() const override;
    std::size_t token_limit() const override { return token_limit_; }

  private:
    std::size_t dim_;
    std::size_t token_limit_;
    std::map<std::string, std::vector<double>, std::less<>> pins_;
};

struct HttpEmbedderConfig {
    std::string base_url;  // ARENA_EMBED_BASE_URL
    std::string api_key;
    std::string model = "default";
    int timeout_ms = 30000;
    std::size_t token_limit = 8192;
};

class HttpEmbedder : public EmbedBackend {
  public:
    explicit HttpEmbedder(HttpEmbedderConfig config);
    static HttpEmbedderConfig config_from_env();

    EmbeddingVector embed_raw(std::string_view text) override;
    std::string id() const override { return "http:" + config_.model; }
    std::size_t token_limit() const override { return config_.token_limit; }

  private:
    HttpEmbedderConfig config_;
};

// Truncates over-limit text (with a ledger warning) before calling the
// backend. Text must be non-empty.
EmbeddingVector embed(EmbedBackend& backend, std::string_view text, RunLedger* ledger = nullptr,
                      RunLedger::Coords coords = {});

double cosine_sim(const EmbeddingVector& a, const EmbeddingVector& b);

// Logic Update Degree: 1 - cos(embed(prev), embed(next)); in [0, 2].
double lud(std::string_view prev_logic, std::string_view next_logic, EmbedBackend& backend);

// Mean cosine over all unordered pairs; requires >= 2 vectors.
double mean_pairwise_similarity(std::span<const EmbeddingVector> vectors);

}  // namespace arena
