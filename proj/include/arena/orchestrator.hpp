#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "arena/agents.hpp"
#include "arena/data_ingest.hpp"
#include "arena/embedding.hpp"
#include "arena/evaluation.hpp"
#include "arena/ledger.hpp"
#include "arena/llm_gateway.hpp"
#include "arena/prediction.hpp"
#include "arena/prompt_catalog.hpp"

namespace arena {

struct DataConfig {
    std::string series_path;
    std::string news_path;
    int input_length = 7;
    int prediction_length = 7;
    int stride = 0;  // 0 -> prediction_length (non-overlapping targets)
};

struct LlmConfig {
    std::string backend = "scripted";  // scripted | http
    std::string script_path;           // canned-response table for the scripted backend
    std::string strategy;              // "sim" installs the simulation handlers
    std::string model;
    double temperature = 0.5;
    int top_k = 20;
    double top_p = 0.8;
    int max_retries = 3;
    int retry_base_ms = 200;
};

struct EmbedderConfig {
    std::string backend = "scripted";  // scripted | http
    int dim = 64;
    int token_limit = 8192;
};

struct PredictorConfig {
    std::string type = "persistence";  // persistence | scripted | remote
    double base = 0.2;
    double gain = 0.02;
    std::vector<std::string> relevant_keywords;  // news matching any keyword is "relevant"
    std::string base_url;                        // remote endpoint
};

enum class MieVariant { none, rank_top, rank_ave, rank_top_ave };

struct RunConfig {
    int agents = 10;
    int rounds = 5;  // competition rounds per epoch
    int epochs = 3;
    double alpha = 0.7;  // retention ratio
    double ci = 0.5;     // fraction of high-competitive agents
    int msr_sample = 8;  // windows sampled for the ablation stage
    std::uint64_t seed = 0;
    PromptVariant prompt_variant = PromptVariant::original;
    MieVariant mie_variant = MieVariant::rank_top_ave;
    double termination_epsilon = 0.001;
    double keep_epsilon = 0.001;
    int lookback_days = 7;
    int workers = 1;
    // Per-epoch elimination count override (index epoch-1; -1 keeps the
    // floor((1-alpha)*n) rule for that epoch).
    std::vector<int> elimination_overrides;
    DataConfig data;
    LlmConfig llm;
    EmbedderConfig embedder;
    PredictorConfig predictor;
    std::string out_dir = "out";
};

RunConfig config_from_json(const nlohmann::json& j);
// Semantic fields only (no output paths), as echoed into the ledger.
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::filesystem::path& path);
void validate_config(const RunConfig& cfg);  // throws ConfigInvalid

// True once the newest validation MAPE improves on its predecessor by less
// than epsilon (a regression also stops the run).
bool check_termination(std::span<const double> validation_history, double epsilon);

// Ledger reconstruction: agent states, run position and derived snapshots as
// of the last completed barrier. Records past that barrier are ignored.
struct ReplayResult {
    std::vector<Agent> agents;
    bool has_barrier = false;
    bool setup_complete = false;
    bool run_complete = false;
    bool terminated = false;
    int last_epoch = 0;  // last epoch with a completed round
    int last_round = 0;  // last completed round within last_epoch
    int completed_epochs = 0;
    std::vector<double> validation_history;
    std::map<int, std::string> epoch_end_logic_text;
    std::uint64_t resume_offset = 0;
    std::uint64_t next_seq = 0;
};

ReplayResult replay_ledger(const std::filesystem::path& path);

struct RunResult {
    std::filesystem::path ledger_path;
    std::filesystem::path forecasts_path;
    int epochs_run = 0;
    bool terminated_early = false;
    std::vector<int> final_population;
    double test_ensemble_mape = -1.0;
};

class Orchestrator {
  public:
    explicit Orchestrator(RunConfig cfg);

    // Dependency injection for tests and embedders-of-choice; call before run().
    void set_llm_backend(std::shared_ptr<LlmBackend> backend);
    void set_embedder(std::shared_ptr<EmbedBackend> embedder);
    void set_predictor(std::shared_ptr<Predictor> predictor);

    RunResult run(bool resume = false);

    const std::vector<Agent>& agents() const { return agents_; }
    const RunConfig& config() const { return cfg_; }

  private:
    void build_backends();
    void load_data(bool announce);
    void init_population();
    void generate_initial_logics();
    void run_round(int epoch, int round, const RoundBatch& batch);
    bool epoch_boundary(int epoch);  // true = stop after this epoch
    double evaluate_split(int epoch, std::span<const Window> windows, std::string_view phase,
                          std::vector<Forecast>* collected);

    std::vector<int> living_ids() const;
    Agent& agent_ref(int id);
    const Window& window_by_id(int id) const;
    double agent_round_mape(const Agent& agent, const RoundBatch& batch, int epoch, int round);

    RunConfig cfg_;
    std::shared_ptr<LlmBackend> llm_backend_;
    std::shared_ptr<EmbedBackend> embedder_;
    std::shared_ptr<Predictor> predictor_;
    std::unique_ptr<LlmGateway> gateway_;
    RunLedger ledger_;

    NewsDb news_;
    WindowSplit split_;
    std::map<int, const Window*> window_index_;

    std::vector<Agent> agents_;
    std::map<int, double> last_round_mape_;
    std::vector<double> validation_history_;
    std::map<int, std::string> epoch_end_logic_text_;
    std::vector<Forecast> test_forecasts_;
};

}  // namespace arena
