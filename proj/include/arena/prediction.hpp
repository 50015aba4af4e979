#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "arena/agents.hpp"
#include "arena/data_ingest.hpp"
#include "arena/llm_gateway.hpp"

namespace arena {

struct SelectedItem {
    std::string news_id;
    std::string rationality;
};

// Three-horizon news selection for one window.
struct SelectedNews {
    int window_id = 0;
    std::vector<SelectedItem> long_term;
    std::vector<SelectedItem> short_term;
    std::vector<SelectedItem> real_time;
    int dropped_unknown = 0;

    std::vector<std::string> all_ids() const;
    bool empty() const { return long_term.empty() && short_term.empty() && real_time.empty(); }
};

inline constexpr int kEnsembleId = -1;

struct Forecast {
    int window_id = 0;
    int agent_id = 0;  // kEnsembleId for the aggregate
    std::vector<double> values;
};

class Predictor {
  public:
    virtual ~Predictor() = default;
    virtual Forecast predict(const Window& window, const SelectedNews& selected,
                             const NewsDb& news) = 0;
    virtual std::string id() const = 0;
};

// Repeats the last history value across the horizon.
class PersistencePredictor : public Predictor {
  public:
    Forecast predict(const Window& window, const SelectedNews& selected,
                     const NewsDb& news) override;
    std::string id() const override { return "persistence"; }
};

// Test instrument with a known error law: the forecast is constructed so its
// MAPE equals max(0, base - gain * |selected ∩ relevant| + penalty * |selected
// ∩ penalized|). More relevant news selected means a strictly better forecast;
// penalized ("trap") news makes it strictly worse.
struct ScriptedPredictorConfig {
    double base = 0.2;
    double gain = 0.02;
    std::set<std::string> relevant_ids;
    double penalty = 0.0;
    std::set<std::string> penalized_ids;
};

class ScriptedPredictor : public Predictor {
  public:
    explicit ScriptedPredictor(ScriptedPredictorConfig config);

    Forecast predict(const Window& window, const SelectedNews& selected,
                     const NewsDb& news) override;
    std::string id() const override { return "scripted"; }

    double error_for(const SelectedNews& selected) const;

  private:
    ScriptedPredictorConfig config_;
};

struct RemotePredictorConfig {
    std::string base_url;
    int timeout_ms = 30000;
};

// POST {history, meta, news[]} -> {values[]}
class RemotePredictor : public Predictor {
  public:
    explicit RemotePredictor(RemotePredictorConfig config);

    Forecast predict(const Window& window, const SelectedNews& selected,
                     const NewsDb& news) override;
    std::string id() const override { return "remote"; }

  private:
    RemotePredictorConfig config_;
};

// News whose date falls in [window start - lookback, prediction date].
std::vector<const NewsItem*> candidate_news(const Window& window, const NewsDb& news,
                                            int lookback_days);

// Renders the filtering prompt with the agent's logic and the candidate pool,
// then parses the three-bucket JSON reply. Unknown ids are dropped with a
// warning; an empty candidate pool short-circuits to an empty selection.
SelectedNews select_news(const LogicDocument& logic, const Window& window, const NewsDb& news,
                         LlmGateway& gateway, int lookback_days, RunLedger::Coords coords = {},
                         std::vector<std::string>* warnings = nullptr);

// Gateway-free selection used by the ablation scorer and the offline
// simulation: a candidate is selected when it shares a keyword token with any
// logic clause, then bucketed by distance to the prediction date.
SelectedNews select_news_deterministic(const LogicDocument& logic, const Window& window,
                                       const NewsDb& news, int lookback_days);

// Keyword tokens of a text: lowercase alphanumeric runs of length >= 4 minus
// a small stopword list. Shared by the deterministic selector and scripted
// strategies so both sides agree on what "matches" means.
std::vector<std::string> selection_tokens(std::string_view text);

// Cumulative-score weighted ensemble; weights are M_i / sum(M).
Forecast aggregate(const std::map<int, Forecast>& forecasts, const std::map<int, double>& scores);

// Instruction-style serialization of one predictor call, the format a
// fine-tuned downstream forecaster consumes.
std::string format_predictor_input(const Window& window, const SelectedNews& selected,
                                   const NewsDb& news);

// CSV export: window_id,agent_id,step,value
void export_forecasts_csv(const std::filesystem::path& path, std::span<const Forecast> forecasts);

}  // namespace arena
