#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arena/agents.hpp"
#include "arena/communication.hpp"
#include "arena/data_ingest.hpp"
#include "arena/evaluation.hpp"
#include "arena/llm_gateway.hpp"
#include "arena/prediction.hpp"

namespace arena {

enum class DeltaClass { pending, good, bad };

// One clause added by a candidate logic update, with its paired ablation
// scores: ir_with is the MAPE of the full candidate, ir_without the MAPE with
// this clause removed, both over the same sampled windows.
struct Delta {
    std::string clause;
    DeltaClass classification = DeltaClass::pending;
    double ir_with = std::numeric_limits<double>::quiet_NaN();
    double ir_without = std::numeric_limits<double>::quiet_NaN();
};

struct ReflectionOutcome {
    LogicDocument candidate;
    std::vector<Delta> deltas;
    std::vector<Delta> removed;
    LogicDocument final_logic;
};

// Bindings for the stage-3 retention prompt.
struct TrendContext {
    std::string background;
    std::string related_news;
    std::string history_series;
    std::string actual_value;
};

// Stage 1: the agent rewrites its logic after reading opponents' disclosures.
// The "Final Adjusted Logic" section of the reply becomes the candidate; one
// repair re-prompt before MalformedReflection.
LogicDocument stage1_update(const Agent& agent, std::span<const InboxItem> inbox,
                            const EmScore& em, int total_agents, LlmGateway& gateway,
                            PromptVariant variant, RunLedger::Coords coords = {});

// Stage 2 diff: clauses present in candidate and absent from previous, in
// candidate order. Pure clause-set difference; removals are not deltas.
std::vector<Delta> diff_logic(const LogicDocument& candidate, const LogicDocument& previous);

// MAPE of the full selection+prediction pipeline under `logic`, averaged over
// the sampled windows. News selection is re-run per logic through the
// deterministic selector, the logic's only causal path to the error.
double ir_mape(const LogicDocument& logic, std::span<const Window> eval_windows,
               Predictor& predictor, const NewsDb& news, int lookback_days);

// Stage 2 classification: good iff removing the clause strictly worsens the
// MAPE; ties are bad. `ir_with_hint` skips recomputing the shared baseline.
Delta classify_delta(Delta delta, const LogicDocument& candidate,
                     std::span<const Window> eval_windows, Predictor& predictor, const NewsDb& news,
                     int lookback_days,
                     std::optional<double> ir_with_hint = std::nullopt);

std::vector<Delta> classify_deltas(const LogicDocument& candidate, std::vector<Delta> deltas,
                                   std::span<const Window> eval_windows, Predictor& predictor,
                                   const NewsDb& news, int lookback_days);

// Stage 3: good deltas are always kept. Bad deltas are re-judged via the
// retention prompt when a gateway is supplied, otherwise by the deterministic
// fallback keep-if |ir_without - ir_with| < eps_keep.
ReflectionOutcome stage3_finalize(const LogicDocument& candidate, std::vector<Delta> deltas,
                                  const TrendContext& trend, LlmGateway* gateway, double eps_keep,
                                  RunLedger::Coords coords = {});

}  // namespace arena
