#pragma once

#include <string>
#include <vector>

#include "arena/llm_gateway.hpp"

namespace arena {

// Deterministic competitor behavior for offline runs: canned-but-reactive
// replies for logic generation, news filtering, publication, reflection and
// retention, all pure functions of (template, selector, bindings).
//
// Signal keywords drive the causal chain: clauses mentioning them select the
// news items that the scripted predictor rewards, so richer logics forecast
// better and reflection visibly pays off.
struct SimStrategyConfig {
    std::vector<std::string> signal_keywords;
};

void install_sim_strategy(ScriptedLlm& backend, SimStrategyConfig config);

// Clause shapes used by the strategy (exposed for fixtures and tests). Every
// token except the keyword itself is filtered by the selection tokenizer, so
// a clause matches exactly the news carrying its keyword.
std::string sim_signal_clause(std::string_view keyword);
std::string sim_noise_clause(std::size_t index);
std::size_t sim_noise_clause_count();
std::string sim_noise_keyword(std::size_t index);

}  // namespace arena
