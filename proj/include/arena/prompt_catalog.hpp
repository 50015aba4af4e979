#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace arena {

// The template catalog used by every text-model call. Entries 2/4/7/9/11/13
// have paraphrased twins used for prompt-robustness runs.
enum class PromptId {
    initial_logic,
    ia_publish,
    ia_publish_alt,
    reflection_improve,
    reflection_improve_alt,
    filter_news,
    invest_round1,
    invest_round1_alt,
    invest_round2,
    invest_round2_alt,
    vote_like,
    vote_like_alt,
    self_logic_eval,
    self_logic_eval_alt,
    msr_finalize,
    mie_rank_top,
    mie_rank_ave,
    mie_rank_top_ave,
};

enum class PromptVariant { original, paraphrased };

using Bindings = std::map<std::string, std::string>;

struct PromptTemplate {
    PromptId id;
    std::string_view name;
    std::string_view body;
    std::vector<std::string_view> placeholders;
};

std::span<const PromptTemplate> catalog_all();
const PromptTemplate& catalog_get(PromptId id);
// Throws UnknownTemplate for names outside the catalog.
const PromptTemplate& catalog_require(std::string_view name);
const PromptTemplate* catalog_find(std::string_view name);

// Substitutes every {placeholder}; throws MissingBinding if one is unbound.
// Extra bindings are permitted (they travel to scripted backends as metadata).
std::string render(PromptId id, const Bindings& bindings);

// Maps a template to its paraphrased twin (identity when none exists).
PromptId variant_of(PromptId id, PromptVariant variant);

// {identifier} tokens found in a body, in order of first appearance.
std::vector<std::string> scan_placeholders(std::string_view body);

std::string_view prompt_name(PromptId id);
PromptVariant parse_prompt_variant(std::string_view s);  // throws ConfigInvalid
std::string_view prompt_variant_name(PromptVariant v);

}  // namespace arena
