#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "arena/agents.hpp"
#include "arena/evaluation.hpp"
#include "arena/llm_gateway.hpp"

namespace arena {

// One agent's forum post for a round. Only `body` travels to recipients;
// declared_real / declared_false stay ledger-private so competitors never see
// the authenticity labels.
struct DisclosureMessage {
    int sender = 0;
    int epoch = 0;
    int round = 0;
    bool broadcast = false;
    std::vector<int> targets;  // declared recipients (empty when broadcast)
    std::string body;
    std::string declared_real;
    std::string declared_false;
    bool authentic = true;  // no fabricated section declared
};

struct InboxItem {
    int sender = 0;
    std::string body;
};

using Inboxes = std::map<int, std::vector<InboxItem>>;

// Sections parsed out of an ia_publish reply.
struct ParsedDisclosure {
    std::string thought;
    std::string declared_real;
    std::string declared_false;
    std::string final_body;
    bool broadcast = true;
    std::vector<int> targets;
};

// Throws MalformedDisclosure when the "Final Disclosed Logic" section cannot
// be located.
ParsedDisclosure parse_disclosure(std::string_view reply);

// Renders the publication prompt with the agent's profile-conditioned stance
// and current standing, asks the gateway, and parses the structured reply.
// One repair re-prompt is attempted before MalformedDisclosure propagates.
DisclosureMessage publish(const Agent& agent, const EmScore& em, int total_agents,
                          std::span<const int> living, LlmGateway& gateway, PromptVariant variant,
                          RunLedger::Coords coords = {},
                          std::vector<std::string>* warnings = nullptr);

// Expands broadcasts and delivers each message exactly once to every living
// non-sender target; inboxes are ordered by ascending sender id. Dead targets
// are dropped with a warning, not fatal.
Inboxes route(std::span<const DisclosureMessage> messages, std::span<const int> living,
              std::vector<std::string>* warnings = nullptr);

std::string_view competitive_stance(Profile profile, PromptVariant variant);

}  // namespace arena
