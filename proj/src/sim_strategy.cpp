#include "arena/sim_strategy.hpp"

#include <algorithm>
#include <charconv>
#include <memory>

#include <json.hpp>

#include "arena/agents.hpp"
#include "arena/errors.hpp"
#include "arena/prediction.hpp"
#include "arena/util.hpp"

namespace arena {

namespace {

const std::vector<std::string>& noise_keywords() {
    static const std::vector<std::string> kws = {"celebrity", "horoscope", "lottery",
                                                 "fashion",   "gossip",    "cinema"};
    return kws;
}

int selector_field(const std::string& selector, std::string_view key) {
    const std::string needle = std::string(key) + "=";
    const std::size_t pos = selector.find(needle);
    if (pos == std::string::npos) return 0;
    int v = 0;
    const char* begin = selector.data() + pos + needle.size();
    std::from_chars(begin, selector.data() + selector.size(), v);
    return v;
}

int binding_int(const ChatRequest& req, const std::string& key, int fallback = 0) {
    auto it = req.bindings.find(key);
    if (it == req.bindings.end()) return fallback;
    int v = fallback;
    std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
    return v;
}

std::string numbered(const std::vector<std::string>& clauses) {
    std::string out;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
        out += std::to_string(i + 1) + ". " + clauses[i] + "\n";
    }
    return out;
}

struct Strategy {
    SimStrategyConfig config;

    std::string initial_logic(const ChatRequest& req) const {
        const int agent = selector_field(req.selector, "agent");
        std::vector<std::string> clauses;
        clauses.push_back("Factors behind regional load swings are listed below.");
        const std::size_t own = std::min<std::size_t>(
            agent > 0 ? static_cast<std::size_t>(agent - 1) : 0, config.signal_keywords.size());
        for (std::size_t i = 0; i < own; ++i) {
            clauses.push_back(sim_signal_clause(config.signal_keywords[i]));
        }
        clauses.push_back(sim_noise_clause(static_cast<std::size_t>(std::max(agent - 1, 0)) %
                                           sim_noise_clause_count()));
        return numbered(clauses);
    }

    std::string filter_news(const ChatRequest& req) const {
        const auto logic_it = req.bindings.find("logic");
        const auto news_it = req.bindings.find("candidate_news");
        if (logic_it == req.bindings.end() || news_it == req.bindings.end()) {
            throw BackendUnavailable("sim filter_news handler needs logic and candidate_news");
        }
        auto pred_date = parse_iso_date(req.bindings.count("prediction_date")
                                            ? req.bindings.at("prediction_date")
                                            : "");
        nlohmann::json pool = nlohmann::json::parse(news_it->second, nullptr, false);
        if (pool.is_discarded() || !pool.is_array()) {
            throw BackendUnavailable("sim filter_news handler got malformed candidate_news");
        }

        std::vector<std::string> logic_tokens;
        for (const std::string& clause : normalize_clauses(logic_it->second)) {
            for (std::string& t : selection_tokens(clause)) {
                if (std::find(logic_tokens.begin(), logic_tokens.end(), t) == logic_tokens.end()) {
                    logic_tokens.push_back(std::move(t));
                }
            }
        }

        nlohmann::json long_term = nlohmann::json::array();
        nlohmann::json short_term = nlohmann::json::array();
        nlohmann::json real_time = nlohmann::json::array();
        for (const auto& n : pool) {
            const std::string text = n.value("text", std::string());
            const std::vector<std::string> news_tokens = selection_tokens(text);
            std::string matched;
            for (const std::string& t : logic_tokens) {
                if (std::find(news_tokens.begin(), news_tokens.end(), t) != news_tokens.end()) {
                    matched = t;
                    break;
                }
            }
            if (matched.empty()) continue;
            nlohmann::json item{
                {"id", n.value("id", std::string())},
                {"news", text},
                {"region", n.value("region", std::string())},
                {"time", n.value("date", std::string())},
                {"rationality", "matched selection keyword '" + matched + "'"},
            };
            long days_before = 99;
            if (auto d = parse_iso_date(n.value("date", std::string())); d && pred_date) {
                days_before = (*pred_date - *d).count();
            }
            if (days_before <= 0) {
                real_time.push_back(std::move(item));
            } else if (days_before <= 3) {
                short_term.push_back(std::move(item));
            } else {
                long_term.push_back(std::move(item));
            }
        }
        nlohmann::json reply{
            {"Long-Term Effect on Future Load Consumption", std::move(long_term)},
            {"Short-Term Effect on Today's Load Consumption", std::move(short_term)},
            {"Real-Time Direct Effect on Today's Load Consumption", std::move(real_time)},
        };
        return reply.dump(2);
    }

    std::string ia_publish(const ChatRequest& req) const {
        const int agent = selector_field(req.selector, "agent");
        const int round = selector_field(req.selector, "round");
        const bool high = req.bindings.count("profile") &&
                          req.bindings.at("profile") == "high_competitive";
        const std::string own_logic = req.bindings.count("initial_logic")
                                          ? req.bindings.at("initial_logic")
                                          : std::string();

        std::string reply = "1. Thought Process\n";
        if (high) {
            const std::string fabricated = sim_noise_clause(
                static_cast<std::size_t>(agent + round) % sim_noise_clause_count());
            const std::vector<std::string> clauses = normalize_clauses(own_logic);
            const std::string real_part = clauses.empty() ? own_logic : clauses.front();

            reply += "- Decide whether to disclose your logic: true\n";
            reply += "- If you disclose, indicate whether it includes misleading or false insights: "
                     "true\n";
            reply += "- Holding back the core logic and steering rivals toward a dead end.\n\n";
            reply += "2. Disclosed Logic\n";
            reply += "- Real Logic: " + real_part + "\n";
            reply += "- False Logic: " + fabricated + "\n\n";
            reply += "3. Final Disclosed Logic\n";
            reply += "1. " + real_part + "\n2. " + fabricated + "\n";

            // Selective send: the next living competitor after this agent.
            std::vector<int> living;
            if (req.bindings.count("living")) {
                const std::string& spec = req.bindings.at("living");
                std::size_t i = 0;
                while (i < spec.size()) {
                    int v = 0;
                    auto [p, ec] = std::from_chars(spec.data() + i, spec.data() + spec.size(), v);
                    if (ec == std::errc() && p != spec.data() + i) {
                        living.push_back(v);
                        i = static_cast<std::size_t>(p - spec.data()) + 1;
                    } else {
                        ++i;
                    }
                }
            }
            int target = 0;
            for (int id : living) {
                if (id > agent) {
                    target = id;
                    break;
                }
            }
            if (target == 0 && !living.empty()) target = living.front();
            if (target != 0 && target != agent) {
                reply += "TARGETS: " + std::to_string(target) + "\n";
            } else {
                reply += "TARGETS: all\n";
            }
        } else {
            reply += "- Decide whether to disclose your logic: true\n";
            reply += "- If you disclose, indicate whether it includes misleading or false insights: "
                     "false\n";
            reply += "- Transparency builds trust; sharing everything invites useful feedback.\n\n";
            reply += "2. Disclosed Logic\n";
            reply += "- Real Logic:\n" + own_logic + "\n";
            reply += "- False Logic: None\n\n";
            reply += "3. Final Disclosed Logic\n";
            reply += own_logic + "\n";
            reply += "TARGETS: all\n";
        }
        return reply;
    }

    std::string reflection_improve(const ChatRequest& req) const {
        const int rank = binding_int(req, "rank", 1);
        const int total = binding_int(req, "total", 2);
        const std::string own_logic = req.bindings.count("your_logic")
                                          ? req.bindings.at("your_logic")
                                          : std::string();
        const std::string opponents = req.bindings.count("all_opponent_logic")
                                          ? req.bindings.at("all_opponent_logic")
                                          : std::string();

        std::vector<std::string> clauses = normalize_clauses(own_logic);
        auto has = [&](const std::string& c) {
            return std::find(clauses.begin(), clauses.end(), c) != clauses.end();
        };

        // Adopt the first unseen opponent clause (which may be fabricated;
        // the ablation stage is the safety net).
        for (const std::string& c : normalize_clauses(opponents)) {
            if (c.rfind("Competitor (agent", 0) == 0) continue;
            if (!has(c)) {
                clauses.push_back(c);
                break;
            }
        }
        // Upper-half agents innovate: add the next unused signal clause.
        if (rank <= (total + 1) / 2) {
            for (const std::string& kw : config.signal_keywords) {
                const std::string c = sim_signal_clause(kw);
                if (!has(c)) {
                    clauses.push_back(c);
                    break;
                }
            }
        }

        std::string reply = "(1) Thought Process:\n";
        reply += "Key Differences and Strengths: competitors watch factors missing from my list.\n";
        reply += "Potential Flaws or Irrelevant Information: some disclosures look decorative.\n";
        reply += "Relevance and Applicability: adopt the most promising unseen factor.\n";
        reply += "Refinement Strategy: extend the list, then let the ablation pass prune it.\n\n";
        reply += "(2) Final Adjusted Logic:\n" + numbered(clauses);
        return reply;
    }

    std::string msr_finalize(const ChatRequest& req) const {
        std::string content;
        if (req.bindings.count("updateContent")) {
            if (auto j = extract_json(req.bindings.at("updateContent")); j && j->is_object()) {
                content = j->value("content", std::string());
            }
        }
        nlohmann::json reply{
            {"content", content},
            {"conclusion", "no"},
            {"reason", "the clause showed no measurable signal on the sampled windows"},
            {"logic", ""},
        };
        return reply.dump(2);
    }
};

}  // namespace

std::string sim_signal_clause(std::string_view keyword) {
    // Every non-keyword token is a stopword or under four characters.
    return "Watch for " + std::string(keyword) +
           " news in this region because they will affect load demand.";
}

std::string sim_noise_clause(std::size_t index) {
    return "Track " + noise_keywords()[index % noise_keywords().size()] +
           " news because it will affect demand.";
}

std::size_t sim_noise_clause_count() { return noise_keywords().size(); }

std::string sim_noise_keyword(std::size_t index) {
    return noise_keywords()[index % noise_keywords().size()];
}

void install_sim_strategy(ScriptedLlm& backend, SimStrategyConfig config) {
    auto strategy = std::make_shared<Strategy>(Strategy{std::move(config)});
    backend.set_default_handler([strategy](const ChatRequest& req) -> std::string {
        if (req.template_name == "initial_logic") return strategy->initial_logic(req);
        if (req.template_name == "filter_news") return strategy->filter_news(req);
        if (req.template_name == "ia_publish" || req.template_name == "ia_publish_alt") {
            return strategy->ia_publish(req);
        }
        if (req.template_name == "reflection_improve" ||
            req.template_name == "reflection_improve_alt") {
            return strategy->reflection_improve(req);
        }
        if (req.template_name == "msr_finalize") return strategy->msr_finalize(req);
        throw BackendUnavailable("sim strategy has no handler for template '" + req.template_name +
                                 "'");
    });
}

}  // namespace arena
