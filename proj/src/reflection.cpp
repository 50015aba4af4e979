#include "arena/reflection.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

#include "arena/errors.hpp"
#include "arena/metrics.hpp"
#include "arena/util.hpp"

namespace arena {

namespace {

std::string render_inbox(std::span<const InboxItem> inbox) {
    if (inbox.empty()) return "(no competitor disclosed anything this round)";
    std::string out;
    for (const InboxItem& item : inbox) {
        out += "Competitor (agent " + std::to_string(item.sender) + ") disclosed:\n";
        out += item.body;
        out += "\n\n";
    }
    while (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

std::string extract_final_adjusted_logic(std::string_view reply) {
    const std::string lower = to_lower(reply);
    const std::size_t pos = lower.find("final adjusted logic");
    if (pos == std::string::npos) {
        throw MalformedReflection("reply is missing the 'Final Adjusted Logic' section");
    }
    std::size_t start = pos + std::string_view("final adjusted logic").size();
    while (start < reply.size() && (reply[start] == ':' || reply[start] == ')' ||
                                    std::isspace(static_cast<unsigned char>(reply[start])))) {
        ++start;
    }
    const std::string body = trim(reply.substr(start));
    if (body.empty()) throw MalformedReflection("'Final Adjusted Logic' section is empty");
    return body;
}

}  // namespace

LogicDocument stage1_update(const Agent& agent, std::span<const InboxItem> inbox,
                            const EmScore& em, int total_agents, LlmGateway& gateway,
                            PromptVariant variant, RunLedger::Coords coords) {
    if (!agent.alive) throw Error("stage1_update: agent " + std::to_string(agent.id) + " is eliminated");

    const PromptId pid = variant_of(PromptId::reflection_improve, variant);
    Bindings b{
        {"total", std::to_string(total_agents)},
        {"rank", std::to_string(em.rank)},
        {"your_logic", logic_text(agent.logic)},
        {"all_opponent_logic", render_inbox(inbox)},
    };
    ChatRequest req;
    req.user = render(pid, b);
    req.template_name = std::string(prompt_name(pid));
    req.selector = "epoch=" + std::to_string(coords.epoch) + ";round=" + std::to_string(coords.round) +
                   ";agent=" + std::to_string(agent.id);
    req.bindings = b;

    ChatResponse resp = gateway.complete(req, coords);
    std::string body;
    try {
        body = extract_final_adjusted_logic(resp.text);
    } catch (const MalformedReflection&) {
        ChatRequest repair = req;
        repair.user +=
            "\n\nYour previous reply was malformed. It must end with a section titled 'Final "
            "Adjusted Logic:' followed by the complete revised logic.";
        resp = gateway.complete(repair, coords);
        body = extract_final_adjusted_logic(resp.text);
    }
    return logic_from_text(body, agent.logic.version + 1, LogicProvenance::reflected);
}

std::vector<Delta> diff_logic(const LogicDocument& candidate, const LogicDocument& previous) {
    std::vector<Delta> deltas;
    for (const std::string& clause : candidate.clauses) {
        if (!previous.contains(clause)) deltas.push_back(Delta{clause, DeltaClass::pending, 0, 0});
    }
    return deltas;
}

double ir_mape(const LogicDocument& logic, std::span<const Window> eval_windows,
               Predictor& predictor, const NewsDb& news, int lookback_days) {
    if (eval_windows.empty()) throw PredictorFailure("ir_mape: no evaluation windows");
    double total = 0.0;
    for (const Window& w : eval_windows) {
        const SelectedNews selected = select_news_deterministic(logic, w, news, lookback_days);
        const Forecast f = predictor.predict(w, selected, news);
        total += compute_errors(w.target, f.values).mape;
    }
    return total / static_cast<double>(eval_windows.size());
}

Delta classify_delta(Delta delta, const LogicDocument& candidate,
                     std::span<const Window> eval_windows, Predictor& predictor, const NewsDb& news,
                     int lookback_days, std::optional<double> ir_with_hint) {
    delta.ir_with = ir_with_hint ? *ir_with_hint
                                 : ir_mape(candidate, eval_windows, predictor, news, lookback_days);

    LogicDocument ablated = candidate;
    ablated.clauses.erase(std::remove(ablated.clauses.begin(), ablated.clauses.end(), delta.clause),
                          ablated.clauses.end());
    delta.ir_without = ir_mape(ablated, eval_windows, predictor, news, lookback_days);

    // Removal strictly worsens the error => the clause carried signal.
    delta.classification =
        delta.ir_without > delta.ir_with ? DeltaClass::good : DeltaClass::bad;
    return delta;
}

std::vector<Delta> classify_deltas(const LogicDocument& candidate, std::vector<Delta> deltas,
                                   std::span<const Window> eval_windows, Predictor& predictor,
                                   const NewsDb& news, int lookback_days) {
    if (deltas.empty()) return deltas;
    const double ir_with = ir_mape(candidate, eval_windows, predictor, news, lookback_days);
    for (Delta& d : deltas) {
        d = classify_delta(std::move(d), candidate, eval_windows, predictor, news, lookback_days,
                           ir_with);
    }
    return deltas;
}

ReflectionOutcome stage3_finalize(const LogicDocument& candidate, std::vector<Delta> deltas,
                                  const TrendContext& trend, LlmGateway* gateway, double eps_keep,
                                  RunLedger::Coords coords) {
    for (const Delta& d : deltas) {
        if (d.classification == DeltaClass::pending) {
            throw Error("stage3_finalize: unclassified delta '" + d.clause + "'");
        }
    }

    ReflectionOutcome out;
    out.candidate = candidate;
    out.deltas = deltas;

    for (const Delta& d : deltas) {
        if (d.classification != DeltaClass::bad) continue;

        bool remove = false;
        if (gateway) {
            nlohmann::json update{
                {"content", d.clause},
                {"eval", "bad"},
                {"evalContent",
                 format_percent(d.ir_with == 0.0 ? 0.0 : (d.ir_without - d.ir_with) / d.ir_with)},
            };
            Bindings b{
                {"updateContent", update.dump()},
                {"background", trend.background},
                {"relatedNews", trend.related_news},
                {"historyTimeSeries", trend.history_series},
                {"actualValue", trend.actual_value},
                {"updatedLogic", logic_text(candidate)},
            };
            ChatRequest req;
            req.user = render(PromptId::msr_finalize, b);
            req.expected_format = ExpectedFormat::json;
            req.template_name = std::string(prompt_name(PromptId::msr_finalize));
            req.selector = "epoch=" + std::to_string(coords.epoch) +
                           ";round=" + std::to_string(coords.round) +
                           ";agent=" + std::to_string(coords.agent) +
                           ";clause=" + std::to_string(fnv1a64(d.clause) & 0xffffff);
            req.bindings = b;
            const ChatResponse resp = gateway->complete(req, coords);
            const auto j = extract_json(resp.text);
            if (!j || !j->is_object()) {
                throw MalformedJson("retention reply is not a JSON object");
            }
            if (j->contains("conclusion")) {
                const nlohmann::json& c = (*j)["conclusion"];
                if (c.is_string()) {
                    const std::string v = to_lower(c.get<std::string>());
                    remove = v == "no" || v == "false";
                } else if (c.is_boolean()) {
                    remove = !c.get<bool>();
                }
            }
        } else {
            // Deterministic fallback: keep near-neutral clauses so reflection
            // does not shed too many updates.
            remove = std::fabs(d.ir_without - d.ir_with) >= eps_keep;
        }
        if (remove) out.removed.push_back(d);
    }

    out.final_logic = candidate;
    for (const Delta& d : out.removed) {
        out.final_logic.clauses.erase(
            std::remove(out.final_logic.clauses.begin(), out.final_logic.clauses.end(), d.clause),
            out.final_logic.clauses.end());
    }
    return out;
}

}  // namespace arena
