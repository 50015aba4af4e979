#include "arena/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "arena/errors.hpp"
#include "arena/metrics.hpp"

namespace arena {

const EmScore& EmRound::of(int agent_id) const {
    for (const EmScore& s : scores) {
        if (s.agent_id == agent_id) return s;
    }
    throw KeyMismatch("no EM score for agent " + std::to_string(agent_id));
}

EmRound compute_em(const std::map<int, double>& mapes) {
    if (mapes.size() < 2) {
        throw TooFewAgents("compute_em: need at least 2 agents, got " +
                           std::to_string(mapes.size()));
    }
    for (const auto& [id, m] : mapes) {
        if (!std::isfinite(m) || m < 0.0) {
            throw NonFiniteValue("compute_em: bad MAPE for agent " + std::to_string(id));
        }
    }

    EmRound round;
    double total = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [id, m] : mapes) {
        total += m;
        best = std::min(best, m);
    }
    round.best_mape = best;
    round.mean_mape = total / static_cast<double>(mapes.size());
    round.degenerate_top = best == 0.0;

    // Rank ascending by MAPE, ties broken by ascending agent id; std::map
    // iteration already delivers ascending ids, so a stable sort suffices.
    std::vector<std::pair<int, double>> order(mapes.begin(), mapes.end());
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.second < b.second; });

    std::map<int, int> rank_of;
    for (std::size_t i = 0; i < order.size(); ++i) rank_of[order[i].first] = static_cast<int>(i) + 1;

    for (const auto& [id, m] : mapes) {
        EmScore s;
        s.agent_id = id;
        s.mape = m;
        s.rank = rank_of[id];
        s.ave = round.mean_mape == 0.0 ? 0.0 : (m - round.mean_mape) / round.mean_mape;
        s.top = round.degenerate_top ? m : (m - best) / best;
        round.scores.push_back(s);
    }
    return round;
}

std::map<int, double> update_cs(const std::map<int, double>& m_prev,
                                const std::map<int, double>& mapes) {
    if (m_prev.size() != mapes.size()) {
        throw KeyMismatch("update_cs: " + std::to_string(m_prev.size()) + " scores vs " +
                          std::to_string(mapes.size()) + " MAPEs");
    }
    std::vector<double> values;
    values.reserve(mapes.size());
    for (const auto& [id, m] : mapes) {
        if (!m_prev.count(id)) throw KeyMismatch("update_cs: no score for agent " + std::to_string(id));
        values.push_back(m);
    }
    const std::vector<double> normalized = mmn(values);

    std::map<int, double> out;
    std::size_t i = 0;
    for (const auto& [id, m] : mapes) {
        const double prev = m_prev.at(id);
        if (!(prev > 0.0)) {
            throw NonPositiveScore("update_cs: agent " + std::to_string(id) +
                                   " has non-positive score");
        }
        out[id] = prev + prev * (1.0 - normalized[i]);
        ++i;
    }
    return out;
}

SfOutcome apply_sf(std::vector<SfCandidate> agents, double alpha,
                   std::optional<int> count_override) {
    if (agents.size() < 2) throw TooFewAgents("apply_sf: need at least 2 living agents");
    if (!(alpha > 0.0) || alpha > 1.0) throw ConfigInvalid("apply_sf: alpha must be in (0,1]");

    const int n = static_cast<int>(agents.size());
    int k = count_override.value_or(
        static_cast<int>(std::floor((1.0 - alpha) * static_cast<double>(n))));
    if (k < 0) k = 0;
    if (k >= n) {
        throw AllWouldBeEliminated("apply_sf: would eliminate " + std::to_string(k) + " of " +
                                   std::to_string(n));
    }

    // Worst first: lowest CS, then highest last-round MAPE, then highest id.
    std::vector<SfCandidate> order = agents;
    std::sort(order.begin(), order.end(), [](const SfCandidate& a, const SfCandidate& b) {
        if (a.cumulative_score != b.cumulative_score) return a.cumulative_score < b.cumulative_score;
        if (a.last_mape != b.last_mape) return a.last_mape > b.last_mape;
        return a.id > b.id;
    });

    SfOutcome out;
    for (int i = 0; i < k; ++i) out.eliminated.push_back(order[static_cast<std::size_t>(i)].id);
    for (std::size_t i = static_cast<std::size_t>(k); i < order.size(); ++i) {
        out.survivors.push_back(order[i].id);
    }
    std::sort(out.survivors.begin(), out.survivors.end());
    return out;
}

}  // namespace arena
