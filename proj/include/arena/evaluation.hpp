#pragma once

#include <map>
#include <optional>
#include <vector>

namespace arena {

// One agent's standing for a round. rank 1 is the lowest MAPE; `top` is the
// relative gap to the best performer and `ave` the signed relative gap to the
// round mean (negative = better than average).
struct EmScore {
    int agent_id = 0;
    int rank = 0;
    double top = 0.0;
    double ave = 0.0;
    double mape = 0.0;
};

struct EmRound {
    std::vector<EmScore> scores;  // ordered by agent id
    double best_mape = 0.0;
    double mean_mape = 0.0;
    // Best MAPE was zero: `top` falls back to the absolute MAPE and the round
    // is flagged.
    bool degenerate_top = false;

    const EmScore& of(int agent_id) const;
};

EmRound compute_em(const std::map<int, double>& mapes);

// Cumulative-score compounding: M' = M + M * (1 - MMN(mape)) with MMN taken
// over this round's living agents. The best agent doubles; the worst keeps M.
std::map<int, double> update_cs(const std::map<int, double>& m_prev,
                                const std::map<int, double>& mapes);

struct SfCandidate {
    int id = 0;
    double cumulative_score = 0.0;
    double last_mape = 0.0;
};

struct SfOutcome {
    std::vector<int> survivors;   // ascending id
    std::vector<int> eliminated;  // elimination order (worst first)
};

// Eliminates the floor((1-alpha)*n) lowest-CS agents. CS ties eliminate the
// higher last-round MAPE first, then the higher id. `count_override` replaces
// the computed elimination count when set.
SfOutcome apply_sf(std::vector<SfCandidate> agents, double alpha,
                   std::optional<int> count_override = std::nullopt);

}  // namespace arena
