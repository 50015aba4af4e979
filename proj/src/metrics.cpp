#include "arena/metrics.hpp"

#include <cmath>
#include <string>

#include "arena/errors.hpp"
#include "arena/kernels.hpp"

namespace arena {

ForecastErrors compute_errors(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.empty() || actual.size() != predicted.size()) {
        throw LengthMismatch("compute_errors: actual has " + std::to_string(actual.size()) +
                             " values, predicted has " + std::to_string(predicted.size()));
    }
    for (double a : actual) {
        if (a == 0.0) throw ZeroActualForMape("compute_errors: actual value is zero");
    }
    const double n = static_cast<double>(actual.size());
    ForecastErrors e;
    e.mae = kernels::sum_abs_diff(actual, predicted) / n;
    e.mse = kernels::sum_sq_diff(actual, predicted) / n;
    e.rmse = std::sqrt(e.mse);
    e.mape = kernels::sum_abs_rel_diff(actual, predicted) / n;
    if (!std::isfinite(e.mae) || !std::isfinite(e.mse) || !std::isfinite(e.mape)) {
        throw NonFiniteValue("compute_errors: non-finite input");
    }
    return e;
}

std::vector<double> mmn(std::span<const double> values) {
    std::vector<double> out(values.size());
    if (values.empty()) return out;
    const auto [lo, hi] = kernels::min_max(values);
    if (lo == hi) {
        for (double& v : out) v = 0.5;
        return out;
    }
    const double span = hi - lo;
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) / span;
    return out;
}

double hhi(std::span<const double> cumulative_scores) {
    if (cumulative_scores.empty()) throw NonPositiveScore("hhi: empty score set");
    for (double m : cumulative_scores) {
        if (!(m > 0.0)) throw NonPositiveScore("hhi: score " + std::to_string(m) + " is not positive");
    }
    const double total = kernels::sum(cumulative_scores);
    return kernels::sum_sq(cumulative_scores) / (total * total);
}

}  // namespace arena
