#pragma once

#include <span>
#include <vector>

namespace arena {

// mape is a fraction (0.0671), not a percent; rendering multiplies by 100
// only at report and prompt boundaries.
struct ForecastErrors {
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
    double mape = 0.0;
};

ForecastErrors compute_errors(std::span<const double> actual, std::span<const double> predicted);

// Min-max normalization into [0,1]; a degenerate range (max == min) maps every
// element to 0.5 so downstream multipliers stay neutral.
std::vector<double> mmn(std::span<const double> values);

// Herfindahl-Hirschman concentration of the score shares; in [1/n, 1].
double hhi(std::span<const double> cumulative_scores);

}  // namespace arena
