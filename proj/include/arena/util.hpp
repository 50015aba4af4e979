#pragma once

#include <chrono>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace arena {

using TimePoint = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

// --- string helpers ---------------------------------------------------------

std::string trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);
bool contains_ci(std::string_view haystack, std::string_view needle);

// Deterministic formatting used at prompt/report boundaries.
std::string format_double(double v);             // shortest round-trip form
std::string format_percent(double fraction);     // 0.0671 -> "6.71%"
std::string format_sig3(double v);               // three significant digits
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// --- time -------------------------------------------------------------------

// Accepts "YYYY-MM-DD", "YYYY-MM-DD HH:MM[:SS]" and the 'T' separated form,
// optionally suffixed with 'Z'. Naive UTC throughout.
std::optional<TimePoint> parse_iso8601(std::string_view s);
std::optional<Date> parse_iso_date(std::string_view s);
std::string format_iso8601(TimePoint tp);
std::string format_iso_date(Date d);
std::string weekday_name(Date d);
bool is_weekend(Date d);

// --- hashing / seeding ------------------------------------------------------

std::uint64_t fnv1a64(std::string_view s);
std::uint64_t mix64(std::uint64_t x);  // splitmix64 finalizer

// Functional seed derivation: one master seed plus coordinates yields an
// independent stream, so any stage can be replayed without tracking RNG state.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> coords);

// Uniform draw in [0, n) via our own reduction; std::uniform_int_distribution
// is implementation-defined and would break cross-toolchain replay.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n);
double unit_real(std::mt19937_64& rng);  // [0, 1)

template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(bounded(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

// --- json -------------------------------------------------------------------

// Parses `text` as JSON; on failure, scans for the first balanced {...} or
// [...] block (models often wrap JSON in prose or code fences).
std::optional<nlohmann::json> extract_json(std::string_view text);

std::size_t approx_token_count(std::string_view text);
std::string truncate_tokens(std::string_view text, std::size_t max_tokens);

}  // namespace arena
