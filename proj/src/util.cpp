#include "arena/util.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace arena {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_ws = true;
            continue;
        }
        if (in_ws && !out.empty()) out.push_back(' ');
        in_ws = false;
        out.push_back(c);
    }
    return out;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string> split_lines(std::string_view s) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == '\n') {
            std::string_view line = s.substr(start, i - start);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            lines.emplace_back(line);
            start = i + 1;
        }
    }
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
    return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

std::string format_double(double v) {
    // nlohmann emits the shortest digit string that round-trips, which keeps
    // ledger and report output reproducible bit for bit.
    return nlohmann::json(v).dump();
}

std::string format_percent(double fraction) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
    return buf;
}

std::string format_sig3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

// --- time -------------------------------------------------------------------

namespace {

// Howard Hinnant's civil-days algorithm.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yy + (m <= 2));
}

bool parse_int(std::string_view s, int& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

std::optional<TimePoint> parse_iso8601(std::string_view s) {
    std::string t = trim(s);
    if (!t.empty() && (t.back() == 'Z' || t.back() == 'z')) t.pop_back();
    if (t.size() < 10) return std::nullopt;
    int y, mo, d, h = 0, mi = 0, sec = 0;
    if (t[4] != '-' || t[7] != '-') return std::nullopt;
    if (!parse_int(std::string_view(t).substr(0, 4), y) ||
        !parse_int(std::string_view(t).substr(5, 2), mo) ||
        !parse_int(std::string_view(t).substr(8, 2), d))
        return std::nullopt;
    if (mo < 1 || mo > 12 || d < 1 || d > 31) return std::nullopt;
    if (t.size() > 10) {
        if (t[10] != 'T' && t[10] != ' ') return std::nullopt;
        std::string_view rest = std::string_view(t).substr(11);
        if (rest.size() < 5 || rest[2] != ':') return std::nullopt;
        if (!parse_int(rest.substr(0, 2), h) || !parse_int(rest.substr(3, 2), mi))
            return std::nullopt;
        if (rest.size() >= 8) {
            if (rest[5] != ':' || !parse_int(rest.substr(6, 2), sec)) return std::nullopt;
        } else if (rest.size() != 5) {
            return std::nullopt;
        }
        if (h > 23 || mi > 59 || sec > 60) return std::nullopt;
    }
    const std::int64_t days = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
    return TimePoint(std::chrono::seconds(days * 86400 + h * 3600 + mi * 60 + sec));
}

std::optional<Date> parse_iso_date(std::string_view s) {
    auto tp = parse_iso8601(s);
    if (!tp) return std::nullopt;
    return std::chrono::floor<std::chrono::days>(*tp);
}

std::string format_iso8601(TimePoint tp) {
    const std::int64_t total = tp.time_since_epoch().count();
    std::int64_t days = total / 86400;
    std::int64_t rem = total % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    int y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d", y, m, d,
                  static_cast<int>(rem / 3600), static_cast<int>((rem % 3600) / 60),
                  static_cast<int>(rem % 60));
    return buf;
}

std::string format_iso_date(Date d) {
    int y;
    unsigned m, dd;
    civil_from_days(d.time_since_epoch().count(), y, m, dd);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, dd);
    return buf;
}

std::string weekday_name(Date d) {
    static const char* names[] = {"Thursday", "Friday",   "Saturday", "Sunday",
                                  "Monday",   "Tuesday",  "Wednesday"};
    std::int64_t z = d.time_since_epoch().count() % 7;
    if (z < 0) z += 7;
    return names[z];
}

bool is_weekend(Date d) {
    const std::string n = weekday_name(d);
    return n == "Saturday" || n == "Sunday";
}

// --- hashing / seeding ------------------------------------------------------

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> coords) {
    std::uint64_t h = mix64(base);
    for (std::uint64_t c : coords) h = mix64(h ^ mix64(c));
    return h;
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) return 0;
    // Rejection sampling keeps the draw unbiased and fully specified.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                (std::numeric_limits<std::uint64_t>::max() % n);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

double unit_real(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// --- json -------------------------------------------------------------------

std::optional<nlohmann::json> extract_json(std::string_view text) {
    auto try_parse = [](std::string_view s) -> std::optional<nlohmann::json> {
        nlohmann::json j = nlohmann::json::parse(s, nullptr, false);
        if (j.is_discarded()) return std::nullopt;
        return j;
    };
    if (auto j = try_parse(text)) return j;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{' && text[i] != '[') continue;
        const char open = text[i];
        const char close = open == '{' ? '}' : ']';
        int depth = 0;
        bool in_string = false;
        for (std::size_t k = i; k < text.size(); ++k) {
            const char c = text[k];
            if (in_string) {
                if (c == '\\')
                    ++k;
                else if (c == '"')
                    in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == open) ++depth;
            else if (c == close) {
                if (--depth == 0) {
                    if (auto j = try_parse(text.substr(i, k - i + 1))) return j;
                    break;
                }
            }
        }
    }
    return std::nullopt;
}

std::size_t approx_token_count(std::string_view text) {
    std::size_t n = 0;
    bool in_tok = false;
    for (char c : text) {
        const bool ws = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!ws && !in_tok) ++n;
        in_tok = !ws;
    }
    return n;
}

std::string truncate_tokens(std::string_view text, std::size_t max_tokens) {
    std::size_t n = 0;
    bool in_tok = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const bool ws = std::isspace(static_cast<unsigned char>(text[i])) != 0;
        if (!ws && !in_tok) {
            if (n == max_tokens) return std::string(text.substr(0, i));
            ++n;
        }
        in_tok = !ws;
    }
    return std::string(text);
}

}  // namespace arena
