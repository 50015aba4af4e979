#include "arena/data_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "arena/errors.hpp"

namespace arena {

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    // Simple CSV: commas split fields, double quotes protect embedded commas.
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

bool parse_double(std::string_view s, double& out) {
    const std::string t = trim(s);
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    return ec == std::errc() && p == t.data() + t.size();
}

}  // namespace

std::string news_id(Date date, std::string_view region, std::string_view text) {
    std::string key = format_iso_date(date);
    key += '|';
    key += region;
    key += '|';
    key += text;
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(key)));
    return buf;
}

NewsDb::NewsDb(std::vector<NewsItem> items) : items_(std::move(items)) {
    std::sort(items_.begin(), items_.end(), [](const NewsItem& a, const NewsItem& b) {
        if (a.date != b.date) return a.date < b.date;
        return a.id < b.id;
    });
    for (std::size_t i = 0; i < items_.size(); ++i) index_.emplace(items_[i].id, i);
}

const NewsItem* NewsDb::find(std::string_view id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &items_[it->second];
}

std::vector<const NewsItem*> NewsDb::between(Date from, Date to) const {
    std::vector<const NewsItem*> out;
    for (const NewsItem& n : items_) {
        if (n.date < from) continue;
        if (n.date > to) break;
        out.push_back(&n);
    }
    return out;
}

RawSeries load_series(const std::filesystem::path& path, const SeriesSchema& schema) {
    std::ifstream in(path);
    if (!in) throw MalformedRow("line 1: cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line) || trim(line).empty()) {
        throw MalformedRow("line 1: missing header row");
    }
    const std::vector<std::string> header = split_csv_row(line);
    int ts_col = -1, value_col = -1;
    std::vector<int> covariate_cols;
    std::vector<std::string> covariate_names;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = trim(header[i]);
        if (name == schema.timestamp_column) {
            ts_col = static_cast<int>(i);
        } else if (name == schema.value_column) {
            value_col = static_cast<int>(i);
        } else {
            covariate_cols.push_back(static_cast<int>(i));
            covariate_names.push_back(name);
        }
    }
    if (ts_col < 0 || value_col < 0) {
        throw MalformedRow("line 1: header must contain columns '" + schema.timestamp_column +
                           "' and '" + schema.value_column + "'");
    }

    RawSeries series;
    series.name = schema.series_name.empty() ? path.stem().string() : schema.series_name;
    series.covariate_names = covariate_names;

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv_row(line);
        if (cells.size() != header.size()) {
            throw MalformedRow("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " columns, got " +
                               std::to_string(cells.size()));
        }
        SeriesPoint pt;
        auto ts = parse_iso8601(cells[static_cast<std::size_t>(ts_col)]);
        if (!ts) {
            throw MalformedRow("line " + std::to_string(line_no) + ": bad timestamp '" +
                               trim(cells[static_cast<std::size_t>(ts_col)]) + "'");
        }
        pt.ts = *ts;
        if (!parse_double(cells[static_cast<std::size_t>(value_col)], pt.value)) {
            throw MalformedRow("line " + std::to_string(line_no) + ": bad value '" +
                               trim(cells[static_cast<std::size_t>(value_col)]) + "'");
        }
        if (!std::isfinite(pt.value)) {
            throw NonFiniteValue("line " + std::to_string(line_no) + ": non-finite value");
        }
        for (int c : covariate_cols) pt.covariates.push_back(trim(cells[static_cast<std::size_t>(c)]));
        series.points.push_back(std::move(pt));
    }

    if (series.points.size() < 2) {
        throw MalformedRow("line " + std::to_string(line_no) +
                           ": need at least two data rows to establish the granularity");
    }
    std::stable_sort(series.points.begin(), series.points.end(),
                     [](const SeriesPoint& a, const SeriesPoint& b) { return a.ts < b.ts; });
    series.granularity =
        std::chrono::duration_cast<std::chrono::seconds>(series.points[1].ts - series.points[0].ts);
    if (series.granularity.count() <= 0) {
        throw NonUniformSpacing("duplicate timestamp at row 2 after sorting");
    }
    for (std::size_t i = 1; i < series.points.size(); ++i) {
        const auto gap = series.points[i].ts - series.points[i - 1].ts;
        if (gap != series.granularity) {
            throw NonUniformSpacing("gap of " +
                                    std::to_string(std::chrono::duration_cast<std::chrono::seconds>(gap).count()) +
                                    "s before point " + std::to_string(i + 1) + ", expected " +
                                    std::to_string(series.granularity.count()) + "s");
        }
    }
    return series;
}

std::vector<Window> make_windows(const RawSeries& series, int input_length, int prediction_length,
                                 int stride) {
    if (input_length <= 0 || prediction_length <= 0 || stride <= 0) {
        throw SeriesTooShort("make_windows: lengths and stride must be positive");
    }
    const int total = input_length + prediction_length;
    const int n = static_cast<int>(series.points.size());
    if (total > n) {
        throw SeriesTooShort("make_windows: need " + std::to_string(total) + " points, have " +
                             std::to_string(n));
    }

    auto covariates_at = [&](int idx) {
        std::map<std::string, std::string> m;
        const SeriesPoint& pt = series.points[static_cast<std::size_t>(idx)];
        for (std::size_t c = 0; c < series.covariate_names.size() && c < pt.covariates.size(); ++c) {
            if (!pt.covariates[c].empty()) m[series.covariate_names[c]] = pt.covariates[c];
        }
        return m;
    };

    std::vector<Window> out;
    const int count = (n - total) / stride + 1;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const int off = k * stride;
        Window w;
        w.id = k;
        w.history.reserve(static_cast<std::size_t>(input_length));
        w.target.reserve(static_cast<std::size_t>(prediction_length));
        for (int i = 0; i < input_length; ++i)
            w.history.push_back(series.points[static_cast<std::size_t>(off + i)].value);
        for (int i = 0; i < prediction_length; ++i)
            w.target.push_back(series.points[static_cast<std::size_t>(off + input_length + i)].value);
        w.meta.region = series.name;
        w.meta.granularity = series.granularity;
        w.meta.start = series.points[static_cast<std::size_t>(off)].ts;
        w.meta.prediction_start = series.points[static_cast<std::size_t>(off + input_length)].ts;
        w.meta.start_covariates = covariates_at(off);
        w.meta.prediction_covariates = covariates_at(off + input_length);
        out.push_back(std::move(w));
    }
    return out;
}

std::vector<RoundBatch> split_rounds(const std::vector<Window>& windows, int rounds,
                                     std::uint64_t seed, std::vector<std::string>* warnings) {
    if (rounds < 1) throw ConfigInvalid("split_rounds: rounds must be >= 1");
    if (windows.empty()) throw ConfigInvalid("split_rounds: empty window set");

    std::vector<int> ids;
    ids.reserve(windows.size());
    for (const Window& w : windows) ids.push_back(w.id);
    std::mt19937_64 rng(derive_seed(seed, {0x5eedful, static_cast<std::uint64_t>(rounds)}));
    seeded_shuffle(ids, rng);

    const std::size_t n = ids.size();
    const std::size_t base = n / static_cast<std::size_t>(rounds);
    const std::size_t rem = n % static_cast<std::size_t>(rounds);
    std::vector<RoundBatch> out;
    out.reserve(static_cast<std::size_t>(rounds));
    std::size_t pos = 0;
    for (int r = 0; r < rounds; ++r) {
        RoundBatch b;
        b.round_index = r + 1;
        const std::size_t take = base + (static_cast<std::size_t>(r) < rem ? 1 : 0);
        for (std::size_t i = 0; i < take; ++i) b.window_ids.push_back(ids[pos++]);
        if (b.window_ids.empty() && warnings) {
            warnings->push_back("round " + std::to_string(b.round_index) +
                                " received an empty batch (" + std::to_string(n) + " windows over " +
                                std::to_string(rounds) + " rounds)");
        }
        out.push_back(std::move(b));
    }
    return out;
}

NewsLoad load_news(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MalformedLine("line 1: cannot open " + path.string());

    NewsLoad result;
    std::map<std::string, bool> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw MalformedLine("line " + std::to_string(line_no) + ": not a JSON object");
        }
        if (!j.contains("date") || !j.contains("region") || !j.contains("text")) {
            throw MalformedLine("line " + std::to_string(line_no) +
                                ": required keys are date, region, text");
        }
        NewsItem item;
        auto date = parse_iso_date(j["date"].get<std::string>());
        if (!date) {
            throw MalformedLine("line " + std::to_string(line_no) + ": unparseable date '" +
                                j["date"].get<std::string>() + "'");
        }
        item.date = *date;
        item.region = j["region"].get<std::string>();
        item.text = j["text"].get<std::string>();
        if (trim(item.text).empty()) {
            throw MalformedLine("line " + std::to_string(line_no) + ": empty text");
        }
        item.id = news_id(item.date, item.region, item.text);
        if (seen.count(item.id)) {
            ++result.duplicates;
            continue;
        }
        seen.emplace(item.id, true);
        result.items.push_back(std::move(item));
    }
    return result;
}

WindowSplit chrono_split(std::vector<Window> windows, double train_frac, double valid_frac) {
    WindowSplit split;
    const std::size_t n = windows.size();
    const auto n_train = static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(n)));
    const auto n_valid = static_cast<std::size_t>(std::floor(valid_frac * static_cast<double>(n)));
    for (std::size_t i = 0; i < n; ++i) {
        if (i < n_train)
            split.train.push_back(std::move(windows[i]));
        else if (i < n_train + n_valid)
            split.valid.push_back(std::move(windows[i]));
        else
            split.test.push_back(std::move(windows[i]));
    }
    return split;
}

}  // namespace arena
