#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "arena/util.hpp"

namespace arena {

struct SeriesPoint {
    TimePoint ts{};
    double value = 0.0;
    std::vector<std::string> covariates;  // positional, matches RawSeries::covariate_names
};

struct RawSeries {
    std::string name;
    std::chrono::seconds granularity{0};
    std::vector<std::string> covariate_names;
    std::vector<SeriesPoint> points;
};

struct SeriesSchema {
    std::string timestamp_column = "timestamp";
    std::string value_column = "value";
    std::string series_name;  // defaults to the file stem
};

struct WindowMeta {
    std::string region;
    TimePoint start{};             // first history timestamp
    TimePoint prediction_start{};  // first target timestamp
    std::chrono::seconds granularity{0};
    std::map<std::string, std::string> start_covariates;
    std::map<std::string, std::string> prediction_covariates;
};

struct Window {
    int id = 0;
    std::vector<double> history;
    std::vector<double> target;
    WindowMeta meta;

    Date start_date() const { return std::chrono::floor<std::chrono::days>(meta.start); }
    Date prediction_date() const {
        return std::chrono::floor<std::chrono::days>(meta.prediction_start);
    }
};

struct NewsItem {
    Date date{};
    std::string region;
    std::string text;
    std::string id;  // stable hash of (date, region, text)
};

std::string news_id(Date date, std::string_view region, std::string_view text);

class NewsDb {
  public:
    NewsDb() = default;
    explicit NewsDb(std::vector<NewsItem> items);

    const NewsItem* find(std::string_view id) const;
    // Inclusive date range, ordered by (date, id).
    std::vector<const NewsItem*> between(Date from, Date to) const;
    std::span<const NewsItem> all() const { return items_; }
    std::size_t size() const { return items_.size(); }

  private:
    std::vector<NewsItem> items_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

struct RoundBatch {
    int round_index = 0;  // 1-based
    std::vector<int> window_ids;
};

struct NewsLoad {
    std::vector<NewsItem> items;
    int duplicates = 0;
};

struct WindowSplit {
    std::vector<Window> train, valid, test;
};

RawSeries load_series(const std::filesystem::path& path, const SeriesSchema& schema = {});

std::vector<Window> make_windows(const RawSeries& series, int input_length, int prediction_length,
                                 int stride);

// Seeded shuffled partition into `rounds` batches whose sizes differ by at
// most one. Deterministic in (windows, rounds, seed).
std::vector<RoundBatch> split_rounds(const std::vector<Window>& windows, int rounds,
                                     std::uint64_t seed,
                                     std::vector<std::string>* warnings = nullptr);

NewsLoad load_news(const std::filesystem::path& path);

// Chronological split (default 8:1:1); windows are already in time order.
WindowSplit chrono_split(std::vector<Window> windows, double train_frac = 0.8,
                         double valid_frac = 0.1);

}  // namespace arena
