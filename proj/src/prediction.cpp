#include "arena/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <httplib.h>
#include <json.hpp>

#include "arena/errors.hpp"
#include "arena/kernels.hpp"
#include "arena/util.hpp"

namespace arena {

namespace {

const std::set<std::string>& stopwords() {
    static const std::set<std::string> words = {
        "this", "that", "with", "from", "will", "have", "been", "which", "their", "would",
        "about", "there", "these", "those", "when", "where", "what", "because", "could",
        "should", "into", "over", "under", "more", "most", "some", "such", "than", "then",
        "them", "they", "also", "after", "before", "during", "between", "today", "tomorrow",
        "news", "events", "event", "affecting", "affect", "impact", "impacting", "watch",
        "prioritize", "monitor", "track", "select", "selecting", "relevant", "consumption",
        "demand", "load", "electricity", "regional", "region", "future", "term", "long",
        "short", "real", "time", "data", "value", "values", "increase", "decrease",
    };
    return words;
}

bool finite_all(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

constexpr std::string_view kBucketLong = "Long-Term Effect on Future Load Consumption";
constexpr std::string_view kBucketShort = "Short-Term Effect on Today's Load Consumption";
constexpr std::string_view kBucketReal = "Real-Time Direct Effect on Today's Load Consumption";

}  // namespace

std::vector<std::string> SelectedNews::all_ids() const {
    std::vector<std::string> ids;
    for (const auto* bucket : {&long_term, &short_term, &real_time}) {
        for (const SelectedItem& item : *bucket) ids.push_back(item.news_id);
    }
    return ids;
}

// --- predictors -------------------------------------------------------------

Forecast PersistencePredictor::predict(const Window& window, const SelectedNews&, const NewsDb&) {
    if (window.history.empty()) throw PredictorFailure("persistence: empty history");
    Forecast f;
    f.window_id = window.id;
    f.values.assign(window.target.size(), window.history.back());
    return f;
}

ScriptedPredictor::ScriptedPredictor(ScriptedPredictorConfig config) : config_(std::move(config)) {}

double ScriptedPredictor::error_for(const SelectedNews& selected) const {
    int overlap = 0;
    int trapped = 0;
    for (const std::string& id : selected.all_ids()) {
        if (config_.relevant_ids.count(id)) ++overlap;
        if (config_.penalized_ids.count(id)) ++trapped;
    }
    return std::max(0.0, config_.base - config_.gain * static_cast<double>(overlap) +
                             config_.penalty * static_cast<double>(trapped));
}

Forecast ScriptedPredictor::predict(const Window& window, const SelectedNews& selected,
                                    const NewsDb&) {
    // target * (1 + err) has MAPE exactly err for positive targets.
    const double err = error_for(selected);
    Forecast f;
    f.window_id = window.id;
    f.values.reserve(window.target.size());
    for (double y : window.target) f.values.push_back(y * (1.0 + err));
    return f;
}

RemotePredictor::RemotePredictor(RemotePredictorConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) throw ConfigInvalid("remote predictor needs a base url");
}

Forecast RemotePredictor::predict(const Window& window, const SelectedNews& selected,
                                  const NewsDb& news) {
    std::string::size_type scheme = config_.base_url.find("://");
    std::string::size_type path_start = scheme == std::string::npos
                                            ? config_.base_url.find('/')
                                            : config_.base_url.find('/', scheme + 3);
    std::string origin = path_start == std::string::npos ? config_.base_url
                                                         : config_.base_url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : config_.base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

    nlohmann::json meta{
        {"region", window.meta.region},
        {"start", format_iso8601(window.meta.start)},
        {"prediction_start", format_iso8601(window.meta.prediction_start)},
        {"granularity_seconds", window.meta.granularity.count()},
        {"prediction_length", window.target.size()},
    };
    if (!window.meta.start_covariates.empty()) meta["start_covariates"] = window.meta.start_covariates;
    if (!window.meta.prediction_covariates.empty()) {
        meta["prediction_covariates"] = window.meta.prediction_covariates;
    }
    nlohmann::json items = nlohmann::json::array();
    auto add_bucket = [&](const std::vector<SelectedItem>& bucket, std::string_view horizon) {
        for (const SelectedItem& s : bucket) {
            const NewsItem* n = news.find(s.news_id);
            if (!n) continue;
            items.push_back({{"date", format_iso_date(n->date)},
                             {"region", n->region},
                             {"text", n->text},
                             {"rationality", s.rationality},
                             {"horizon", std::string(horizon)}});
        }
    };
    add_bucket(selected.long_term, "long_term");
    add_bucket(selected.short_term, "short_term");
    add_bucket(selected.real_time, "real_time");

    nlohmann::json body{{"history", window.history}, {"meta", meta}, {"news", items}};

    httplib::Client client(origin);
    client.set_connection_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
    client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
    httplib::Result res = client.Post(prefix + "/predict", body.dump(), "application/json");
    if (!res || res->status != 200) {
        throw PredictorFailure("remote predictor unreachable or failed: " +
                               (res ? std::to_string(res->status) : httplib::to_string(res.error())));
    }
    nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("values") || !j["values"].is_array()) {
        throw PredictorFailure("remote predictor returned an unexpected payload");
    }
    Forecast f;
    f.window_id = window.id;
    for (const auto& v : j["values"]) f.values.push_back(v.get<double>());
    if (f.values.size() != window.target.size() || !finite_all(f.values)) {
        throw PredictorFailure("remote predictor returned " + std::to_string(f.values.size()) +
                               " values for a horizon of " + std::to_string(window.target.size()));
    }
    return f;
}

// --- selection ----------------------------------------------------------------

std::vector<const NewsItem*> candidate_news(const Window& window, const NewsDb& news,
                                            int lookback_days) {
    const Date from = window.start_date() - std::chrono::days(lookback_days);
    return news.between(from, window.prediction_date());
}

std::vector<std::string> selection_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 4 && !stopwords().count(cur)) {
            if (std::find(tokens.begin(), tokens.end(), cur) == tokens.end()) tokens.push_back(cur);
        }
        cur.clear();
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

namespace {

nlohmann::json candidate_news_json(std::span<const NewsItem* const> candidates) {
    nlohmann::json arr = nlohmann::json::array();
    for (const NewsItem* n : candidates) {
        arr.push_back({{"id", n->id},
                       {"date", format_iso_date(n->date)},
                       {"region", n->region},
                       {"text", n->text}});
    }
    return arr;
}

void parse_bucket(const nlohmann::json& reply, std::string_view key,
                  std::vector<SelectedItem>& bucket, const NewsDb& news, int& dropped,
                  std::vector<std::string>* warnings) {
    const auto it = reply.find(std::string(key));
    if (it == reply.end()) return;
    const nlohmann::json& arr = *it;
    if (!arr.is_array()) return;  // "no" or prose counts as an empty bucket
    for (const auto& item : arr) {
        if (!item.is_object()) continue;
        std::string id = item.value("id", std::string());
        if (id.empty() && item.contains("news")) {
            // Fall back to exact text match when the id field was omitted.
            const std::string text = item["news"].get<std::string>();
            for (const NewsItem& n : news.all()) {
                if (n.text == text) {
                    id = n.id;
                    break;
                }
            }
        }
        const NewsItem* n = id.empty() ? nullptr : news.find(id);
        if (!n) {
            ++dropped;
            if (warnings) {
                warnings->push_back("selection cited unknown news id '" + id + "'; dropped");
            }
            continue;
        }
        bucket.push_back(SelectedItem{n->id, item.value("rationality", std::string())});
    }
}

}  // namespace

SelectedNews select_news(const LogicDocument& logic, const Window& window, const NewsDb& news,
                         LlmGateway& gateway, int lookback_days, RunLedger::Coords coords,
                         std::vector<std::string>* warnings) {
    SelectedNews out;
    out.window_id = window.id;

    const std::vector<const NewsItem*> pool = candidate_news(window, news, lookback_days);
    if (pool.empty()) return out;

    Bindings b{
        {"logic", logic_text(logic)},
        {"candidate_news", candidate_news_json(pool).dump(2)},
    };
    ChatRequest req;
    req.user = render(PromptId::filter_news, b);
    req.expected_format = ExpectedFormat::json;
    req.template_name = std::string(prompt_name(PromptId::filter_news));
    req.selector = "epoch=" + std::to_string(coords.epoch) + ";round=" + std::to_string(coords.round) +
                   ";agent=" + std::to_string(coords.agent) + ";window=" + std::to_string(window.id);
    req.bindings = b;
    req.bindings["window_id"] = std::to_string(window.id);
    req.bindings["prediction_date"] = format_iso_date(window.prediction_date());

    const ChatResponse resp = gateway.complete(req, coords);
    const auto j = extract_json(resp.text);
    if (!j || !j->is_object()) {
        throw MalformedJson("news selection reply is not a JSON object");
    }
    parse_bucket(*j, kBucketLong, out.long_term, news, out.dropped_unknown, warnings);
    parse_bucket(*j, kBucketShort, out.short_term, news, out.dropped_unknown, warnings);
    parse_bucket(*j, kBucketReal, out.real_time, news, out.dropped_unknown, warnings);
    return out;
}

SelectedNews select_news_deterministic(const LogicDocument& logic, const Window& window,
                                       const NewsDb& news, int lookback_days) {
    SelectedNews out;
    out.window_id = window.id;

    std::vector<std::string> logic_tokens;
    for (const std::string& clause : logic.clauses) {
        for (std::string& t : selection_tokens(clause)) {
            if (std::find(logic_tokens.begin(), logic_tokens.end(), t) == logic_tokens.end()) {
                logic_tokens.push_back(std::move(t));
            }
        }
    }
    if (logic_tokens.empty()) return out;

    const Date prediction = window.prediction_date();
    for (const NewsItem* n : candidate_news(window, news, lookback_days)) {
        const std::vector<std::string> news_tokens = selection_tokens(n->text);
        std::string matched;
        for (const std::string& t : logic_tokens) {
            if (std::find(news_tokens.begin(), news_tokens.end(), t) != news_tokens.end()) {
                matched = t;
                break;
            }
        }
        if (matched.empty()) continue;
        SelectedItem item{n->id, "matched selection keyword '" + matched + "'"};
        const auto days_before = (prediction - n->date).count();
        if (days_before <= 0) {
            out.real_time.push_back(std::move(item));
        } else if (days_before <= 3) {
            out.short_term.push_back(std::move(item));
        } else {
            out.long_term.push_back(std::move(item));
        }
    }
    return out;
}

// --- aggregation ---------------------------------------------------------------

Forecast aggregate(const std::map<int, Forecast>& forecasts, const std::map<int, double>& scores) {
    if (forecasts.empty()) throw KeyMismatch("aggregate: empty forecast set");
    if (forecasts.size() != scores.size()) {
        throw KeyMismatch("aggregate: " + std::to_string(forecasts.size()) + " forecasts vs " +
                          std::to_string(scores.size()) + " scores");
    }
    const std::size_t len = forecasts.begin()->second.values.size();
    const int window_id = forecasts.begin()->second.window_id;
    double total = 0.0;
    for (const auto& [id, f] : forecasts) {
        if (!scores.count(id)) throw KeyMismatch("aggregate: no score for agent " + std::to_string(id));
        if (f.values.size() != len) {
            throw LengthMismatch("aggregate: forecast lengths differ (" + std::to_string(len) +
                                 " vs " + std::to_string(f.values.size()) + ")");
        }
        const double m = scores.at(id);
        if (!(m > 0.0)) {
            throw NonPositiveScore("aggregate: agent " + std::to_string(id) +
                                   " has non-positive score");
        }
        total += m;
    }
    Forecast out;
    out.window_id = window_id;
    out.agent_id = kEnsembleId;
    out.values.assign(len, 0.0);
    for (const auto& [id, f] : forecasts) {
        kernels::weighted_accumulate(out.values, scores.at(id) / total, f.values);
    }
    return out;
}

// --- serialization ---------------------------------------------------------------

std::string format_predictor_input(const Window& window, const SelectedNews& selected,
                                   const NewsDb& news) {
    std::vector<std::string> history_parts;
    history_parts.reserve(window.history.size());
    for (double v : window.history) history_parts.push_back(format_sig3(v));

    const Date start = window.start_date();
    const Date pred = window.prediction_date();

    auto holiday_phrase = [](const std::map<std::string, std::string>& cov) -> std::string {
        auto it = cov.find("holiday");
        if (it == cov.end()) it = cov.find("public_holiday");
        if (it == cov.end() || it->second.empty() || it->second == "none" || it->second == "0") {
            return "it is not a public holiday";
        }
        return "it is a public holiday: " + it->second;
    };
    auto covariate_phrase = [](const std::map<std::string, std::string>& cov) {
        std::string out;
        for (const auto& [k, v] : cov) {
            if (k == "holiday" || k == "public_holiday") continue;
            out += " the " + k + " is " + v + ";";
        }
        return out;
    };

    std::string input = "Based on the historical load data, please predict the load consumption in "
                        "the next period. The region for prediction is " +
                        window.meta.region + ". The start date of historical data was on " +
                        format_iso_date(start) + " that is " + weekday_name(start) + ", and " +
                        holiday_phrase(window.meta.start_covariates) + ". The data frequency is " +
                        std::to_string(window.meta.granularity.count() / 60) +
                        " minutes per point. The date of prediction is on " + format_iso_date(pred) +
                        " that is " + weekday_name(pred) + ", and " +
                        holiday_phrase(window.meta.prediction_covariates) + ".";
    if (std::string c = covariate_phrase(window.meta.start_covariates); !c.empty()) {
        input += " Covariates of the start date:" + c;
    }
    if (std::string c = covariate_phrase(window.meta.prediction_covariates); !c.empty()) {
        input += " Covariates of the prediction date:" + c;
    }
    for (const auto* bucket : {&selected.long_term, &selected.short_term, &selected.real_time}) {
        for (const SelectedItem& s : *bucket) {
            const NewsItem* n = news.find(s.news_id);
            if (!n) continue;
            input += " On " + format_iso_date(n->date) + ", in the state of " + n->region +
                     ", the news was: '" + n->text + "'.";
            if (!s.rationality.empty()) input += " Rationality behind it: " + s.rationality + ".";
        }
    }

    nlohmann::json j{
        {"instruction", "The historical load data is: " + join(history_parts, ",")},
        {"input", input},
        {"output", ""},
    };
    return j.dump();
}

void export_forecasts_csv(const std::filesystem::path& path, std::span<const Forecast> forecasts) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataUnloadable("cannot open " + path.string());
    out << "window_id,agent_id,step,value\n";
    for (const Forecast& f : forecasts) {
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            out << f.window_id << ',' << f.agent_id << ',' << i << ',' << format_double(f.values[i])
                << '\n';
        }
    }
}

}  // namespace arena
