#include "arena/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <thread>

#include "arena/communication.hpp"
#include "arena/errors.hpp"
#include "arena/metrics.hpp"
#include "arena/reflection.hpp"
#include "arena/sim_strategy.hpp"
#include "arena/util.hpp"

namespace arena {

namespace {

MieVariant parse_mie_variant(std::string_view s) {
    if (s == "none") return MieVariant::none;
    if (s == "rank_top") return MieVariant::rank_top;
    if (s == "rank_ave") return MieVariant::rank_ave;
    if (s == "rank_top_ave") return MieVariant::rank_top_ave;
    throw ConfigInvalid("mie_variant must be none|rank_top|rank_ave|rank_top_ave, got '" +
                        std::string(s) + "'");
}

std::string_view mie_variant_name(MieVariant v) {
    switch (v) {
        case MieVariant::none: return "none";
        case MieVariant::rank_top: return "rank_top";
        case MieVariant::rank_ave: return "rank_ave";
        case MieVariant::rank_top_ave: break;
    }
    return "rank_top_ave";
}

// Index-space fan-out for pure per-window predictor work; results land in
// pre-sized slots so record order stays deterministic.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const int used = std::min<int>(workers, static_cast<int>(n));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(used));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(used));
    for (int t = 0; t < used; ++t) {
        threads.emplace_back([&, t] {
            try {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= n) return;
                    fn(i);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (std::thread& th : threads) th.join();
    for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string selector_for(int epoch, int round, int agent) {
    return "epoch=" + std::to_string(epoch) + ";round=" + std::to_string(round) +
           ";agent=" + std::to_string(agent);
}

}  // namespace

// --- config ---------------------------------------------------------------------

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    c.agents = j.value("agents", c.agents);
    c.rounds = j.value("rounds", c.rounds);
    c.epochs = j.value("epochs", c.epochs);
    c.alpha = j.value("alpha", c.alpha);
    c.ci = j.value("ci", c.ci);
    c.msr_sample = j.value("msr_sample", c.msr_sample);
    c.seed = j.value("seed", c.seed);
    if (j.contains("prompt_variant")) {
        c.prompt_variant = parse_prompt_variant(j["prompt_variant"].get<std::string>());
    }
    if (j.contains("mie_variant")) c.mie_variant = parse_mie_variant(j["mie_variant"].get<std::string>());
    c.termination_epsilon = j.value("termination_epsilon", c.termination_epsilon);
    c.keep_epsilon = j.value("keep_epsilon", c.keep_epsilon);
    c.lookback_days = j.value("lookback_days", c.lookback_days);
    c.workers = j.value("workers", c.workers);
    if (j.contains("elimination_overrides")) {
        c.elimination_overrides = j["elimination_overrides"].get<std::vector<int>>();
    }
    if (j.contains("data")) {
        const auto& d = j["data"];
        c.data.series_path = d.value("series", c.data.series_path);
        c.data.news_path = d.value("news", c.data.news_path);
        c.data.input_length = d.value("input_length", c.data.input_length);
        c.data.prediction_length = d.value("prediction_length", c.data.prediction_length);
        c.data.stride = d.value("stride", c.data.stride);
    }
    if (j.contains("llm")) {
        const auto& l = j["llm"];
        c.llm.backend = l.value("backend", c.llm.backend);
        c.llm.script_path = l.value("script", c.llm.script_path);
        c.llm.strategy = l.value("strategy", c.llm.strategy);
        c.llm.model = l.value("model", c.llm.model);
        c.llm.temperature = l.value("temperature", c.llm.temperature);
        c.llm.top_k = l.value("top_k", c.llm.top_k);
        c.llm.top_p = l.value("top_p", c.llm.top_p);
        c.llm.max_retries = l.value("max_retries", c.llm.max_retries);
        c.llm.retry_base_ms = l.value("retry_base_ms", c.llm.retry_base_ms);
    }
    if (j.contains("embedder")) {
        const auto& e = j["embedder"];
        c.embedder.backend = e.value("backend", c.embedder.backend);
        c.embedder.dim = e.value("dim", c.embedder.dim);
        c.embedder.token_limit = e.value("token_limit", c.embedder.token_limit);
    }
    if (j.contains("predictor")) {
        const auto& p = j["predictor"];
        c.predictor.type = p.value("type", c.predictor.type);
        c.predictor.base = p.value("base", c.predictor.base);
        c.predictor.gain = p.value("gain", c.predictor.gain);
        if (p.contains("relevant_keywords")) {
            c.predictor.relevant_keywords = p["relevant_keywords"].get<std::vector<std::string>>();
        }
        c.predictor.base_url = p.value("base_url", c.predictor.base_url);
    }
    c.out_dir = j.value("out", c.out_dir);
    return c;
}

nlohmann::json config_to_json(const RunConfig& c) {
    return nlohmann::json{
        {"agents", c.agents},
        {"rounds", c.rounds},
        {"epochs", c.epochs},
        {"alpha", c.alpha},
        {"ci", c.ci},
        {"msr_sample", c.msr_sample},
        {"seed", c.seed},
        {"prompt_variant", std::string(prompt_variant_name(c.prompt_variant))},
        {"mie_variant", std::string(mie_variant_name(c.mie_variant))},
        {"termination_epsilon", c.termination_epsilon},
        {"keep_epsilon", c.keep_epsilon},
        {"lookback_days", c.lookback_days},
        {"elimination_overrides", c.elimination_overrides},
        {"data",
         {{"series", c.data.series_path},
          {"news", c.data.news_path},
          {"input_length", c.data.input_length},
          {"prediction_length", c.data.prediction_length},
          {"stride", c.data.stride}}},
        {"llm",
         {{"backend", c.llm.backend},
          {"strategy", c.llm.strategy},
          {"temperature", c.llm.temperature},
          {"top_k", c.llm.top_k},
          {"top_p", c.llm.top_p}}},
        {"embedder", {{"backend", c.embedder.backend}, {"dim", c.embedder.dim}}},
        {"predictor",
         {{"type", c.predictor.type},
          {"base", c.predictor.base},
          {"gain", c.predictor.gain},
          {"relevant_keywords", c.predictor.relevant_keywords}}},
    };
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open config: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ConfigInvalid("config is not a JSON object: " + path.string());
    }
    return config_from_json(j);
}

void validate_config(const RunConfig& c) {
    if (c.agents < 2) throw ConfigInvalid("agents must be >= 2");
    if (c.rounds < 1) throw ConfigInvalid("rounds must be >= 1");
    if (c.epochs < 1) throw ConfigInvalid("epochs must be >= 1");
    if (!(c.alpha > 0.0) || c.alpha > 1.0) throw ConfigInvalid("alpha must be in (0,1]");
    if (c.ci < 0.0 || c.ci > 1.0) throw ConfigInvalid("ci must be in [0,1]");
    if (c.msr_sample < 1) throw ConfigInvalid("msr_sample must be >= 1");
    if (c.lookback_days < 0) throw ConfigInvalid("lookback_days must be >= 0");
    if (c.workers < 1) throw ConfigInvalid("workers must be >= 1");
    if (c.data.series_path.empty()) throw ConfigInvalid("data.series is required");
    if (c.data.news_path.empty()) throw ConfigInvalid("data.news is required");
    if (c.data.input_length < 1 || c.data.prediction_length < 1) {
        throw ConfigInvalid("input_length and prediction_length must be >= 1");
    }
    if (c.llm.backend != "scripted" && c.llm.backend != "http") {
        throw ConfigInvalid("llm.backend must be scripted|http");
    }
    if (c.embedder.backend != "scripted" && c.embedder.backend != "http") {
        throw ConfigInvalid("embedder.backend must be scripted|http");
    }
    if (c.predictor.type != "persistence" && c.predictor.type != "scripted" &&
        c.predictor.type != "remote") {
        throw ConfigInvalid("predictor.type must be persistence|scripted|remote");
    }
}

bool check_termination(std::span<const double> validation_history, double epsilon) {
    if (validation_history.size() < 2) return false;
    const double prev = validation_history[validation_history.size() - 2];
    const double latest = validation_history.back();
    return (prev - latest) < epsilon;
}

// --- replay ---------------------------------------------------------------------

ReplayResult replay_ledger(const std::filesystem::path& path) {
    const std::vector<RunLedger::Line> lines = RunLedger::read_lines(path);

    // Resume point: last barrier record. Everything past it belongs to a
    // partial round or epoch boundary and is discarded on resume.
    std::size_t barrier = 0;  // number of applied records
    for (std::size_t i = lines.size(); i > 0; --i) {
        const std::string type = lines[i - 1].record.value("type", std::string());
        if (type == "round_complete" || type == "setup_complete" || type == "epoch_complete" ||
            type == "run_complete") {
            barrier = i;
            break;
        }
    }

    ReplayResult out;
    std::map<int, std::size_t> index_of;
    for (std::size_t i = 0; i < barrier; ++i) {
        const nlohmann::json& rec = lines[i].record;
        const std::string type = rec.value("type", std::string());
        const int agent_id = rec.value("agent", -1);
        const nlohmann::json& data = rec.contains("data") ? rec.at("data") : nlohmann::json::object();

        if (type == "agent_init") {
            Agent a;
            a.id = agent_id;
            a.cumulative_score = data.value("cs", 1.0);
            a.profile = data.value("profile", std::string()) == "high_competitive"
                            ? Profile::high_competitive
                            : Profile::low_competitive;
            a.alive = true;
            index_of[a.id] = out.agents.size();
            out.agents.push_back(std::move(a));
        } else if (type == "logic_adopted") {
            Agent& a = out.agents.at(index_of.at(agent_id));
            a.logic.clauses = data.at("clauses").get<std::vector<std::string>>();
            a.logic.version = data.value("version", 0);
            a.logic.provenance = data.value("provenance", std::string()) == "initial"
                                     ? LogicProvenance::initial
                                     : LogicProvenance::reflected;
        } else if (type == "setup_complete") {
            out.setup_complete = true;
        } else if (type == "round_scores") {
            for (const auto& s : data.at("scores")) {
                Agent& a = out.agents.at(index_of.at(s.at("agent").get<int>()));
                a.cumulative_score = s.at("cs_after").get<double>();
            }
        } else if (type == "publication") {
            Agent& a = out.agents.at(index_of.at(agent_id));
            PublicationRecord p;
            p.epoch = rec.value("epoch", 0);
            p.round = rec.value("round", 0);
            p.broadcast = data.value("broadcast", false);
            p.targets = data.value("receivers", std::vector<int>{});
            p.authentic = data.value("authentic", false);
            p.published_text = data.value("body", std::string());
            a.publication_log.push_back(std::move(p));
        } else if (type == "round_complete") {
            out.last_epoch = rec.value("epoch", 0);
            out.last_round = rec.value("round", 0);
        } else if (type == "sf") {
            for (int id : data.at("eliminated").get<std::vector<int>>()) {
                out.agents.at(index_of.at(id)).alive = false;
            }
        } else if (type == "validation") {
            out.validation_history.push_back(data.at("ensemble_mape").get<double>());
        } else if (type == "termination") {
            out.terminated = true;
        } else if (type == "epoch_complete") {
            out.completed_epochs = rec.value("epoch", 0);
            out.epoch_end_logic_text.clear();
            for (const Agent& a : out.agents) {
                if (a.alive) out.epoch_end_logic_text[a.id] = logic_text(a.logic);
            }
        } else if (type == "run_complete") {
            out.run_complete = true;
        }
    }
    if (barrier > 0) {
        out.has_barrier = true;
        out.resume_offset = lines[barrier - 1].end_offset;
        out.next_seq = lines[barrier - 1].record.value("seq", std::uint64_t{0}) + 1;
    }
    return out;
}

// --- orchestrator ------------------------------------------------------------------

Orchestrator::Orchestrator(RunConfig cfg) : cfg_(std::move(cfg)) {}

void Orchestrator::set_llm_backend(std::shared_ptr<LlmBackend> backend) {
    llm_backend_ = std::move(backend);
}
void Orchestrator::set_embedder(std::shared_ptr<EmbedBackend> embedder) {
    embedder_ = std::move(embedder);
}
void Orchestrator::set_predictor(std::shared_ptr<Predictor> predictor) {
    predictor_ = std::move(predictor);
}

std::vector<int> Orchestrator::living_ids() const {
    std::vector<int> out;
    for (const Agent& a : agents_) {
        if (a.alive) out.push_back(a.id);
    }
    return out;
}

Agent& Orchestrator::agent_ref(int id) {
    for (Agent& a : agents_) {
        if (a.id == id) return a;
    }
    throw KeyMismatch("unknown agent " + std::to_string(id));
}

const Window& Orchestrator::window_by_id(int id) const {
    auto it = window_index_.find(id);
    if (it == window_index_.end()) throw KeyMismatch("unknown window " + std::to_string(id));
    return *it->second;
}

void Orchestrator::load_data(bool announce) {
    if (!std::filesystem::exists(cfg_.data.series_path)) {
        throw DataUnloadable("series file not found: " + cfg_.data.series_path);
    }
    if (!std::filesystem::exists(cfg_.data.news_path)) {
        throw DataUnloadable("news file not found: " + cfg_.data.news_path);
    }
    const RawSeries series = load_series(cfg_.data.series_path);
    const int stride = cfg_.data.stride > 0 ? cfg_.data.stride : cfg_.data.prediction_length;
    std::vector<Window> windows =
        make_windows(series, cfg_.data.input_length, cfg_.data.prediction_length, stride);
    split_ = chrono_split(std::move(windows));
    if (split_.train.empty()) throw DataUnloadable("no training windows after the 8:1:1 split");

    NewsLoad loaded = load_news(cfg_.data.news_path);
    news_ = NewsDb(std::move(loaded.items));

    window_index_.clear();
    for (const Window& w : split_.train) window_index_[w.id] = &w;
    for (const Window& w : split_.valid) window_index_[w.id] = &w;
    for (const Window& w : split_.test) window_index_[w.id] = &w;

    if (announce) {
        ledger_.append("data_summary",
                       nlohmann::json{
                           {"series", series.name},
                           {"points", series.points.size()},
                           {"windows",
                            split_.train.size() + split_.valid.size() + split_.test.size()},
                           {"train", split_.train.size()},
                           {"valid", split_.valid.size()},
                           {"test", split_.test.size()},
                           {"news", news_.size()},
                           {"duplicate_news", loaded.duplicates},
                       });
    }
}

void Orchestrator::build_backends() {
    if (!llm_backend_) {
        if (cfg_.llm.backend == "http") {
            HttpLlmConfig hc = HttpLlm::config_from_env();
            if (!cfg_.llm.model.empty()) hc.model = cfg_.llm.model;
            llm_backend_ = std::make_shared<HttpLlm>(hc);
        } else {
            auto scripted = cfg_.llm.script_path.empty()
                                ? std::make_shared<ScriptedLlm>()
                                : std::make_shared<ScriptedLlm>(
                                      ScriptedLlm::from_file(cfg_.llm.script_path));
            if (cfg_.llm.strategy == "sim") {
                install_sim_strategy(*scripted,
                                     SimStrategyConfig{cfg_.predictor.relevant_keywords});
            }
            llm_backend_ = scripted;
        }
    }
    if (!embedder_) {
        if (cfg_.embedder.backend == "http") {
            embedder_ = std::make_shared<HttpEmbedder>(HttpEmbedder::config_from_env());
        } else {
            embedder_ = std::make_shared<ScriptedEmbedder>(
                static_cast<std::size_t>(cfg_.embedder.dim),
                static_cast<std::size_t>(cfg_.embedder.token_limit));
        }
    }
    if (!predictor_) {
        if (cfg_.predictor.type == "persistence") {
            predictor_ = std::make_shared<PersistencePredictor>();
        } else if (cfg_.predictor.type == "scripted") {
            ScriptedPredictorConfig pc;
            pc.base = cfg_.predictor.base;
            pc.gain = cfg_.predictor.gain;
            for (const NewsItem& n : news_.all()) {
                for (const std::string& kw : cfg_.predictor.relevant_keywords) {
                    if (contains_ci(n.text, kw)) {
                        pc.relevant_ids.insert(n.id);
                        break;
                    }
                }
            }
            predictor_ = std::make_shared<ScriptedPredictor>(std::move(pc));
        } else {
            RemotePredictorConfig rc;
            rc.base_url = cfg_.predictor.base_url;
            predictor_ = std::make_shared<RemotePredictor>(rc);
        }
    }
    RetryPolicy retry;
    retry.max_retries = cfg_.llm.max_retries;
    retry.base_delay_ms = cfg_.llm.retry_base_ms;
    gateway_ = std::make_unique<LlmGateway>(llm_backend_, retry, &ledger_);
}

void Orchestrator::init_population() {
    agents_ = init_agents(cfg_.agents, cfg_.ci, cfg_.seed);
    for (const Agent& a : agents_) {
        ledger_.append("agent_init",
                       nlohmann::json{{"profile", std::string(profile_name(a.profile))},
                                      {"cs", a.cumulative_score}},
                       {0, 0, a.id});
    }
}

void Orchestrator::generate_initial_logics() {
    for (Agent& a : agents_) {
        ChatRequest req;
        req.user = render(PromptId::initial_logic, {});
        req.template_name = std::string(prompt_name(PromptId::initial_logic));
        req.selector = selector_for(0, 0, a.id);
        req.temperature = cfg_.llm.temperature;
        req.top_k = cfg_.llm.top_k;
        req.top_p = cfg_.llm.top_p;
        const ChatResponse resp = gateway_->complete(req, {0, 0, a.id});
        a.logic = logic_from_text(resp.text, 1, LogicProvenance::initial);
        ledger_.append("logic_adopted",
                       nlohmann::json{{"version", a.logic.version},
                                      {"provenance", "initial"},
                                      {"clauses", a.logic.clauses}},
                       {0, 0, a.id});
    }
    ledger_.append("setup_complete", nlohmann::json::object());
}

double Orchestrator::agent_round_mape(const Agent& agent, const RoundBatch& batch, int epoch,
                                      int round) {
    const RunLedger::Coords coords{epoch, round, agent.id};
    std::vector<SelectedNews> selections;
    selections.reserve(batch.window_ids.size());
    for (int wid : batch.window_ids) {
        const Window& w = window_by_id(wid);
        std::vector<std::string> warnings;
        SelectedNews sel = select_news(agent.logic, w, news_, *gateway_, cfg_.lookback_days, coords,
                                       &warnings);
        for (const std::string& msg : warnings) ledger_.warn(msg, coords);
        auto ids = [](const std::vector<SelectedItem>& b) {
            std::vector<std::string> out;
            for (const SelectedItem& s : b) out.push_back(s.news_id);
            return out;
        };
        ledger_.append("news_selected",
                       nlohmann::json{{"window", wid},
                                      {"long", ids(sel.long_term)},
                                      {"short", ids(sel.short_term)},
                                      {"real", ids(sel.real_time)},
                                      {"dropped", sel.dropped_unknown}},
                       coords);
        selections.push_back(std::move(sel));
    }

    std::vector<Forecast> forecasts(batch.window_ids.size());
    parallel_for(batch.window_ids.size(), cfg_.workers, [&](std::size_t i) {
        const Window& w = window_by_id(batch.window_ids[i]);
        Forecast f = predictor_->predict(w, selections[i], news_);
        f.agent_id = agent.id;
        if (f.values.size() != w.target.size()) {
            throw PredictorFailure("forecast length " + std::to_string(f.values.size()) +
                                   " does not match horizon " + std::to_string(w.target.size()));
        }
        forecasts[i] = std::move(f);
    });

    double total = 0.0;
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        const Window& w = window_by_id(batch.window_ids[i]);
        ledger_.append("forecast",
                       nlohmann::json{{"window", w.id}, {"values", forecasts[i].values}}, coords);
        total += compute_errors(w.target, forecasts[i].values).mape;
    }
    return total / static_cast<double>(forecasts.size());
}

void Orchestrator::run_round(int epoch, int round, const RoundBatch& batch) {
    const std::vector<int> living = living_ids();
    if (living.size() < 2) {
        throw TooFewAgents("round " + std::to_string(round) + " of epoch " + std::to_string(epoch) +
                           ": only " + std::to_string(living.size()) + " living agent(s)");
    }
    if (batch.window_ids.empty()) {
        ledger_.warn("empty round batch; skipping", {epoch, round, -1});
        ledger_.append("round_complete", nlohmann::json{{"skipped", true}}, {epoch, round, -1});
        return;
    }

    ledger_.append("round_begin", nlohmann::json{{"window_ids", batch.window_ids}},
                   {epoch, round, -1});

    // Stages 1-2: per-agent news selection and forecasting over the batch.
    std::map<int, double> mapes;
    for (int id : living) mapes[id] = agent_round_mape(agent_ref(id), batch, epoch, round);

    // Stage 3: evaluation, cumulative scores, competition awareness.
    const EmRound em = compute_em(mapes);
    std::map<int, double> cs_before;
    for (int id : living) cs_before[id] = agent_ref(id).cumulative_score;
    const std::map<int, double> cs_after = update_cs(cs_before, mapes);

    nlohmann::json score_rows = nlohmann::json::array();
    std::vector<double> cs_values;
    for (int id : living) {
        const EmScore& s = em.of(id);
        score_rows.push_back(nlohmann::json{
            {"agent", id},
            {"mape", s.mape},
            {"rank", s.rank},
            {"top", s.top},
            {"ave", s.ave},
            {"cs_before", cs_before.at(id)},
            {"cs_after", cs_after.at(id)},
        });
        cs_values.push_back(cs_after.at(id));
    }
    ledger_.append("round_scores",
                   nlohmann::json{{"scores", std::move(score_rows)},
                                  {"hhi", hhi(cs_values)},
                                  {"degenerate_top", em.degenerate_top}},
                   {epoch, round, -1});
    for (int id : living) {
        agent_ref(id).cumulative_score = cs_after.at(id);
        last_round_mape_[id] = mapes.at(id);
    }

    if (cfg_.mie_variant != MieVariant::none) {
        const int total = static_cast<int>(living.size());
        for (int id : living) {
            const EmScore& s = em.of(id);
            Bindings b{{"total", std::to_string(total)}, {"rank", std::to_string(s.rank)}};
            PromptId pid = PromptId::mie_rank_top_ave;
            if (cfg_.mie_variant == MieVariant::rank_top) {
                pid = PromptId::mie_rank_top;
                b["top_value"] = format_percent(em.best_mape);
            } else if (cfg_.mie_variant == MieVariant::rank_ave) {
                pid = PromptId::mie_rank_ave;
                b["ave_value"] = format_percent(em.mean_mape);
            } else {
                b["top_value"] = format_percent(em.best_mape);
                b["average_value"] = format_percent(em.mean_mape);
            }
            ledger_.append("mie_notice",
                           nlohmann::json{{"variant", std::string(mie_variant_name(cfg_.mie_variant))},
                                          {"text", render(pid, b)}},
                           {epoch, round, id});
        }
    }

    // Stage 4: information-asymmetric publication and routing.
    const int total_living = static_cast<int>(living.size());
    std::vector<DisclosureMessage> messages;
    for (int id : living) {
        Agent& a = agent_ref(id);
        std::vector<std::string> warnings;
        DisclosureMessage msg = publish(a, em.of(id), total_living, living, *gateway_,
                                        cfg_.prompt_variant, {epoch, round, id}, &warnings);
        for (const std::string& w : warnings) ledger_.warn(w, {epoch, round, id});
        messages.push_back(std::move(msg));
    }
    std::vector<std::string> route_warnings;
    const Inboxes inboxes = route(messages, living, &route_warnings);
    for (const std::string& w : route_warnings) ledger_.warn(w, {epoch, round, -1});

    for (const DisclosureMessage& m : messages) {
        std::vector<int> receivers;
        if (m.broadcast) {
            for (int id : living) {
                if (id != m.sender) receivers.push_back(id);
            }
        } else {
            receivers = m.targets;
        }
        PublicationRecord rec;
        rec.epoch = epoch;
        rec.round = round;
        rec.broadcast = m.broadcast;
        rec.targets = receivers;
        rec.authentic = m.authentic;
        rec.published_text = m.body;
        agent_ref(m.sender).publication_log.push_back(rec);
        ledger_.append("publication",
                       nlohmann::json{{"broadcast", m.broadcast},
                                      {"targets_declared", m.targets},
                                      {"receivers", receivers},
                                      {"authentic", m.authentic},
                                      {"body", m.body},
                                      {"declared_real", m.declared_real},
                                      {"declared_false", m.declared_false}},
                       {epoch, round, m.sender});
    }

    // Stage 5: opponent-oriented self-reflection with ablation-tested deltas.
    static const std::vector<InboxItem> kEmptyInbox;
    for (int id : living) {
        Agent& a = agent_ref(id);
        const RunLedger::Coords coords{epoch, round, id};
        const auto inbox_it = inboxes.find(id);
        const std::vector<InboxItem>& inbox =
            inbox_it == inboxes.end() ? kEmptyInbox : inbox_it->second;

        const LogicDocument previous = a.logic;
        const LogicDocument candidate = stage1_update(a, inbox, em.of(id), total_living, *gateway_,
                                                      cfg_.prompt_variant, coords);
        std::vector<Delta> deltas = diff_logic(candidate, previous);

        // Seeded per-(epoch, round, agent) window sample; both sides of every
        // ablation pair see the same windows.
        std::vector<int> pool = batch.window_ids;
        std::mt19937_64 rng(derive_seed(cfg_.seed, {0x3152ull, static_cast<std::uint64_t>(epoch),
                                                    static_cast<std::uint64_t>(round),
                                                    static_cast<std::uint64_t>(id)}));
        seeded_shuffle(pool, rng);
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(cfg_.msr_sample),
                                                    pool.size());
        std::vector<Window> eval_windows;
        std::vector<int> eval_ids;
        for (std::size_t i = 0; i < k; ++i) {
            eval_windows.push_back(window_by_id(pool[i]));
            eval_ids.push_back(pool[i]);
        }

        deltas = classify_deltas(candidate, std::move(deltas), eval_windows, *predictor_, news_,
                                 cfg_.lookback_days);

        TrendContext trend;
        {
            const Window& w = eval_windows.front();
            trend.background = "Region " + w.meta.region + ", predicting from " +
                               format_iso_date(w.prediction_date()) + ".";
            std::vector<std::string> hist;
            for (double v : w.history) hist.push_back(format_sig3(v));
            trend.history_series = join(hist, ",");
            trend.actual_value = format_sig3(w.target.front());
            std::vector<std::string> related;
            for (const NewsItem* n : candidate_news(w, news_, cfg_.lookback_days)) {
                related.push_back(n->text);
                if (related.size() >= 3) break;
            }
            trend.related_news = related.empty() ? "(none)" : join(related, " | ");
        }

        const ReflectionOutcome outcome = stage3_finalize(candidate, deltas, trend, gateway_.get(),
                                                          cfg_.keep_epsilon, coords);

        auto delta_rows = nlohmann::json::array();
        for (const Delta& d : outcome.deltas) {
            delta_rows.push_back(nlohmann::json{
                {"clause", d.clause},
                {"ir_with", d.ir_with},
                {"ir_without", d.ir_without},
                {"label", d.classification == DeltaClass::good ? "good" : "bad"},
            });
        }
        auto removed_rows = nlohmann::json::array();
        for (const Delta& d : outcome.removed) removed_rows.push_back(d.clause);
        ledger_.append("reflection",
                       nlohmann::json{{"candidate_version", candidate.version},
                                      {"eval_windows", eval_ids},
                                      {"deltas", std::move(delta_rows)},
                                      {"removed", std::move(removed_rows)},
                                      {"final_clauses", outcome.final_logic.clauses}},
                       coords);

        const double round_lud = lud(logic_text(previous), logic_text(outcome.final_logic),
                                     *embedder_);
        ledger_.append("lud_round", nlohmann::json{{"value", round_lud}}, coords);

        a.logic = outcome.final_logic;
        ledger_.append("logic_adopted",
                       nlohmann::json{{"version", a.logic.version},
                                      {"provenance", "reflected"},
                                      {"clauses", a.logic.clauses}},
                       coords);
    }

    ledger_.append("round_complete", nlohmann::json::object(), {epoch, round, -1});
}

double Orchestrator::evaluate_split(int epoch, std::span<const Window> windows,
                                    std::string_view phase, std::vector<Forecast>* collected) {
    const std::vector<int> living = living_ids();
    double total = 0.0;
    std::size_t counted = 0;
    for (const Window& w : windows) {
        std::map<int, Forecast> forecasts;
        std::map<int, double> scores;
        for (int id : living) {
            Agent& a = agent_ref(id);
            const RunLedger::Coords coords{epoch, 0, id};
            std::vector<std::string> warnings;
            SelectedNews sel = select_news(a.logic, w, news_, *gateway_, cfg_.lookback_days, coords,
                                           &warnings);
            for (const std::string& msg : warnings) ledger_.warn(msg, coords);
            Forecast f = predictor_->predict(w, sel, news_);
            f.agent_id = id;
            if (collected) collected->push_back(f);
            forecasts[id] = std::move(f);
            scores[id] = a.cumulative_score;
        }
        Forecast ensemble = aggregate(forecasts, scores);
        total += compute_errors(w.target, ensemble.values).mape;
        ++counted;
        if (collected) {
            ledger_.append(std::string(phase) + "_forecast",
                           nlohmann::json{{"window", w.id}, {"values", ensemble.values}},
                           {epoch, 0, -1});
            collected->push_back(std::move(ensemble));
        }
    }
    return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

bool Orchestrator::epoch_boundary(int epoch) {
    const std::vector<int> living = living_ids();

    // Epoch-boundary novelty: LUD against the previous epoch-end logic.
    if (epoch >= 2) {
        for (int id : living) {
            auto it = epoch_end_logic_text_.find(id);
            if (it == epoch_end_logic_text_.end()) continue;
            const double v = lud(it->second, logic_text(agent_ref(id).logic), *embedder_);
            ledger_.append("lud_epoch", nlohmann::json{{"value", v}}, {epoch, 0, id});
        }
    }
    if (living.size() >= 2) {
        std::vector<EmbeddingVector> vectors;
        for (int id : living) {
            vectors.push_back(embed(*embedder_, logic_text(agent_ref(id).logic), &ledger_,
                                    {epoch, 0, id}));
        }
        ledger_.append("epoch_similarity",
                       nlohmann::json{{"value", mean_pairwise_similarity(vectors)},
                                      {"agents", living}},
                       {epoch, 0, -1});
    }

    epoch_end_logic_text_.clear();
    for (int id : living) epoch_end_logic_text_[id] = logic_text(agent_ref(id).logic);

    // Survival of the fittest fires between epochs, never after the final one:
    // the last population advances intact to group decision-making.
    if (epoch < cfg_.epochs) {
        std::vector<SfCandidate> candidates;
        for (int id : living) {
            candidates.push_back(SfCandidate{id, agent_ref(id).cumulative_score,
                                             last_round_mape_.count(id) ? last_round_mape_[id] : 0.0});
        }
        std::optional<int> override_count;
        if (static_cast<std::size_t>(epoch) <= cfg_.elimination_overrides.size() &&
            cfg_.elimination_overrides[static_cast<std::size_t>(epoch - 1)] >= 0) {
            override_count = cfg_.elimination_overrides[static_cast<std::size_t>(epoch - 1)];
        }
        const SfOutcome sf = apply_sf(candidates, cfg_.alpha, override_count);
        for (int id : sf.eliminated) agent_ref(id).alive = false;
        ledger_.append("sf",
                       nlohmann::json{{"eliminated", sf.eliminated},
                                      {"survivors", sf.survivors},
                                      {"population_before", candidates.size()},
                                      {"population_after", sf.survivors.size()}},
                       {epoch, 0, -1});
    }

    const double val_mape = evaluate_split(epoch, split_.valid, "validation", nullptr);
    validation_history_.push_back(val_mape);
    ledger_.append("validation",
                   nlohmann::json{{"ensemble_mape", val_mape}, {"windows", split_.valid.size()}},
                   {epoch, 0, -1});

    bool stop = false;
    std::string reason;
    if (epoch < cfg_.epochs) {
        if (living_ids().size() < 2) {
            stop = true;
            reason = "population below 2";
        } else if (!split_.valid.empty() &&
                   check_termination(validation_history_, cfg_.termination_epsilon)) {
            stop = true;
            reason = "validation improvement below epsilon";
        }
    }
    if (stop) {
        ledger_.append("termination", nlohmann::json{{"reason", reason}}, {epoch, 0, -1});
    }
    ledger_.append("epoch_complete", nlohmann::json::object(), {epoch, 0, -1});
    return stop;
}

RunResult Orchestrator::run(bool resume) {
    validate_config(cfg_);

    const std::filesystem::path out_dir(cfg_.out_dir);
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path ledger_path = out_dir / "ledger.jsonl";

    int start_epoch = 1;
    int start_round = 1;
    int epochs_done = 0;
    bool stopped_early = false;

    ReplayResult state;
    const bool resuming = resume && std::filesystem::exists(ledger_path) &&
                          (state = replay_ledger(ledger_path)).has_barrier;
    if (resuming) {
        if (state.run_complete) throw ConfigInvalid("ledger already records a completed run");
        ledger_ = RunLedger::resume(ledger_path, state.resume_offset, state.next_seq);
        load_data(false);
        build_backends();
        agents_ = state.agents;
        validation_history_ = state.validation_history;
        epoch_end_logic_text_ = state.epoch_end_logic_text;
        epochs_done = state.completed_epochs;
        stopped_early = state.terminated;
        if (!state.setup_complete) {
            init_population();
            generate_initial_logics();
        } else if (state.last_epoch > state.completed_epochs) {
            start_epoch = state.last_epoch;
            start_round = state.last_round + 1;
        } else {
            start_epoch = state.completed_epochs + 1;
        }
    } else {
        ledger_ = RunLedger::create(ledger_path);
        ledger_.append("run_config", nlohmann::json{{"config", config_to_json(cfg_)}});
        load_data(true);
        build_backends();
        init_population();
        generate_initial_logics();
    }

    RunResult result;
    result.ledger_path = ledger_path;

    for (int epoch = start_epoch; epoch <= cfg_.epochs && !stopped_early; ++epoch) {
        const std::vector<RoundBatch> batches =
            split_rounds(split_.train, cfg_.rounds,
                         derive_seed(cfg_.seed, {0xba7c4ull, static_cast<std::uint64_t>(epoch)}));
        const int first_round = epoch == start_epoch ? start_round : 1;
        for (int round = first_round; round <= cfg_.rounds; ++round) {
            run_round(epoch, round, batches[static_cast<std::size_t>(round - 1)]);
        }
        stopped_early = epoch_boundary(epoch);
        epochs_done = epoch;
    }
    result.epochs_run = epochs_done;
    result.terminated_early = stopped_early;

    // Final group decision: cumulative-score weighted ensemble on the test
    // split, exported for downstream scoring.
    test_forecasts_.clear();
    const double test_mape = evaluate_split(epochs_done, split_.test, "test", &test_forecasts_);
    result.test_ensemble_mape = test_mape;
    ledger_.append("test_summary",
                   nlohmann::json{{"ensemble_mape", test_mape}, {"windows", split_.test.size()}},
                   {epochs_done, 0, -1});

    const std::filesystem::path forecasts_path = out_dir / "forecasts.csv";
    export_forecasts_csv(forecasts_path, test_forecasts_);
    result.forecasts_path = forecasts_path;
    result.final_population = living_ids();

    ledger_.append("run_complete", nlohmann::json::object(), {epochs_done, 0, -1});
    return result;
}

}  // namespace arena
