#include "arena/llm_gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "arena/errors.hpp"
#include "arena/util.hpp"

namespace arena {

namespace {

std::string table_key(std::string_view template_name, std::string_view selector) {
    std::string k(template_name);
    k.push_back('\x1f');
    k += selector;
    return k;
}

}  // namespace

// --- ScriptedLlm --------------------------------------------------------------

void ScriptedLlm::add_response(std::string_view template_name, std::string_view selector,
                               std::string_view text) {
    table_[table_key(template_name, selector)] = std::string(text);
}

void ScriptedLlm::set_default_handler(Handler handler) { default_handler_ = std::move(handler); }

ScriptedLlm ScriptedLlm::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataUnloadable("cannot open scripted responses: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_array()) {
        throw ConfigInvalid("scripted response file must be a JSON array of entries");
    }
    ScriptedLlm s;
    for (const auto& e : j) {
        if (!e.is_object() || !e.contains("template") || !e.contains("response")) {
            throw ConfigInvalid("scripted entry needs 'template' and 'response' keys");
        }
        // Unknown template names are rejected up front.
        catalog_require(e["template"].get<std::string>());
        const std::string selector = e.value("selector", std::string("*"));
        s.add_response(e["template"].get<std::string>(), selector, e["response"].get<std::string>());
    }
    return s;
}

ChatResponse ScriptedLlm::complete(const ChatRequest& request) {
    std::string text;
    auto it = table_.find(table_key(request.template_name, request.selector));
    if (it == table_.end()) it = table_.find(table_key(request.template_name, "*"));
    if (it != table_.end()) {
        text = it->second;
    } else if (default_handler_) {
        text = default_handler_(request);
    } else {
        throw BackendUnavailable("no scripted response for template '" + request.template_name +
                                 "' selector '" + request.selector + "'");
    }
    ChatResponse r;
    r.text = std::move(text);
    r.backend_id = id();
    r.latency_ms = 0;
    r.prompt_tokens = static_cast<long>(approx_token_count(request.user));
    r.completion_tokens = static_cast<long>(approx_token_count(r.text));
    return r;
}

// --- HttpLlm ------------------------------------------------------------------

HttpLlm::HttpLlm(HttpLlmConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) {
        throw ConfigInvalid("http llm backend needs a base url (ARENA_LLM_BASE_URL)");
    }
}

HttpLlmConfig HttpLlm::config_from_env() {
    HttpLlmConfig c;
    if (const char* v = std::getenv("ARENA_LLM_BASE_URL")) c.base_url = v;
    if (const char* v = std::getenv("ARENA_LLM_API_KEY")) c.api_key = v;
    if (const char* v = std::getenv("ARENA_LLM_MODEL")) c.model = v;
    return c;
}

namespace {

// Splits "http://host:port/prefix" into client origin and path prefix.
std::pair<std::string, std::string> split_origin(const std::string& base_url) {
    std::string::size_type scheme = base_url.find("://");
    std::string::size_type path_start =
        scheme == std::string::npos ? base_url.find('/') : base_url.find('/', scheme + 3);
    if (path_start == std::string::npos) return {base_url, ""};
    std::string prefix = base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {base_url.substr(0, path_start), prefix};
}

}  // namespace

ChatResponse HttpLlm::complete(const ChatRequest& request) {
    const auto [origin, prefix] = split_origin(config_.base_url);
    httplib::Client client(origin);
    client.set_connection_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
    client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);

    nlohmann::json body{
        {"model", config_.model},
        {"temperature", request.temperature},
        {"top_p", request.top_p},
    };
    if (config_.send_top_k && request.top_k > 0) body["top_k"] = request.top_k;
    nlohmann::json messages = nlohmann::json::array();
    if (!request.system.empty()) {
        messages.push_back({{"role", "system"}, {"content", request.system}});
    }
    messages.push_back({{"role", "user"}, {"content", request.user}});
    body["messages"] = std::move(messages);

    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    const auto t0 = std::chrono::steady_clock::now();
    httplib::Result res =
        client.Post(prefix + "/chat/completions", headers, body.dump(), "application/json");
    const auto t1 = std::chrono::steady_clock::now();

    if (!res) {
        if (res.error() == httplib::Error::ConnectionTimeout ||
            res.error() == httplib::Error::Read) {
            throw Timeout("llm request timed out (" + httplib::to_string(res.error()) + ")");
        }
        throw BackendUnavailable("llm endpoint unreachable: " + httplib::to_string(res.error()));
    }
    if (res->status == 429) throw RateLimited("llm endpoint returned 429");
    if (res->status >= 500) {
        throw BackendUnavailable("llm endpoint returned " + std::to_string(res->status));
    }
    if (res->status != 200) {
        throw Error("llm endpoint returned " + std::to_string(res->status) + ": " + res->body);
    }

    nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) {
        throw BackendUnavailable("llm endpoint returned an unexpected payload");
    }
    ChatResponse r;
    r.text = j["choices"][0]["message"]["content"].get<std::string>();
    r.backend_id = id();
    r.latency_ms = static_cast<long>(
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
    if (j.contains("usage")) {
        r.prompt_tokens = j["usage"].value("prompt_tokens", 0);
        r.completion_tokens = j["usage"].value("completion_tokens", 0);
    }
    return r;
}

// --- LlmGateway ----------------------------------------------------------------

LlmGateway::LlmGateway(std::shared_ptr<LlmBackend> backend, RetryPolicy retry, RunLedger* ledger)
    : backend_(std::move(backend)), retry_(retry), ledger_(ledger) {}

ChatResponse LlmGateway::complete(ChatRequest request, RunLedger::Coords coords) {
    bool repaired = false;
    int attempt = 0;
    for (;;) {
        if (ledger_) {
            ledger_->append("llm_request",
                            nlohmann::json{
                                {"template", request.template_name},
                                {"selector", request.selector},
                                {"attempt", attempt},
                                {"expected_format",
                                 request.expected_format == ExpectedFormat::json ? "json" : "free"},
                                {"system", request.system},
                                {"user", request.user},
                                {"temperature", request.temperature},
                                {"top_k", request.top_k},
                                {"top_p", request.top_p},
                            },
                            coords);
        }
        ChatResponse resp;
        try {
            resp = backend_->complete(request);
        } catch (const Timeout& e) {
            if (attempt >= retry_.max_retries) throw;
            if (ledger_) ledger_->warn(std::string("retrying after timeout: ") + e.what(), coords);
            if (retry_.base_delay_ms > 0) {
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(retry_.base_delay_ms << attempt));
            }
            ++attempt;
            continue;
        } catch (const RateLimited& e) {
            if (attempt >= retry_.max_retries) throw;
            if (ledger_) ledger_->warn(std::string("retrying after 429: ") + e.what(), coords);
            if (retry_.base_delay_ms > 0) {
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(retry_.base_delay_ms << attempt));
            }
            ++attempt;
            continue;
        } catch (const BackendUnavailable& e) {
            if (attempt >= retry_.max_retries) throw;
            if (ledger_) {
                ledger_->warn(std::string("retrying after backend error: ") + e.what(), coords);
            }
            if (retry_.base_delay_ms > 0) {
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(retry_.base_delay_ms << attempt));
            }
            ++attempt;
            continue;
        }

        if (request.expected_format == ExpectedFormat::json && !extract_json(resp.text)) {
            if (!repaired) {
                repaired = true;
                request.user += "\n\nReturn valid JSON only.";
                if (ledger_) ledger_->warn("json repair re-prompt issued", coords);
                continue;
            }
            if (ledger_) {
                ledger_->append("llm_response",
                                nlohmann::json{{"text", resp.text},
                                               {"backend", resp.backend_id},
                                               {"status", "malformed_json"}},
                                coords);
            }
            throw MalformedJson("reply to template '" + request.template_name +
                                "' is not valid JSON after repair");
        }

        if (ledger_) {
            ledger_->append("llm_response",
                            nlohmann::json{
                                {"text", resp.text},
                                {"backend", resp.backend_id},
                                {"latency_ms", resp.latency_ms},
                                {"prompt_tokens", resp.prompt_tokens},
                                {"completion_tokens", resp.completion_tokens},
                                {"status", "ok"},
                            },
                            coords);
        }
        return resp;
    }
}

}  // namespace arena
