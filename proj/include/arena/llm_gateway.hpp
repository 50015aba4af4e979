#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "arena/ledger.hpp"
#include "arena/prompt_catalog.hpp"

namespace arena {

enum class ExpectedFormat { free_text, json };

struct ChatRequest {
    std::string system;
    std::string user;
    double temperature = 0.5;
    int top_k = 20;
    double top_p = 0.8;
    ExpectedFormat expected_format = ExpectedFormat::free_text;
    // Call metadata: which template produced `user` and for whom. Scripted
    // backends key on these; the ledger records them.
    std::string template_name;
    std::string selector;
    Bindings bindings;
};

struct ChatResponse {
    std::string text;
    std::string backend_id;
    long latency_ms = 0;
    long prompt_tokens = 0;
    long completion_tokens = 0;
};

class LlmBackend {
  public:
    virtual ~LlmBackend() = default;
    virtual ChatResponse complete(const ChatRequest& request) = 0;
    virtual std::string id() const = 0;
};

// Deterministic lookup backend. Resolution order: exact (template, selector),
// then (template, "*"), then the default handler. Lookup miss raises
// BackendUnavailable so misconfigured scripts fail loudly.
class ScriptedLlm : public LlmBackend {
  public:
    using Handler = std::function<std::string(const ChatRequest&)>;

    void add_response(std::string_view template_name, std::string_view selector,
                      std::string_view text);
    void set_default_handler(Handler handler);

    // JSON file: [{"template": "...", "selector": "...", "response": "..."}]
    static ScriptedLlm from_file(const std::filesystem::path& path);

    ChatResponse complete(const ChatRequest& request) override;
    std::string id() const override { return "scripted"; }

  private:
    std::map<std::string, std::string> table_;
    Handler default_handler_;
};

struct HttpLlmConfig {
    std::string base_url;  // e.g. http://host:port/v1
    std::string api_key;
    std::string model = "default";
    int timeout_ms = 30000;
    bool send_top_k = true;
};

// OpenAI-style chat-completions client. base_url/api_key fall back to the
// ARENA_LLM_BASE_URL / ARENA_LLM_API_KEY environment variables.
class HttpLlm : public LlmBackend {
  public:
    explicit HttpLlm(HttpLlmConfig config);
    static HttpLlmConfig config_from_env();

    ChatResponse complete(const ChatRequest& request) override;
    std::string id() const override { return "http:" + config_.model; }

  private:
    HttpLlmConfig config_;
};

struct RetryPolicy {
    int max_retries = 3;       // additional attempts after the first
    int base_delay_ms = 200;   // doubled per retry; 0 disables sleeping
};

// Front door for all text-model calls: persists the outbound prompt before
// the response is awaited, retries transient failures with exponential
// backoff, and enforces JSON-mode replies (one repair re-prompt, then
// MalformedJson).
class LlmGateway {
  public:
    LlmGateway(std::shared_ptr<LlmBackend> backend, RetryPolicy retry = {},
               RunLedger* ledger = nullptr);

    ChatResponse complete(ChatRequest request, RunLedger::Coords coords = {});

    LlmBackend& backend() { return *backend_; }
    void set_ledger(RunLedger* ledger) { ledger_ = ledger; }

  private:
    std::shared_ptr<LlmBackend> backend_;
    RetryPolicy retry_;
    RunLedger* ledger_ = nullptr;
};

}  // namespace arena
