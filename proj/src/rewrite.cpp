#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "stylegap/rewrite.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "stylegap/util.hpp"

namespace stylegap::rewrite {

namespace {

constexpr std::string_view kPromptHeader =
    "Given the scientific abstract, imagine yourself to be an author and researcher, "
    "and rewrite this abstract.\nThe abstract is : ";

// How far into the reply a refusal phrase may start and still count.
constexpr std::size_t kRefusalWindow = 160;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())) != 0) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())) != 0) {
        s.remove_suffix(1);
    }
    return s;
}

bool is_refusal(std::string_view text, const std::vector<std::string>& phrases) {
    const std::string_view trimmed = trim(text);
    if (trimmed.empty()) {
        return true;
    }
    if (phrases.empty()) {
        return false;
    }
    const std::string head = to_lower_ascii(
        trimmed.substr(0, std::min(trimmed.size(), kRefusalWindow + 64)));
    for (const auto& phrase : phrases) {
        const std::string needle = to_lower_ascii(phrase);
        if (needle.empty()) {
            continue;
        }
        const std::size_t pos = head.find(needle);
        if (pos != std::string::npos && pos <= kRefusalWindow) {
            return true;
        }
    }
    return false;
}

std::string require_api_key(const ProviderConfig& config) {
    if (config.api_key_env.empty()) {
        throw CredentialError("provider '" + config.name +
                              "' has no api_key_env configured");
    }
    const char* value = std::getenv(config.api_key_env.c_str());
    if (value == nullptr || *value == '\0') {
        throw CredentialError("environment variable " + config.api_key_env +
                              " is not set (needed by provider '" + config.name + "')");
    }
    return value;
}

[[noreturn]] void throw_for_status(const ProviderConfig& config, int status,
                                   const std::string& body) {
    const std::string detail =
        "provider '" + config.name + "' returned HTTP " + std::to_string(status) +
        (body.empty() ? "" : ": " + body.substr(0, 200));
    if (status == 0) {
        throw TransientProviderError("provider '" + config.name +
                                     "': network failure (no HTTP response)");
    }
    if (status == 429 || status >= 500) {
        throw TransientProviderError(detail);
    }
    if (status == 401 || status == 403) {
        throw PermanentProviderError(detail + " (check " + config.api_key_env + ")");
    }
    throw PermanentProviderError(detail);
}

std::string text_or_throw(const ProviderConfig& config, const nlohmann::json& node,
                          const char* where) {
    if (!node.is_string()) {
        throw TransientProviderError("provider '" + config.name +
                                     "': response is missing " + where);
    }
    return node.get<std::string>();
}

nlohmann::json parse_body(const ProviderConfig& config, const std::string& body) {
    try {
        return nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error&) {
        throw TransientProviderError("provider '" + config.name +
                                     "': response body is not valid JSON");
    }
}

class MockProvider final : public Provider {
public:
    explicit MockProvider(ProviderConfig config) : config_(std::move(config)) {}

    const ProviderConfig& config() const override { return config_; }

    std::string rewrite_once(const std::string& prompt) override {
        const std::size_t marker = prompt.rfind("The abstract is : ");
        const std::string_view abstract =
            marker == std::string::npos
                ? std::string_view(prompt)
                : std::string_view(prompt).substr(marker + std::string_view("The abstract is : ").size());
        return mock_rewrite(abstract);
    }

private:
    ProviderConfig config_;
};

// Shared plumbing for the wire-level adapters: builds the request, sends it
// through the transport (or real HTTP), and maps status codes to errors.
class HttpProvider : public Provider {
public:
    HttpProvider(ProviderConfig config, Transport transport, std::string default_base)
        : config_(std::move(config)),
          transport_(std::move(transport)),
          api_key_(require_api_key(config_)) {
        if (config_.base_url.empty()) {
            config_.base_url = std::move(default_base);
        }
        while (!config_.base_url.empty() && config_.base_url.back() == '/') {
            config_.base_url.pop_back();
        }
    }

    const ProviderConfig& config() const override { return config_; }

    std::string rewrite_once(const std::string& prompt) override {
        const std::string path = request_path();
        const std::string body = request_body(prompt);
        HttpResponse response;
        if (transport_) {
            response = transport_(config_, path, body);
        } else {
            response = send(path, body);
        }
        if (response.status < 200 || response.status >= 300) {
            throw_for_status(config_, response.status, response.body);
        }
        return parse_response(parse_body(config_, response.body));
    }

protected:
    virtual std::string request_path() const = 0;
    virtual std::string request_body(const std::string& prompt) const = 0;
    virtual std::string parse_response(const nlohmann::json& doc) const = 0;
    virtual httplib::Headers request_headers() const = 0;

    const ProviderConfig& cfg() const { return config_; }
    const std::string& api_key() const { return api_key_; }

private:
    HttpResponse send(const std::string& path, const std::string& body) const {
        httplib::Client client(config_.base_url);
        const auto timeout = std::chrono::duration<double>(config_.timeout_s);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        auto result = client.Post(path, request_headers(), body, "application/json");
        if (!result) {
            return {0, httplib::to_string(result.error())};
        }
        return {result->status, result->body};
    }

    ProviderConfig config_;
    Transport transport_;
    std::string api_key_;
};

class AnthropicProvider final : public HttpProvider {
public:
    AnthropicProvider(ProviderConfig config, Transport transport)
        : HttpProvider(std::move(config), std::move(transport), "https://api.anthropic.com") {}

protected:
    std::string request_path() const override { return "/v1/messages"; }

    std::string request_body(const std::string& prompt) const override {
        nlohmann::ordered_json body;
        body["model"] = cfg().model;
        body["max_tokens"] = 4096;
        body["messages"] = nlohmann::json::array(
            {nlohmann::ordered_json{{"role", "user"}, {"content", prompt}}});
        return body.dump();
    }

    std::string parse_response(const nlohmann::json& doc) const override {
        if (!doc.contains("content") || !doc["content"].is_array() || doc["content"].empty()) {
            throw TransientProviderError("provider '" + cfg().name +
                                         "': response is missing content blocks");
        }
        return text_or_throw(cfg(), doc["content"][0]["text"], "content[0].text");
    }

    httplib::Headers request_headers() const override {
        return {{"x-api-key", api_key()}, {"anthropic-version", "2023-06-01"}};
    }
};

// OpenAI-compatible chat completions; Mistral uses the same wire shape.
class ChatCompletionsProvider final : public HttpProvider {
public:
    ChatCompletionsProvider(ProviderConfig config, Transport transport, std::string default_base)
        : HttpProvider(std::move(config), std::move(transport), std::move(default_base)) {}

protected:
    std::string request_path() const override { return "/v1/chat/completions"; }

    std::string request_body(const std::string& prompt) const override {
        nlohmann::ordered_json body;
        body["model"] = cfg().model;
        body["messages"] = nlohmann::json::array(
            {nlohmann::ordered_json{{"role", "user"}, {"content", prompt}}});
        return body.dump();
    }

    std::string parse_response(const nlohmann::json& doc) const override {
        if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
            throw TransientProviderError("provider '" + cfg().name +
                                         "': response is missing choices");
        }
        return text_or_throw(cfg(), doc["choices"][0]["message"]["content"],
                             "choices[0].message.content");
    }

    httplib::Headers request_headers() const override {
        return {{"Authorization", "Bearer " + api_key()}};
    }
};

class GeminiProvider final : public HttpProvider {
public:
    GeminiProvider(ProviderConfig config, Transport transport)
        : HttpProvider(std::move(config), std::move(transport),
                       "https://generativelanguage.googleapis.com") {}

protected:
    std::string request_path() const override {
        return "/v1beta/models/" + cfg().model + ":generateContent";
    }

    std::string request_body(const std::string& prompt) const override {
        nlohmann::ordered_json body;
        body["contents"] = nlohmann::json::array({nlohmann::ordered_json{
            {"parts", nlohmann::json::array({nlohmann::ordered_json{{"text", prompt}}})}}});
        return body.dump();
    }

    std::string parse_response(const nlohmann::json& doc) const override {
        if (!doc.contains("candidates") || !doc["candidates"].is_array() ||
            doc["candidates"].empty()) {
            throw TransientProviderError("provider '" + cfg().name +
                                         "': response is missing candidates");
        }
        return text_or_throw(cfg(), doc["candidates"][0]["content"]["parts"][0]["text"],
                             "candidates[0].content.parts[0].text");
    }

    httplib::Headers request_headers() const override {
        return {{"x-goog-api-key", api_key()}};
    }
};

double backoff_delay_s(const RetryPolicy& policy, int attempt, std::uint64_t salt) {
    double delay = policy.base_delay_s;
    for (int i = 1; i < attempt; ++i) {
        delay *= 2.0;
    }
    delay = std::min(delay, policy.max_delay_s);
    if (delay <= 0.0) {
        return 0.0;
    }
    std::mt19937_64 rng(policy.jitter_seed ^ salt ^ static_cast<std::uint64_t>(attempt));
    std::uniform_real_distribution<double> jitter(0.5, 1.5);
    return delay * jitter(rng);
}

}  // namespace

std::string_view to_string(RewriteStatus status) {
    switch (status) {
        case RewriteStatus::Ok:
            return "ok";
        case RewriteStatus::Refused:
            return "refused";
        case RewriteStatus::Failed:
            return "failed";
    }
    return "failed";
}

std::optional<RewriteStatus> status_from_string(std::string_view s) {
    if (s == "ok") {
        return RewriteStatus::Ok;
    }
    if (s == "refused") {
        return RewriteStatus::Refused;
    }
    if (s == "failed") {
        return RewriteStatus::Failed;
    }
    return std::nullopt;
}

std::string build_prompt(std::string_view abstract) {
    if (abstract.empty()) {
        throw std::invalid_argument("build_prompt: abstract must not be empty");
    }
    std::string prompt(kPromptHeader);
    prompt += abstract;
    return prompt;
}

std::string request_fingerprint(const ProviderConfig& provider, std::string_view prompt) {
    std::string key = provider.name;
    key.push_back('\n');
    key += provider.model;
    key.push_back('\n');
    key += prompt;
    return hash_hex(key);
}

std::string mock_rewrite(std::string_view abstract) {
    std::vector<std::string> sentences;
    std::string current;
    bool saw_terminator = false;
    for (char c : abstract) {
        current.push_back(c);
        if (c == '.' || c == '!' || c == '?') {
            saw_terminator = true;
            const std::string_view trimmed = trim(current);
            if (!trimmed.empty()) {
                sentences.emplace_back(trimmed);
            }
            current.clear();
        }
    }
    if (const std::string_view tail = trim(current); !tail.empty()) {
        sentences.emplace_back(tail);
    }
    if (!saw_terminator || sentences.size() < 2) {
        return std::string(abstract);
    }
    std::string out;
    for (auto it = sentences.rbegin(); it != sentences.rend(); ++it) {
        if (!out.empty()) {
            out.push_back(' ');
        }
        out += *it;
    }
    return out;
}

std::unique_ptr<Provider> make_provider(const ProviderConfig& config, Transport transport) {
    if (config.kind == "mock") {
        return std::make_unique<MockProvider>(config);
    }
    if (config.kind == "anthropic") {
        return std::make_unique<AnthropicProvider>(config, std::move(transport));
    }
    if (config.kind == "openai") {
        return std::make_unique<ChatCompletionsProvider>(config, std::move(transport),
                                                         "https://api.openai.com");
    }
    if (config.kind == "mistral") {
        return std::make_unique<ChatCompletionsProvider>(config, std::move(transport),
                                                         "https://api.mistral.ai");
    }
    if (config.kind == "gemini") {
        return std::make_unique<GeminiProvider>(config, std::move(transport));
    }
    throw std::invalid_argument("unknown provider kind '" + config.kind + "' for '" +
                                config.name + "'");
}

Cache::Cache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::optional<RewriteResult> Cache::get(const std::string& fingerprint) const {
    const auto path = dir_ / (fingerprint + ".json");
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) {
        return std::nullopt;
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const std::exception&) {
        return std::nullopt;  // unreadable entries behave like misses
    }
    if (!doc.is_object() || !doc.contains("status") || !doc["status"].is_string()) {
        return std::nullopt;
    }
    const auto status = status_from_string(doc["status"].get<std::string>());
    if (!status || *status == RewriteStatus::Failed) {
        return std::nullopt;
    }
    RewriteResult result;
    result.record_id = doc.value("record_id", std::string{});
    result.provider = doc.value("provider", std::string{});
    result.text = doc.value("text", std::string{});
    result.status = *status;
    result.fingerprint = fingerprint;
    result.attempts = doc.value("attempts", 0);
    result.error = doc.value("error", std::string{});
    result.from_cache = true;
    return result;
}

void Cache::put(const RewriteResult& result) const {
    if (result.status == RewriteStatus::Failed) {
        return;
    }
    nlohmann::ordered_json doc;
    doc["record_id"] = result.record_id;
    doc["provider"] = result.provider;
    doc["text"] = result.text;
    doc["status"] = std::string(to_string(result.status));
    doc["attempts"] = result.attempts;
    doc["error"] = result.error;
    atomic_write_file(dir_ / (result.fingerprint + ".json"), doc.dump(2) + "\n");
}

RewriteResult rewrite_abstract(Provider& provider, const std::string& record_id,
                               std::string_view abstract, const Cache* cache,
                               const RewriteOptions& options) {
    RewriteResult result;
    result.record_id = record_id;
    result.provider = provider.config().name;
    if (abstract.empty()) {
        result.error = "empty abstract";
        return result;
    }

    const std::string prompt = build_prompt(abstract);
    result.fingerprint = request_fingerprint(provider.config(), prompt);

    if (cache != nullptr) {
        if (auto hit = cache->get(result.fingerprint)) {
            hit->record_id = record_id;
            hit->provider = provider.config().name;
            return *hit;
        }
    }

    const int max_attempts = std::max(1, options.retry.max_attempts);
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        result.attempts = attempt;
        try {
            result.text = provider.rewrite_once(prompt);
            result.status = is_refusal(result.text, options.refusal_phrases)
                                ? RewriteStatus::Refused
                                : RewriteStatus::Ok;
            result.error.clear();
            if (cache != nullptr) {
                cache->put(result);
            }
            return result;
        } catch (const TransientProviderError& e) {
            result.error = e.what();
            if (attempt < max_attempts) {
                const double delay = backoff_delay_s(options.retry, attempt,
                                                     fnv1a64(result.fingerprint));
                if (delay > 0.0) {
                    std::this_thread::sleep_for(std::chrono::duration<double>(delay));
                }
            }
        } catch (const PermanentProviderError& e) {
            result.error = e.what();
            return result;
        }
    }
    return result;
}

std::vector<RewriteResult> rewrite_corpus(const std::vector<std::unique_ptr<Provider>>& providers,
                                          const std::vector<CorpusDocument>& corpus,
                                          const Cache* cache, const RewriteOptions& options) {
    std::vector<RewriteResult> all;
    all.reserve(providers.size() * corpus.size());
    for (const auto& provider : providers) {
        std::vector<RewriteResult> block(corpus.size());
        const int workers = std::clamp<int>(options.max_in_flight, 1,
                                            static_cast<int>(std::max<std::size_t>(corpus.size(), 1)));
        if (workers <= 1) {
            for (std::size_t i = 0; i < corpus.size(); ++i) {
                block[i] = rewrite_abstract(*provider, corpus[i].record_id, corpus[i].abstract,
                                            cache, options);
            }
        } else {
            std::atomic<std::size_t> next{0};
            std::exception_ptr first_error;
            std::mutex error_mutex;
            auto run = [&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= corpus.size()) {
                        return;
                    }
                    try {
                        block[i] = rewrite_abstract(*provider, corpus[i].record_id,
                                                    corpus[i].abstract, cache, options);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!first_error) {
                            first_error = std::current_exception();
                        }
                        return;
                    }
                }
            };
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(workers));
            for (int w = 0; w < workers; ++w) {
                pool.emplace_back(run);
            }
            for (auto& t : pool) {
                t.join();
            }
            if (first_error) {
                std::rethrow_exception(first_error);
            }
        }
        all.insert(all.end(), std::make_move_iterator(block.begin()),
                   std::make_move_iterator(block.end()));
    }
    return all;
}

}  // namespace stylegap::rewrite
