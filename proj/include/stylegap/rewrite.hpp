#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stylegap::rewrite {

struct ProviderConfig {
    std::string name;         // unique within a run
    std::string kind;         // mock | anthropic | gemini | mistral | openai
    std::string model;        // provider-side model identifier
    std::string base_url;     // optional endpoint override
    std::string api_key_env;  // environment variable holding the credential
    double timeout_s = 120.0;
    int max_attempts = 3;
};

enum class RewriteStatus { Ok, Refused, Failed };

std::string_view to_string(RewriteStatus status);
std::optional<RewriteStatus> status_from_string(std::string_view s);

struct RewriteResult {
    std::string record_id;
    std::string provider;
    std::string text;
    RewriteStatus status = RewriteStatus::Failed;
    std::string fingerprint;  // hash of (provider name, model, prompt)
    int attempts = 0;
    bool from_cache = false;
    std::string error;
};

// The fixed rewrite instruction wrapped around each abstract; the abstract
// is appended verbatim. Throws on an empty abstract.
std::string build_prompt(std::string_view abstract);

std::string request_fingerprint(const ProviderConfig& provider, std::string_view prompt);

// Transient failures are retried; permanent ones abort the attempt loop.
class TransientProviderError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class PermanentProviderError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class CredentialError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Wire-level hook so tests can fake the network. Receives the fully built
// request body; returns (status, body). Status 0 means a network failure.
struct HttpResponse {
    int status = 0;
    std::string body;
};
using Transport = std::function<HttpResponse(const ProviderConfig& provider,
                                             const std::string& path,
                                             const std::string& request_body)>;

class Provider {
public:
    virtual ~Provider() = default;
    virtual const ProviderConfig& config() const = 0;
    // One attempt; returns the rewritten text or throws a provider error.
    virtual std::string rewrite_once(const std::string& prompt) = 0;
};

// Builds the adapter for config.kind. Live kinds check the credential
// variable up front (CredentialError names it); mock needs none. A null
// transport means real HTTP.
std::unique_ptr<Provider> make_provider(const ProviderConfig& config, Transport transport = {});

// The offline provider: deterministic paraphrase that reverses sentence
// order and preserves every word.
std::string mock_rewrite(std::string_view abstract);

// One JSON file per fingerprint under the cache directory; writes are
// atomic. Only ok/refused results are stored, so failed pairs re-request.
class Cache {
public:
    explicit Cache(std::filesystem::path dir);
    std::optional<RewriteResult> get(const std::string& fingerprint) const;
    void put(const RewriteResult& result) const;
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

struct RetryPolicy {
    int max_attempts = 3;
    double base_delay_s = 0.5;   // doubled per attempt, +-50% jitter
    double max_delay_s = 8.0;
    std::uint64_t jitter_seed = 0;
};

struct RewriteOptions {
    RetryPolicy retry;
    std::vector<std::string> refusal_phrases;  // matched case-insensitively near the start
    int max_in_flight = 4;                     // per provider
};

RewriteResult rewrite_abstract(Provider& provider, const std::string& record_id,
                               std::string_view abstract, const Cache* cache,
                               const RewriteOptions& options);

struct CorpusDocument {
    std::string record_id;
    std::string abstract;
};

// Every (record, provider) pair attempted once; per-pair failures recorded,
// never propagated across providers. Results ordered provider-major by
// input order.
std::vector<RewriteResult> rewrite_corpus(const std::vector<std::unique_ptr<Provider>>& providers,
                                          const std::vector<CorpusDocument>& corpus,
                                          const Cache* cache, const RewriteOptions& options);

}  // namespace stylegap::rewrite
