#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <ostream>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ehc/embedding.hpp"

namespace ehc {

struct CompletionSettings {
    int max_tokens = 512;
    double temperature = 0.0;
};

/// Every LLM call in the agent goes through this interface.
class CompletionBackend {
public:
    virtual ~CompletionBackend() = default;
    virtual std::string complete(std::string_view prompt, int max_tokens, double temperature) = 0;

    std::string complete(std::string_view prompt, const CompletionSettings& s) {
        return complete(prompt, s.max_tokens, s.temperature);
    }
};

// ---------------------------------------------------------------------------
// Scripted backend

enum class MatchKind { prompt_hash, substring, regex };

struct ScriptRule {
    MatchKind match = MatchKind::substring;
    /// Substring, ECMAScript regex, or 16 hex digits of fnv1a64(prompt).
    std::string pattern;
    /// Extra substrings that must all occur in the prompt.
    std::vector<std::string> required;
    /// For regex rules `$1`..`$9` expand to capture groups.
    std::string response;
    std::optional<int> max_uses;
};

/// Ordered rules; first unexhausted match wins, else `default_response`.
///
/// JSON form:
///
///     {"default_response": "...",
///      "rules": [{"match": "substring"|"regex"|"hash", "pattern": "...",
///                 "requires": ["..."], "response": "...", "max_uses": 1}]}
struct Script {
    std::vector<ScriptRule> rules;
    std::string default_response;

    static Script from_json(const nlohmann::json& j);
    static Script load(const std::filesystem::path& path);
};

std::string prompt_hash(std::string_view prompt);

/// Deterministic backend: a pure function of (script, prompt) apart from
/// max_uses bookkeeping. Thread-safe.
class ScriptedBackend final : public CompletionBackend {
public:
    explicit ScriptedBackend(Script script);

    using CompletionBackend::complete;
    std::string complete(std::string_view prompt, int max_tokens, double temperature) override;

    std::size_t calls() const;
    std::vector<std::string> prompts() const;

private:
    Script script_;
    std::vector<std::optional<std::regex>> compiled_;
    mutable std::mutex mutex_;
    std::vector<int> uses_;
    std::vector<std::string> prompts_;
};

// ---------------------------------------------------------------------------
// HTTP backend

struct HttpEndpoint {
    /// Full URL, e.g. http://127.0.0.1:8080/v1/chat/completions
    std::string url;
    std::string model;
    /// Sent as a bearer token when non-empty.
    std::string api_key;
    int retries = 2;
    std::chrono::milliseconds backoff{250};
    std::chrono::seconds timeout{60};
    /// When set, every request/response pair is written here.
    std::ostream* trace = nullptr;
};

/// Reads the credential from EHC_LLM_API_KEY; empty when unset.
std::string api_key_from_env();

/// POSTs `body` as JSON, retrying transport failures, 429 and 5xx with
/// exponential backoff. Returns the parsed 2xx body.
nlohmann::json post_json_with_retry(const HttpEndpoint& endpoint, const nlohmann::json& body);

/// Chat-completion client: sends {model, messages:[{role:"user",...}],
/// max_tokens, temperature} and returns choices[0].message.content.
class HttpBackend final : public CompletionBackend {
public:
    explicit HttpBackend(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

    using CompletionBackend::complete;
    std::string complete(std::string_view prompt, int max_tokens, double temperature) override;

private:
    HttpEndpoint endpoint_;
};

/// Embedding client: sends {model, input} and reads data[0].embedding.
class HttpEmbedder final : public Embedder {
public:
    HttpEmbedder(HttpEndpoint endpoint, std::size_t dim)
        : endpoint_(std::move(endpoint)), dim_(dim) {}

    EmbeddingVector embed(std::string_view text) const override;
    std::size_t dim() const noexcept override { return dim_; }

private:
    HttpEndpoint endpoint_;
    std::size_t dim_;
};

}  // namespace ehc
