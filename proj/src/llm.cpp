#include "ehc/llm.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "ehc/errors.hpp"

namespace ehc {

// ---------------------------------------------------------------------------
// Script

namespace {

MatchKind parse_match_kind(const std::string& s) {
    if (s == "substring") return MatchKind::substring;
    if (s == "regex") return MatchKind::regex;
    if (s == "hash") return MatchKind::prompt_hash;
    throw ConfigError("script: unknown match kind '" + s + "'");
}

}  // namespace

Script Script::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("script: top level must be an object");
    Script script;
    try {
        script.default_response = j.value("default_response", std::string{});
        if (j.contains("rules")) {
            std::size_t index = 0;
            for (const auto& r : j.at("rules")) {
                ScriptRule rule;
                rule.match = parse_match_kind(r.value("match", std::string("substring")));
                rule.pattern = r.at("pattern").get<std::string>();
                rule.response = r.at("response").get<std::string>();
                if (r.contains("requires")) {
                    rule.required = r.at("requires").get<std::vector<std::string>>();
                }
                if (r.contains("max_uses")) {
                    rule.max_uses = r.at("max_uses").get<int>();
                    if (*rule.max_uses < 0) {
                        throw ConfigError("script rule " + std::to_string(index) +
                                          ": max_uses must be non-negative");
                    }
                }
                script.rules.push_back(std::move(rule));
                ++index;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("script: ") + e.what());
    }
    return script;
}

Script Script::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read script " + path.string());
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("script " + path.string() + " is not valid JSON");
    return from_json(j);
}

std::string prompt_hash(std::string_view prompt) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(prompt)));
    return buf;
}

ScriptedBackend::ScriptedBackend(Script script)
    : script_(std::move(script)), uses_(script_.rules.size(), 0) {
    compiled_.reserve(script_.rules.size());
    for (const auto& rule : script_.rules) {
        if (rule.match != MatchKind::regex) {
            compiled_.emplace_back();
            continue;
        }
        try {
            compiled_.emplace_back(std::regex(rule.pattern, std::regex::ECMAScript));
        } catch (const std::regex_error& e) {
            throw ConfigError("script: bad regex '" + rule.pattern + "': " + e.what());
        }
    }
}

std::string ScriptedBackend::complete(std::string_view prompt, int, double) {
    std::lock_guard lock(mutex_);
    prompts_.emplace_back(prompt);
    std::string hash;
    for (std::size_t i = 0; i < script_.rules.size(); ++i) {
        const auto& rule = script_.rules[i];
        if (rule.max_uses && uses_[i] >= *rule.max_uses) continue;
        bool missing = false;
        for (const auto& needle : rule.required) {
            if (prompt.find(needle) == std::string_view::npos) {
                missing = true;
                break;
            }
        }
        if (missing) continue;

        std::string response;
        switch (rule.match) {
            case MatchKind::substring:
                if (prompt.find(rule.pattern) == std::string_view::npos) continue;
                response = rule.response;
                break;
            case MatchKind::prompt_hash:
                if (hash.empty()) hash = prompt_hash(prompt);
                if (hash != rule.pattern) continue;
                response = rule.response;
                break;
            case MatchKind::regex: {
                std::match_results<std::string_view::const_iterator> m;
                if (!std::regex_search(prompt.begin(), prompt.end(), m, *compiled_[i])) continue;
                response = m.format(rule.response);
                break;
            }
        }
        ++uses_[i];
        return response;
    }
    return script_.default_response;
}

std::size_t ScriptedBackend::calls() const {
    std::lock_guard lock(mutex_);
    return prompts_.size();
}

std::vector<std::string> ScriptedBackend::prompts() const {
    std::lock_guard lock(mutex_);
    return prompts_;
}

// ---------------------------------------------------------------------------
// HTTP

std::string api_key_from_env() {
    const char* key = std::getenv("EHC_LLM_API_KEY");
    return key ? std::string(key) : std::string{};
}

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint URL needs a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string excerpt(const std::string& body) {
    constexpr std::size_t limit = 200;
    return body.size() <= limit ? body : body.substr(0, limit) + "...";
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

nlohmann::json post_json_with_retry(const HttpEndpoint& endpoint, const nlohmann::json& body) {
    const auto [origin, path] = split_url(endpoint.url);
    httplib::Client client(origin);
    client.set_connection_timeout(endpoint.timeout);
    client.set_read_timeout(endpoint.timeout);
    client.set_write_timeout(endpoint.timeout);

    httplib::Headers headers;
    if (!endpoint.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + endpoint.api_key);
    }
    const std::string payload = body.dump();
    const int attempts = std::max(0, endpoint.retries) + 1;

    std::string last_error;
    int last_status = 0;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(endpoint.backoff * (1 << (attempt - 1)));
        if (endpoint.trace) *endpoint.trace << "[http] POST " << endpoint.url << ' ' << payload << '\n';

        auto res = client.Post(path, headers, payload, "application/json");
        if (!res) {
            last_status = 0;
            last_error = "transport error: " + httplib::to_string(res.error());
            if (endpoint.trace) *endpoint.trace << "[http] " << last_error << '\n';
            continue;
        }
        if (endpoint.trace) *endpoint.trace << "[http] " << res->status << ' ' << res->body << '\n';
        if (res->status >= 200 && res->status < 300) {
            auto parsed = nlohmann::json::parse(res->body, nullptr, false);
            if (parsed.is_discarded()) {
                throw ProtocolError("response body is not JSON: " + excerpt(res->body), res->status);
            }
            return parsed;
        }
        last_status = res->status;
        last_error = "HTTP " + std::to_string(res->status) + ": " + excerpt(res->body);
        if (!retryable_status(res->status)) break;
    }
    throw BackendError(endpoint.url + " failed: " + last_error, last_status);
}

std::string HttpBackend::complete(std::string_view prompt, int max_tokens, double temperature) {
    const nlohmann::json request = {
        {"model", endpoint_.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", std::string(prompt)}}})},
        {"max_tokens", max_tokens},
        {"temperature", temperature},
    };
    const auto response = post_json_with_retry(endpoint_, request);
    const auto* choices = response.is_object() && response.contains("choices")
                              ? &response["choices"] : nullptr;
    if (!choices || !choices->is_array() || choices->empty()) {
        throw ProtocolError("response has no choices");
    }
    const auto& first = (*choices)[0];
    if (!first.is_object() || !first.contains("message") || !first["message"].is_object() ||
        !first["message"].contains("content") || !first["message"]["content"].is_string()) {
        throw ProtocolError("choices[0].message.content missing or not a string");
    }
    return first["message"]["content"].get<std::string>();
}

EmbeddingVector HttpEmbedder::embed(std::string_view text) const {
    if (text.empty()) return EmbeddingVector(dim_);
    const nlohmann::json request = {{"model", endpoint_.model}, {"input", std::string(text)}};
    const auto response = post_json_with_retry(endpoint_, request);
    if (!response.is_object() || !response.contains("data") || !response["data"].is_array() ||
        response["data"].empty() || !response["data"][0].is_object() ||
        !response["data"][0].contains("embedding") || !response["data"][0]["embedding"].is_array()) {
        throw ProtocolError("response has no data[0].embedding array");
    }
    std::vector<double> values;
    for (const auto& v : response["data"][0]["embedding"]) {
        if (!v.is_number()) throw ProtocolError("embedding contains a non-number");
        values.push_back(v.get<double>());
    }
    if (values.size() != dim_) {
        throw ProtocolError("embedding has dim " + std::to_string(values.size()) + ", expected " +
                            std::to_string(dim_));
    }
    return EmbeddingVector(std::move(values));
}

}  // namespace ehc
