#include "ehc/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>

#include "ehc/errors.hpp"
#include "ehc/trajectory.hpp"

#ifndef EHC_DATA_DIR
#define EHC_DATA_DIR "data"
#endif

namespace ehc {

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
    KeyValueConfig cfg;
    cfg.source_ = source;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(body.substr(0, eq));
        auto value = trim(body.substr(eq + 1));
        if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        cfg.values_[std::string(key)] = std::string(value);
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    return parse(in, path.string());
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

const char* to_string(BenchmarkMode mode) noexcept {
    switch (mode) {
        case BenchmarkMode::baseline: return "baseline";
        case BenchmarkMode::hmr: return "hmr";
        case BenchmarkMode::hmr_toel: return "hmr_toel";
    }
    return "?";
}

BenchmarkMode parse_mode(const std::string& s) {
    if (s == "baseline") return BenchmarkMode::baseline;
    if (s == "hmr") return BenchmarkMode::hmr;
    if (s == "hmr_toel") return BenchmarkMode::hmr_toel;
    throw ConfigError("mode: expected baseline, hmr or hmr_toel, got '" + s + "'");
}

std::filesystem::path default_data_dir() {
    return std::filesystem::path(EHC_DATA_DIR);
}

BenchmarkConfig BenchmarkConfig::defaults() {
    BenchmarkConfig c;
    const auto data = default_data_dir();
    c.llm_script_path = data / "demo_script.json";
    c.templates_dir = data / "templates";
    c.seed_corpus = data / "seed_corpus.txt";
    return c;
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as a number");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config key '" + key + "': expected true or false, got '" + value + "'");
}

}  // namespace

BenchmarkConfig BenchmarkConfig::from_key_values(const KeyValueConfig& kv,
                                                 const std::filesystem::path& base_dir) {
    BenchmarkConfig c = defaults();
    auto path = [&](const std::string& v) {
        std::filesystem::path p(v);
        return p.is_relative() ? base_dir / p : p;
    };

    using Setter = std::function<void(const std::string& key, const std::string& value)>;
    const std::map<std::string, Setter> setters = {
        {"seed", [&](auto& k, auto& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
        {"tasks_per_category", [&](auto& k, auto& v) { c.tasks_per_category = parse_number<std::size_t>(k, v); }},
        {"examples_per_category", [&](auto& k, auto& v) { c.examples_per_category = parse_number<std::size_t>(k, v); }},
        {"mode", [&](auto&, auto& v) { c.mode = parse_mode(v); }},
        {"capacity", [&](auto& k, auto& v) { c.capacity = parse_number<std::size_t>(k, v); }},
        {"k", [&](auto& k, auto& v) { c.k = parse_number<std::size_t>(k, v); }},
        {"theta", [&](auto& k, auto& v) { c.theta = parse_number<double>(k, v); }},
        {"deep_theta_gate", [&](auto& k, auto& v) { c.deep_theta_gate = parse_bool(k, v); }},
        {"attempts", [&](auto& k, auto& v) { c.attempts = parse_number<int>(k, v); }},
        {"segment_length", [&](auto& k, auto& v) { c.segment_length = parse_number<std::size_t>(k, v); }},
        {"max_pairs", [&](auto& k, auto& v) { c.max_pairs = parse_number<std::size_t>(k, v); }},
        {"max_groups", [&](auto& k, auto& v) { c.max_groups = parse_number<std::size_t>(k, v); }},
        {"insight_initial_weight", [&](auto& k, auto& v) { c.insight_initial_weight = parse_number<int>(k, v); }},
        {"insight_rounds", [&](auto& k, auto& v) { c.insight_rounds = parse_number<int>(k, v); }},
        {"insight_max_per_category", [&](auto& k, auto& v) { c.insight_max_per_category = parse_number<std::size_t>(k, v); }},
        {"embedder", [&](auto&, auto& v) { c.embedder = v; }},
        {"embedding_dim", [&](auto& k, auto& v) { c.embedding_dim = parse_number<std::size_t>(k, v); }},
        {"embedder.endpoint", [&](auto&, auto& v) { c.embedder_endpoint = v; }},
        {"embedder.model", [&](auto&, auto& v) { c.embedder_model = v; }},
        {"llm.backend", [&](auto&, auto& v) { c.llm_backend = v; }},
        {"llm.endpoint", [&](auto&, auto& v) { c.llm_endpoint = v; }},
        {"llm.model", [&](auto&, auto& v) { c.llm_model = v; }},
        {"llm.script_path", [&](auto&, auto& v) { c.llm_script_path = path(v); }},
        {"llm.temperature", [&](auto& k, auto& v) { c.llm_temperature = parse_number<double>(k, v); }},
        {"llm.max_tokens", [&](auto& k, auto& v) { c.llm_max_tokens = parse_number<int>(k, v); }},
        {"llm.retries", [&](auto& k, auto& v) { c.llm_retries = parse_number<int>(k, v); }},
        {"templates_dir", [&](auto&, auto& v) { c.templates_dir = path(v); }},
        {"template.trajectory", [&](auto&, auto& v) { c.trajectory_template = path(v); }},
        {"template.reflection", [&](auto&, auto& v) { c.reflection_template = path(v); }},
        {"template.labeling", [&](auto&, auto& v) { c.labeling_template = path(v); }},
        {"template.insight", [&](auto&, auto& v) { c.insight_template = path(v); }},
        {"inference_template", [&](auto&, auto& v) { c.inference_template = path(v); }},
        {"seed_corpus", [&](auto&, auto& v) { c.seed_corpus = path(v); }},
        {"store_path", [&](auto&, auto& v) { c.store_path = path(v); }},
        {"report_path", [&](auto&, auto& v) { c.report_path = path(v); }},
    };

    for (const auto& [key, value] : kv.values()) {
        auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError(kv.source() + ": unknown config key '" + key + "'");
        it->second(key, value);
    }
    c.validate();
    return c;
}

BenchmarkConfig BenchmarkConfig::load(const std::filesystem::path& path) {
    return from_key_values(KeyValueConfig::load(path), path.parent_path());
}

void BenchmarkConfig::validate() const {
    auto require = [](bool ok, const char* key, const std::string& why) {
        if (!ok) throw ConfigError(std::string("config key '") + key + "': " + why);
    };
    require(tasks_per_category >= 1, "tasks_per_category", "must be at least 1");
    require(capacity >= 2, "capacity", "must be at least 2");
    require(k >= 1, "k", "must be at least 1");
    require(theta >= -1.0 && theta <= 1.0, "theta", "must lie in [-1, 1]");
    require(attempts >= 1, "attempts", "must be at least 1");
    require(segment_length >= 1, "segment_length", "must be at least 1");
    require(insight_initial_weight >= 1, "insight_initial_weight", "must be at least 1");
    require(insight_rounds >= 1, "insight_rounds", "must be at least 1");
    require(insight_max_per_category >= 1, "insight_max_per_category", "must be at least 1");
    require(embedding_dim >= 1, "embedding_dim", "must be at least 1");
    require(embedder == "reference" || embedder == "external", "embedder",
            "expected reference or external");
    require(llm_backend == "scripted" || llm_backend == "http", "llm.backend",
            "expected scripted or http");
    require(llm_max_tokens >= 1, "llm.max_tokens", "must be at least 1");
    require(llm_retries >= 0, "llm.retries", "must be non-negative");
    if (llm_backend == "http") require(!llm_endpoint.empty(), "llm.endpoint", "required for http backend");
    if (embedder == "external") require(!embedder_endpoint.empty(), "embedder.endpoint", "required for external embedder");
}

}  // namespace ehc
