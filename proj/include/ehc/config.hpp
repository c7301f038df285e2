#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace ehc {

/// Flat `key = value` text. Dotted keys, `#` comments, optional double quotes
/// around values. Later duplicates override earlier ones.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>");
    static KeyValueConfig load(const std::filesystem::path& path);

    std::optional<std::string> get(const std::string& key) const;
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    const std::map<std::string, std::string>& values() const noexcept { return values_; }
    const std::string& source() const noexcept { return source_; }

private:
    std::map<std::string, std::string> values_;
    std::string source_;
};

enum class BenchmarkMode { baseline, hmr, hmr_toel };

const char* to_string(BenchmarkMode mode) noexcept;
BenchmarkMode parse_mode(const std::string& s);

/// Directory holding the shipped templates, seed corpus and demo script.
std::filesystem::path default_data_dir();

struct BenchmarkConfig {
    std::uint64_t seed = 42;
    std::size_t tasks_per_category = 10;
    std::size_t examples_per_category = 5;
    BenchmarkMode mode = BenchmarkMode::hmr_toel;

    // memory
    std::size_t capacity = 16;
    std::size_t k = 3;
    double theta = 0.7;
    bool deep_theta_gate = false;

    // experience collection and learning
    int attempts = 3;
    std::size_t segment_length = 3;
    std::size_t max_pairs = 8;
    std::size_t max_groups = 4;
    int insight_initial_weight = 2;
    int insight_rounds = 2;
    std::size_t insight_max_per_category = 20;

    // embedder
    std::string embedder = "reference";
    std::size_t embedding_dim = 256;
    std::string embedder_endpoint;
    std::string embedder_model;

    // llm
    std::string llm_backend = "scripted";
    std::string llm_endpoint;
    std::string llm_model;
    std::filesystem::path llm_script_path;
    double llm_temperature = 0.0;
    int llm_max_tokens = 512;
    int llm_retries = 2;

    // files
    std::filesystem::path templates_dir;
    std::filesystem::path trajectory_template;
    std::filesystem::path reflection_template;
    std::filesystem::path labeling_template;
    std::filesystem::path insight_template;
    std::filesystem::path inference_template;
    std::filesystem::path seed_corpus;
    std::filesystem::path store_path;
    std::filesystem::path report_path;

    /// Defaults pointing at the shipped data directory.
    static BenchmarkConfig defaults();

    /// Applies `kv` over defaults. Relative paths resolve against
    /// `base_dir`. Throws ConfigError naming the offending key.
    static BenchmarkConfig from_key_values(const KeyValueConfig& kv,
                                           const std::filesystem::path& base_dir);
    static BenchmarkConfig load(const std::filesystem::path& path);

    /// Checks numeric ranges. Throws ConfigError.
    void validate() const;
};

}  // namespace ehc
