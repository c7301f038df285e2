#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ehc/category.hpp"
#include "ehc/executor.hpp"
#include "ehc/llm.hpp"
#include "ehc/memory.hpp"
#include "ehc/prompt_template.hpp"
#include "ehc/trace.hpp"
#include "ehc/trajectory.hpp"

namespace ehc {

struct RetrievalSettings {
    std::size_t k = 3;
    double theta = 0.7;
};

/// Collaborators shared by experience collection and inference.
struct AgentContext {
    HierarchicalMemory& memory;
    const Embedder& embedder;
    const CategorySet& categories;
    CompletionBackend& llm;
    const Executor& executor;
    const Evaluator& evaluator;
    const PromptTemplates& templates;
    RetrievalSettings retrieval{};
    CompletionSettings completion{};
    RunTrace* trace = nullptr;
};

enum class Outcome { success, failure };

struct Experience {
    std::string task_id;
    CategoryId category;
    std::string candidate_label;
    Trajectory trajectory;
    /// Newline-joined reflections; empty for successes.
    std::string reflections;
    Outcome outcome = Outcome::failure;
    int attempts_used = 0;
    /// Id of the memory record the experience was stored as.
    RecordId record_id = 0;
};

/// "- label" lines for the {categories} placeholder.
std::string render_category_list(const CategorySet& categories);

/// First line of the completion, trimmed, with one pair of surrounding
/// quotes (single, double or backtick) removed.
std::string extract_label(std::string_view completion);

/// Asks the LLM for a free-form category name for `task_content`.
std::string label_candidate(std::string_view task_content, CompletionBackend& llm,
                            std::string_view labeling_template, const CategorySet& categories,
                            const CompletionSettings& settings = {});

/// Executes a parsed program and folds observations and the result into it.
Trajectory execute_trajectory(Trajectory planned, const Executor& executor,
                              const nlohmann::json& payload, ExecutionResult* result = nullptr);

/// Up to `max_attempts` trial-and-error attempts at one task.
///
/// Each attempt retrieves history from memory (unscoped on the first
/// attempt, scoped to the task's category afterwards), asks the LLM for a
/// program, executes and judges it. A failed attempt appends an LLM
/// reflection to the running reflections. The task is labeled and classified
/// once, right after the first attempt. The final experience is stored in
/// memory as a success or failure record.
///
/// Trace stages: "collect.attempt", "collect.reflections" (value after each
/// failure), "collect.label", "collect.stored".
Experience run_task(const Task& task, AgentContext& ctx, int max_attempts);

// ---------------------------------------------------------------------------
// Seed corpus

/// One hand-written exemplar: `category | question | op; op; op`.
struct SeedExample {
    std::string category;
    std::string question;
    std::vector<std::string> program;
};

/// Blank lines and lines starting with '#' are skipped. Throws FormatError
/// for malformed lines.
std::vector<SeedExample> parse_seed_corpus(std::istream& in);
std::vector<SeedExample> load_seed_corpus(const std::filesystem::path& path);

/// Stores the first `per_category` corpus examples of every category as seed
/// records, category by category. Throws ConfigError naming the first
/// category with too few examples. Returns the number stored.
std::size_t seed_memory(HierarchicalMemory& memory, const CategorySet& categories,
                        const Embedder& embedder, std::span<const SeedExample> corpus,
                        std::size_t per_category);

}  // namespace ehc
