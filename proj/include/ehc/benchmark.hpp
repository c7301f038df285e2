#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "ehc/config.hpp"
#include "ehc/embedding.hpp"
#include "ehc/insight.hpp"
#include "ehc/llm.hpp"
#include "ehc/memory.hpp"
#include "ehc/prompt_template.hpp"
#include "ehc/trace.hpp"

namespace ehc {

struct CategoryScore {
    std::string label;
    std::size_t total = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
};

struct MetricsReport {
    BenchmarkMode mode = BenchmarkMode::baseline;
    std::uint64_t seed = 0;
    std::size_t train_tasks = 0;
    std::size_t total = 0;
    std::size_t correct = 0;
    /// correct / total
    double accuracy = 0.0;
    std::vector<CategoryScore> per_category;
    PoolStats pool;
    std::vector<std::size_t> insight_counts;
    std::size_t insights_total = 0;
    double duration_seconds = 0.0;
};

/// `key=value` lines, one per field, fixed order. Duration is left out so
/// that identical runs produce identical files.
std::string format_report(const MetricsReport& report);

/// Human-readable summary including run duration.
void print_summary(std::ostream& out, const MetricsReport& report);

struct BenchmarkOutcome {
    MetricsReport report;
    HierarchicalMemory memory;
    InsightPool insights;
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
};

std::unique_ptr<CompletionBackend> make_backend(const BenchmarkConfig& config,
                                                std::ostream* http_trace = nullptr);
std::unique_ptr<Embedder> make_embedder(const BenchmarkConfig& config);

/// Template files named in the config, falling back to templates_dir.
PromptTemplates load_templates(const BenchmarkConfig& config);

/// Generates the suite, splits it and evaluates the configured mode:
///
///   baseline  solve every test task with empty memory and no insights
///   hmr       seed memory, collect experience on the train split, then solve
///   hmr_toel  as hmr, plus insight generation for each category before solving
///
/// Every mode is scored on the same test split. Writes the report file and
/// the store file when their paths are set.
BenchmarkOutcome run_benchmark(const BenchmarkConfig& config, RunTrace* trace = nullptr);

/// Same, with caller-provided backend and embedder.
BenchmarkOutcome run_benchmark(const BenchmarkConfig& config, CompletionBackend& llm,
                               const Embedder& embedder, RunTrace* trace = nullptr);

}  // namespace ehc
