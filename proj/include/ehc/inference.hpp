#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ehc/experience.hpp"
#include "ehc/insight.hpp"

namespace ehc {

/// Everything shown to the LLM for one program-generation call.
struct PromptBundle {
    CategoryId category;
    /// Weight descending, ties by id.
    std::vector<Insight> insights;
    /// In the order given (retrieval order: similarity descending).
    std::vector<MemoryRecord> exemplars;
    std::string rendered;
};

/// Renders `tmpl` with {task}, {insights} and {exemplars}.
///
/// Insights become numbered lines ("1. text"), or "(no insights)".
/// Exemplars are their content blocks separated by blank lines, or the
/// single line "(no examples)". Throws ConfigError for any other placeholder
/// and UsageError if an insight or exemplar belongs to another category.
PromptBundle assemble_prompt(const Task& task, CategoryId category, std::vector<Insight> insights,
                             std::vector<MemoryRecord> exemplars, std::string_view tmpl);

struct Answer {
    CategoryId category;
    std::string candidate_label;
    std::string program;
    std::string result;
    bool executed = false;
    std::string diagnostic;
    /// Set when the task carries ground truth.
    std::optional<bool> verdict;
    PromptBundle prompt;
};

/// One-shot inference: label, classify, retrieve in-category exemplars,
/// assemble the prompt, generate a program and execute it. Exactly two LLM
/// calls. Trace stages are prefixed "solve.".
Answer solve(const Task& task, AgentContext& ctx, const InsightPool& insights);

}  // namespace ehc
