#include "ehc/inference.hpp"

#include <algorithm>

#include "ehc/errors.hpp"

namespace ehc {

PromptBundle assemble_prompt(const Task& task, CategoryId category, std::vector<Insight> insights,
                             std::vector<MemoryRecord> exemplars, std::string_view tmpl) {
    check_placeholders(tmpl, {"task", "insights", "exemplars"}, "inference");
    for (const auto& ins : insights) {
        if (ins.category != category) {
            throw UsageError("insight " + std::to_string(ins.id) + " is from another category");
        }
    }
    for (const auto& ex : exemplars) {
        if (ex.category != category) {
            throw UsageError("exemplar " + std::to_string(ex.id) + " is from another category");
        }
    }
    std::stable_sort(insights.begin(), insights.end(), [](const Insight& a, const Insight& b) {
        return a.weight != b.weight ? a.weight > b.weight : a.id < b.id;
    });

    std::string insight_text;
    for (std::size_t i = 0; i < insights.size(); ++i) {
        insight_text += std::to_string(i + 1) + ". " + insights[i].text + '\n';
    }
    if (insight_text.empty()) insight_text = "(no insights)\n";

    std::string exemplar_text;
    for (const auto& ex : exemplars) {
        if (!exemplar_text.empty()) exemplar_text += '\n';
        exemplar_text += ex.content;
        if (exemplar_text.back() != '\n') exemplar_text += '\n';
    }
    if (exemplar_text.empty()) exemplar_text = "(no examples)\n";

    PromptBundle bundle;
    bundle.category = category;
    bundle.rendered = render_template(
        tmpl, {{"task", task.content}, {"insights", insight_text}, {"exemplars", exemplar_text}});
    bundle.insights = std::move(insights);
    bundle.exemplars = std::move(exemplars);
    return bundle;
}

Answer solve(const Task& task, AgentContext& ctx, const InsightPool& insights) {
    auto note = [&](std::string_view stage, std::string_view detail) {
        if (ctx.trace) ctx.trace->add(stage, detail);
    };
    Answer answer;

    answer.candidate_label = label_candidate(task.content, ctx.llm, ctx.templates.labeling,
                                             ctx.categories, ctx.completion);
    const Classification cls = classify(answer.candidate_label, ctx.categories, ctx.embedder);
    answer.category = cls.category;
    note("solve.label", task.id + ": " + answer.candidate_label + " -> " +
                            ctx.categories.label(cls.category) +
                            (cls.degenerate ? " (degenerate)" : ""));

    const auto retrieved = ctx.memory.retrieve(ctx.embedder.embed(task.content), cls.category,
                                               ctx.retrieval.k, ctx.retrieval.theta);
    std::vector<MemoryRecord> exemplars;
    for (const auto& e : retrieved.entries) {
        exemplars.push_back(e.record);
        note("solve.retrieve", "record " + std::to_string(e.record.id) + " (" + to_string(e.tier) +
                                   ", sim " + std::to_string(e.similarity) + ")");
    }

    answer.prompt = assemble_prompt(task, cls.category, insights.for_category(cls.category),
                                    std::move(exemplars), ctx.templates.inference);
    note("solve.prompt", answer.prompt.rendered);

    const std::string completion = ctx.llm.complete(answer.prompt.rendered, ctx.completion);
    note("solve.completion", completion);

    ExecutionResult exec;
    const Trajectory trajectory =
        execute_trajectory(parse_program_output(completion), ctx.executor, task.payload, &exec);
    answer.program = trajectory.program();
    answer.executed = exec.ok;
    answer.result = exec.result;
    answer.diagnostic = exec.diagnostic;
    note("solve.execute", exec.ok ? "result " + exec.result : "error " + exec.diagnostic);

    if (task.truth) {
        const Verdict v = ctx.evaluator.judge(task, trajectory);
        answer.verdict = v.success;
        note("solve.verdict", v.success ? "success" : "failure: " + v.feedback);
    }
    return answer;
}

}  // namespace ehc
