#include "ehc/experience.hpp"

#include <fstream>

#include "ehc/errors.hpp"

namespace ehc {

std::string render_category_list(const CategorySet& categories) {
    std::string out;
    for (const auto& label : categories.labels()) out += "- " + label + '\n';
    return out;
}

std::string extract_label(std::string_view completion) {
    const auto nl = completion.find('\n');
    std::string_view first = trim(completion.substr(0, nl));
    if (first.size() >= 2) {
        const char q = first.front();
        if ((q == '"' || q == '\'' || q == '`') && first.back() == q) {
            first = trim(first.substr(1, first.size() - 2));
        }
    }
    return std::string(first);
}

std::string label_candidate(std::string_view task_content, CompletionBackend& llm,
                            std::string_view labeling_template, const CategorySet& categories,
                            const CompletionSettings& settings) {
    const std::string prompt =
        render_template(labeling_template, {{"task", std::string(task_content)},
                                            {"categories", render_category_list(categories)}});
    return extract_label(llm.complete(prompt, settings));
}

Trajectory execute_trajectory(Trajectory planned, const Executor& executor,
                              const nlohmann::json& payload, ExecutionResult* result) {
    if (planned.steps.empty()) {
        planned.steps.push_back(Step{{}, "(no program)", "error: empty program"});
        planned.final_answer.clear();
        if (result) *result = ExecutionResult{false, {}, "empty program", {}};
        return planned;
    }
    ExecutionResult res = executor.run(planned.program(), payload);
    for (std::size_t i = 0; i < planned.steps.size() && i < res.observations.size(); ++i) {
        planned.steps[i].observation = res.observations[i];
    }
    if (!res.ok && !planned.steps.empty() && res.observations.size() < planned.steps.size()) {
        planned.steps[res.observations.size()].observation = "error: " + res.diagnostic;
    }
    planned.final_answer = res.ok ? res.result : std::string{};
    if (result) *result = std::move(res);
    return planned;
}

namespace {

std::string render_history(const RetrievalResult& history) {
    if (history.entries.empty()) return "(no history)\n";
    std::string out;
    for (const auto& e : history.entries) out += e.record.content + '\n';
    return out;
}

constexpr std::string_view kEmptyReflection = "(no reflection)";

}  // namespace

Experience run_task(const Task& task, AgentContext& ctx, int max_attempts) {
    if (max_attempts < 1) throw UsageError("run_task: attempts must be at least 1");
    if (trim(task.content).empty()) throw UsageError("task " + task.id + " has empty content");

    const EmbeddingVector task_embedding = ctx.embedder.embed(task.content);
    std::optional<Classification> category;
    Experience exp;
    exp.task_id = task.id;
    std::string reflections;

    auto classify_task = [&] {
        if (category) return;
        exp.candidate_label = label_candidate(task.content, ctx.llm, ctx.templates.labeling,
                                              ctx.categories, ctx.completion);
        category = classify(exp.candidate_label, ctx.categories, ctx.embedder);
        if (ctx.trace) {
            ctx.trace->add("collect.label", exp.candidate_label + " -> " +
                                                ctx.categories.label(category->category) +
                                                (category->degenerate ? " (degenerate)" : ""));
        }
    };

    for (int t = 0; t < max_attempts; ++t) {
        const auto scope = category ? std::optional<CategoryId>(category->category) : std::nullopt;
        const auto history = ctx.memory.retrieve(task_embedding, scope, ctx.retrieval.k,
                                                 ctx.retrieval.theta);
        const std::string history_text = render_history(history);
        const std::string prompt = render_template(
            ctx.templates.trajectory, {{"task", task.content},
                                       {"history", history_text},
                                       {"reflections", reflections.empty() ? "(none)" : reflections},
                                       {"categories", render_category_list(ctx.categories)}});

        std::string completion;
        try {
            completion = ctx.llm.complete(prompt, ctx.completion);
        } catch (const BackendError& e) {
            throw BackendError("task " + task.id + " attempt " + std::to_string(t) + ": " + e.what(),
                               e.status());
        }
        Trajectory trajectory = execute_trajectory(parse_program_output(completion), ctx.executor,
                                                   task.payload);
        const Verdict verdict = ctx.evaluator.judge(task, trajectory);
        if (ctx.trace) {
            ctx.trace->add("collect.attempt", task.id + " #" + std::to_string(t) + ": " +
                                                  (verdict.success ? "success" : "failure") + " (" +
                                                  verdict.feedback + ")");
        }

        if (t == 0) classify_task();
        exp.trajectory = std::move(trajectory);
        exp.attempts_used = t + 1;

        if (verdict.success) {
            exp.outcome = Outcome::success;
            break;
        }

        const std::string reflection_prompt =
            render_template(ctx.templates.reflection,
                            {{"task", task.content},
                             {"history", history_text},
                             {"trajectory", format_trajectory(task.content, exp.trajectory)},
                             {"feedback", verdict.feedback}});
        std::string reflection;
        try {
            reflection = std::string(trim(ctx.llm.complete(reflection_prompt, ctx.completion)));
        } catch (const BackendError& e) {
            throw BackendError("task " + task.id + " reflection " + std::to_string(t) + ": " +
                                   e.what(),
                               e.status());
        }
        if (reflection.empty()) reflection = kEmptyReflection;
        // Segments are newline-delimited, so a multi-line reflection is
        // flattened to keep one segment per failed attempt.
        for (char& c : reflection) {
            if (c == '\n' || c == '\r') c = ' ';
        }
        reflections = reflections.empty() ? reflection : reflections + '\n' + reflection;
        if (ctx.trace) ctx.trace->add("collect.reflections", reflections);
        exp.outcome = Outcome::failure;
    }

    exp.category = category->category;
    if (exp.outcome == Outcome::failure) exp.reflections = reflections;

    MemoryRecord record;
    record.id = ctx.memory.next_id();
    record.category = exp.category;
    record.kind = exp.outcome == Outcome::success ? RecordKind::success : RecordKind::failure;
    record.content = format_trajectory(task.content, exp.trajectory);
    record.embedding = task_embedding;
    if (exp.outcome == Outcome::failure) record.reflections = exp.reflections;
    record.task_id = task.id;
    exp.record_id = record.id;
    ctx.memory.store(std::move(record));
    if (ctx.trace) {
        ctx.trace->add("collect.stored", task.id + " as record " + std::to_string(exp.record_id) +
                                             " (" + ctx.categories.label(exp.category) + ", " +
                                             (exp.outcome == Outcome::success ? "success" : "failure") +
                                             ")");
    }
    return exp;
}

// ---------------------------------------------------------------------------
// Seed corpus

std::vector<SeedExample> parse_seed_corpus(std::istream& in) {
    std::vector<SeedExample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto bar1 = body.find('|');
        const auto bar2 = bar1 == std::string_view::npos ? bar1 : body.find('|', bar1 + 1);
        if (bar2 == std::string_view::npos) {
            throw FormatError(line_no, "expected 'category | question | program'");
        }
        SeedExample ex;
        ex.category = std::string(trim(body.substr(0, bar1)));
        ex.question = std::string(trim(body.substr(bar1 + 1, bar2 - bar1 - 1)));
        std::string_view program = body.substr(bar2 + 1);
        while (!program.empty()) {
            const auto semi = program.find(';');
            const auto op = trim(program.substr(0, semi));
            if (!op.empty()) ex.program.emplace_back(op);
            if (semi == std::string_view::npos) break;
            program = program.substr(semi + 1);
        }
        if (ex.category.empty() || ex.question.empty() || ex.program.empty()) {
            throw FormatError(line_no, "category, question and program must be non-empty");
        }
        out.push_back(std::move(ex));
    }
    return out;
}

std::vector<SeedExample> load_seed_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read seed corpus " + path.string());
    try {
        return parse_seed_corpus(in);
    } catch (const FormatError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::size_t seed_memory(HierarchicalMemory& memory, const CategorySet& categories,
                        const Embedder& embedder, std::span<const SeedExample> corpus,
                        std::size_t per_category) {
    if (per_category == 0) return 0;
    std::vector<std::vector<const SeedExample*>> by_category(categories.size());
    for (const auto& ex : corpus) {
        for (std::size_t k = 0; k < categories.size(); ++k) {
            if (categories.labels()[k] == ex.category) by_category[k].push_back(&ex);
        }
    }
    for (std::size_t k = 0; k < categories.size(); ++k) {
        if (by_category[k].size() < per_category) {
            throw ConfigError("seed corpus has " + std::to_string(by_category[k].size()) +
                              " examples for '" + categories.labels()[k] + "', need " +
                              std::to_string(per_category));
        }
    }

    std::size_t stored = 0;
    for (std::size_t k = 0; k < categories.size(); ++k) {
        for (std::size_t i = 0; i < per_category; ++i) {
            const SeedExample& ex = *by_category[k][i];
            Trajectory t;
            for (const auto& op : ex.program) t.steps.push_back(Step{{}, op, {}});
            MemoryRecord record;
            record.id = memory.next_id();
            record.category = CategoryId{static_cast<std::uint32_t>(k)};
            record.kind = RecordKind::seed;
            record.content = format_trajectory(ex.question, t);
            record.embedding = embedder.embed(ex.question);
            memory.store(std::move(record));
            ++stored;
        }
    }
    return stored;
}

}  // namespace ehc
