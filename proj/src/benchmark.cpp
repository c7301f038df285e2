#include "ehc/benchmark.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>

#include "ehc/errors.hpp"
#include "ehc/experience.hpp"
#include "ehc/inference.hpp"
#include "ehc/store_file.hpp"
#include "ehc/suite.hpp"

namespace ehc {

std::string format_report(const MetricsReport& r) {
    std::string out;
    auto line = [&](const std::string& key, const std::string& value) {
        out += key + '=' + value + '\n';
    };
    line("mode", to_string(r.mode));
    line("seed", std::to_string(r.seed));
    line("train_tasks", std::to_string(r.train_tasks));
    line("test_tasks", std::to_string(r.total));
    line("correct", std::to_string(r.correct));
    line("accuracy", format_double(r.accuracy));
    for (const auto& c : r.per_category) {
        line("accuracy." + c.label, format_double(c.accuracy));
        line("correct." + c.label, std::to_string(c.correct) + "/" + std::to_string(c.total));
    }
    line("pool.fast_count", std::to_string(r.pool.fast_count));
    line("pool.deep_count", std::to_string(r.pool.deep_count));
    line("pool.evictions_total", std::to_string(r.pool.evictions_total));
    line("pool.promotions_total", std::to_string(r.pool.promotions_total));
    line("pool.fast_hits", std::to_string(r.pool.fast_hits));
    line("pool.deep_hits", std::to_string(r.pool.deep_hits));
    line("insights.total", std::to_string(r.insights_total));
    for (std::size_t i = 0; i < r.per_category.size() && i < r.insight_counts.size(); ++i) {
        line("insights." + r.per_category[i].label, std::to_string(r.insight_counts[i]));
    }
    return out;
}

void print_summary(std::ostream& out, const MetricsReport& r) {
    out << "mode " << to_string(r.mode) << ", seed " << r.seed << ": " << r.correct << "/"
        << r.total << " correct, accuracy " << std::fixed << std::setprecision(3) << r.accuracy
        << '\n';
    for (const auto& c : r.per_category) {
        out << "  " << std::left << std::setw(12) << c.label << ' ' << c.correct << "/" << c.total
            << '\n';
    }
    out << "  pool: fast " << r.pool.fast_count << ", deep " << r.pool.deep_count << ", evictions "
        << r.pool.evictions_total << ", promotions " << r.pool.promotions_total << ", hits "
        << r.pool.fast_hits << " fast / " << r.pool.deep_hits << " deep\n";
    out << "  insights: " << r.insights_total << '\n';
    out << "  duration: " << std::setprecision(3) << r.duration_seconds << " s\n";
    out.unsetf(std::ios::fixed);
}

std::unique_ptr<CompletionBackend> make_backend(const BenchmarkConfig& config,
                                                std::ostream* http_trace) {
    if (config.llm_backend == "scripted") {
        return std::make_unique<ScriptedBackend>(Script::load(config.llm_script_path));
    }
    HttpEndpoint endpoint;
    endpoint.url = config.llm_endpoint;
    endpoint.model = config.llm_model;
    endpoint.api_key = api_key_from_env();
    endpoint.retries = config.llm_retries;
    endpoint.trace = http_trace;
    return std::make_unique<HttpBackend>(std::move(endpoint));
}

std::unique_ptr<Embedder> make_embedder(const BenchmarkConfig& config) {
    if (config.embedder == "reference") return std::make_unique<ReferenceEmbedder>(config.embedding_dim);
    HttpEndpoint endpoint;
    endpoint.url = config.embedder_endpoint;
    endpoint.model = config.embedder_model;
    endpoint.api_key = api_key_from_env();
    endpoint.retries = config.llm_retries;
    return std::make_unique<HttpEmbedder>(std::move(endpoint), config.embedding_dim);
}

PromptTemplates load_templates(const BenchmarkConfig& config) {
    auto pick = [&](const std::filesystem::path& explicit_path, const char* name) {
        return read_text_file(explicit_path.empty() ? config.templates_dir / name : explicit_path);
    };
    PromptTemplates t{
        pick(config.trajectory_template, "trajectory.txt"),
        pick(config.reflection_template, "reflection.txt"),
        pick(config.labeling_template, "labeling.txt"),
        pick(config.insight_template, "insight.txt"),
        pick(config.inference_template, "inference.txt"),
    };
    t.validate();
    return t;
}

BenchmarkOutcome run_benchmark(const BenchmarkConfig& config, RunTrace* trace) {
    auto llm = make_backend(config);
    auto embedder = make_embedder(config);
    return run_benchmark(config, *llm, *embedder, trace);
}

BenchmarkOutcome run_benchmark(const BenchmarkConfig& config, CompletionBackend& llm,
                               const Embedder& embedder, RunTrace* trace) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();

    const PromptTemplates templates = load_templates(config);
    const CategorySet categories = CategorySet::defaults(embedder);
    const ToyExecutor executor;
    const AnswerMatchEvaluator evaluator;

    MemoryOptions mem_opts;
    mem_opts.capacity = config.capacity;
    mem_opts.dim = embedder.dim();
    mem_opts.deep_theta_gate = config.deep_theta_gate;
    HierarchicalMemory memory(mem_opts);
    InsightPool insights(InsightPoolOptions{config.insight_initial_weight,
                                            config.insight_max_per_category});

    const auto suite = generate_suite(config.seed, config.tasks_per_category);
    const auto split = split_suite(suite, config.seed);

    AgentContext ctx{memory,    embedder,
                     categories, llm,
                     executor,  evaluator,
                     templates, RetrievalSettings{config.k, config.theta},
                     CompletionSettings{config.llm_max_tokens, config.llm_temperature},
                     trace};

    BenchmarkOutcome outcome{MetricsReport{}, HierarchicalMemory(mem_opts), InsightPool{}, {}, {}};
    for (const auto& t : split.train) outcome.train_ids.push_back(t.id);
    for (const auto& t : split.test) outcome.test_ids.push_back(t.id);

    if (config.mode != BenchmarkMode::baseline) {
        const auto corpus = load_seed_corpus(config.seed_corpus);
        seed_memory(memory, categories, embedder, corpus, config.examples_per_category);
        for (const auto& task : split.train) run_task(task, ctx, config.attempts);
    }

    if (config.mode == BenchmarkMode::hmr_toel) {
        const auto records = memory.snapshot();
        for (std::uint32_t k = 0; k < categories.size(); ++k) {
            const CategoryId cat{k};
            const std::uint64_t seed = config.seed + k;
            const auto pairs = build_intra_pairs(records, cat, config.segment_length,
                                                 config.max_pairs, seed);
            const auto groups = build_cross_groups(records, cat, config.max_groups, seed);
            generate_insights(cat, pairs, groups, insights, llm, config.insight_rounds,
                              templates.insight, categories, ctx.completion, trace);
        }
    }

    MetricsReport& report = outcome.report;
    report.mode = config.mode;
    report.seed = config.seed;
    report.train_tasks = config.mode == BenchmarkMode::baseline ? 0 : split.train.size();
    for (const auto& label : categories.labels()) report.per_category.push_back(CategoryScore{label});

    const std::set<std::string> test_ids(outcome.test_ids.begin(), outcome.test_ids.end());
    for (const auto& rec : memory.snapshot()) {
        if (test_ids.contains(rec.task_id)) {
            throw std::logic_error("test task " + rec.task_id + " leaked into memory");
        }
    }

    for (const auto& task : split.test) {
        const Answer answer = solve(task, ctx, insights);
        const bool correct = answer.verdict.value_or(false);
        auto& score = report.per_category[categories.find(task.gold_category).value];
        ++score.total;
        ++report.total;
        if (correct) {
            ++score.correct;
            ++report.correct;
        }
    }
    for (auto& c : report.per_category) {
        c.accuracy = c.total ? static_cast<double>(c.correct) / static_cast<double>(c.total) : 0.0;
    }
    report.accuracy =
        report.total ? static_cast<double>(report.correct) / static_cast<double>(report.total) : 0.0;
    report.pool = memory.stats();
    for (std::uint32_t k = 0; k < categories.size(); ++k) {
        report.insight_counts.push_back(insights.size(CategoryId{k}));
    }
    report.insights_total = insights.size();
    report.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    if (!config.report_path.empty()) {
        std::ofstream out(config.report_path, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write report " + config.report_path.string());
        out << format_report(report);
    }
    if (!config.store_path.empty()) persist(config.store_path, memory, &insights);

    outcome.memory = std::move(memory);
    outcome.insights = std::move(insights);
    return outcome;
}

}  // namespace ehc
