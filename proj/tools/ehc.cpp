// ehc: benchmark runner and memory-store tooling.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "ehc/benchmark.hpp"
#include "ehc/errors.hpp"
#include "ehc/experience.hpp"
#include "ehc/store_file.hpp"
#include "ehc/suite.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;
constexpr int kExitFormat = 4;

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    bool trace = false;
};

ehc::BenchmarkConfig resolve_config(const GlobalOptions& g) {
    auto config = g.config_path.empty() ? ehc::BenchmarkConfig::defaults()
                                        : ehc::BenchmarkConfig::load(g.config_path);
    if (g.seed) config.seed = *g.seed;
    return config;
}

std::string first_line(const std::string& s) {
    const auto nl = s.find('\n');
    return nl == std::string::npos ? s : s.substr(0, nl);
}

int cmd_run(const GlobalOptions& g, const std::string& mode, const std::string& report,
            const std::string& store) {
    auto config = resolve_config(g);
    if (!mode.empty()) config.mode = ehc::parse_mode(mode);
    if (!report.empty()) config.report_path = report;
    if (!store.empty()) config.store_path = store;

    ehc::RunTrace trace(g.trace ? &std::cerr : nullptr);
    auto llm = ehc::make_backend(config, g.trace ? &std::cerr : nullptr);
    auto embedder = ehc::make_embedder(config);
    const auto outcome = ehc::run_benchmark(config, *llm, *embedder, &trace);
    std::cout << ehc::format_report(outcome.report);
    ehc::print_summary(std::cerr, outcome.report);
    return 0;
}

int cmd_suite(const GlobalOptions& g, std::optional<std::size_t> per_category,
              const std::string& out_path) {
    auto config = resolve_config(g);
    const auto tasks = ehc::generate_suite(config.seed, per_category.value_or(config.tasks_per_category));
    if (out_path.empty()) {
        ehc::write_suite(std::cout, tasks);
    } else {
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        if (!out) throw ehc::ConfigError("cannot write " + out_path);
        ehc::write_suite(out, tasks);
    }
    return 0;
}

int cmd_seed(const GlobalOptions& g, const std::string& store_path,
             std::optional<std::size_t> per_category) {
    const auto config = resolve_config(g);
    auto embedder = ehc::make_embedder(config);
    const auto categories = ehc::CategorySet::defaults(*embedder);
    ehc::HierarchicalMemory memory(
        ehc::MemoryOptions{config.capacity, embedder->dim(), config.deep_theta_gate});
    const auto corpus = ehc::load_seed_corpus(config.seed_corpus);
    const auto n = ehc::seed_memory(memory, categories, *embedder, corpus,
                                    per_category.value_or(config.examples_per_category));
    ehc::persist(store_path, memory);
    std::cout << "stored " << n << " seed records in " << store_path << '\n';
    return 0;
}

int cmd_inspect(const GlobalOptions& g, const std::string& store_path, const std::string& query,
                std::size_t k, const std::string& category) {
    const auto config = resolve_config(g);
    const auto loaded = ehc::load(store_path);
    const auto& memory = loaded.memory;
    auto embedder = ehc::make_embedder(config);
    const auto categories = ehc::CategorySet::defaults(*embedder);
    auto label = [&](ehc::CategoryId id) {
        return id.value < categories.size() ? categories.label(id) : "#" + std::to_string(id.value);
    };

    if (!query.empty()) {
        std::optional<ehc::CategoryId> scope;
        if (!category.empty()) scope = categories.find(category);
        if (embedder->dim() != memory.dim()) {
            throw ehc::ConfigError("embedder dim " + std::to_string(embedder->dim()) +
                                   " does not match store dim " + std::to_string(memory.dim()));
        }
        const auto result = memory.peek(embedder->embed(query), scope, k, config.theta);
        std::cout << "top " << k << " for \"" << query << "\" (theta " << config.theta << ", dry run)\n";
        std::size_t rank = 0;
        for (const auto& e : result.entries) {
            std::cout << std::setw(3) << ++rank << ". record " << e.record.id << " [" << to_string(e.tier)
                      << "] " << label(e.record.category) << '/' << to_string(e.record.kind)
                      << " sim " << std::fixed << std::setprecision(4) << e.similarity << "  "
                      << first_line(e.record.content) << '\n';
            std::cout.unsetf(std::ios::fixed);
        }
        if (result.entries.empty()) std::cout << "  (no matches)\n";
        return 0;
    }

    const auto stats = memory.stats();
    std::cout << "store " << store_path << ": capacity " << memory.capacity() << ", dim "
              << memory.dim() << ", clock " << memory.clock() << '\n';
    std::cout << "records " << memory.size() << " (fast " << stats.fast_count << ", deep "
              << stats.deep_count << ")\n";
    std::map<ehc::RecordKind, std::size_t> kinds;
    std::map<ehc::CategoryId, std::map<ehc::Tier, std::size_t>> tiers;
    for (const auto& r : memory.snapshot()) {
        ++kinds[r.kind];
        ++tiers[r.category][*memory.tier_of(r.id)];
    }
    std::cout << "kinds: seed " << kinds[ehc::RecordKind::seed] << ", success "
              << kinds[ehc::RecordKind::success] << ", failure " << kinds[ehc::RecordKind::failure]
              << '\n';
    for (auto& [cat, counts] : tiers) {
        std::cout << "  " << std::left << std::setw(12) << label(cat) << std::right << " fast "
                  << counts[ehc::Tier::fast] << ", deep " << counts[ehc::Tier::deep] << '\n';
    }
    std::cout << "counters: evictions " << stats.evictions_total << ", promotions "
              << stats.promotions_total << ", fast hits " << stats.fast_hits << ", deep hits "
              << stats.deep_hits << '\n';
    std::cout << "insights " << loaded.insights.size() << '\n';
    for (const auto& ins : loaded.insights.all()) {
        std::cout << "  [" << ins.id << "] " << label(ins.category) << " w" << ins.weight << ' '
                  << ins.text << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-tier agent memory with category-oriented experiential learning"};
    app.require_subcommand(1);
    GlobalOptions g;
    std::uint64_t seed_value = 0;
    app.add_option("--config", g.config_path, "Key/value config file")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed_value, "Override the suite seed");
    app.add_flag("--trace", g.trace, "Echo every pipeline stage to stderr");

    std::string mode;
    std::string report;
    std::string store;
    auto* run = app.add_subcommand("run", "Run the benchmark in one mode");
    run->add_option("--mode", mode, "baseline | hmr | hmr_toel");
    run->add_option("--report", report, "Write the report file here");
    run->add_option("--store", store, "Persist the final memory here");

    std::optional<std::size_t> per_category;
    std::string out_path;
    auto* suite = app.add_subcommand("suite", "Print the generated task suite as JSON lines");
    suite->add_option("--tasks-per-category", per_category);
    suite->add_option("--out", out_path);

    std::string inspect_store;
    std::string query;
    std::size_t k = 5;
    std::string category;
    auto* inspect = app.add_subcommand("inspect", "Summarize a store file or dry-run a query");
    inspect->add_option("store", inspect_store, "Store file")->required();
    inspect->add_option("--query", query, "Text to retrieve against (no state change)");
    inspect->add_option("-k", k, "Number of results")->check(CLI::PositiveNumber);
    inspect->add_option("--category", category, "Restrict the query to one category");

    std::string seed_store;
    std::optional<std::size_t> seed_per_category;
    auto* seed = app.add_subcommand("seed", "Write a store holding only seed exemplars");
    seed->add_option("store", seed_store, "Output store file")->required();
    seed->add_option("--examples-per-category", seed_per_category);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    if (*seed_opt) g.seed = seed_value;

    try {
        if (*run) return cmd_run(g, mode, report, store);
        if (*suite) return cmd_suite(g, per_category, out_path);
        if (*inspect) return cmd_inspect(g, inspect_store, query, k, category);
        if (*seed) return cmd_seed(g, seed_store, seed_per_category);
    } catch (const ehc::FormatError& e) {
        std::cerr << "ehc: store format error: " << e.what() << '\n';
        return kExitFormat;
    } catch (const ehc::BackendError& e) {
        std::cerr << "ehc: backend error: " << e.what() << '\n';
        return kExitBackend;
    } catch (const ehc::Error& e) {
        std::cerr << "ehc: configuration error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
