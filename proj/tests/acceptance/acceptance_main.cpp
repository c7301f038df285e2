// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "ehc/benchmark.hpp"
#include "ehc/category.hpp"
#include "ehc/errors.hpp"
#include "ehc/experience.hpp"
#include "ehc/insight.hpp"
#include "ehc/llm.hpp"
#include "ehc/memory.hpp"
#include "ehc/store_file.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "stub_server.hpp"

namespace {

using namespace ehc;
using Clock = std::chrono::steady_clock;

struct CriterionResult {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double unit_interval(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<RecordId> to_ids(const std::set<std::uint64_t>& s) { return {s.begin(), s.end()}; }

std::vector<RecordId> fast_set(const HierarchicalMemory& m) {
    auto ids = m.fast_ids_by_recency();
    std::sort(ids.begin(), ids.end());
    return ids;
}

MemoryRecord bare_record(RecordId id, std::uint32_t category, std::vector<double> embedding) {
    MemoryRecord r;
    r.id = id;
    r.category = CategoryId{category};
    r.content = "r" + std::to_string(id);
    r.embedding = EmbeddingVector(std::move(embedding));
    return r;
}

bool same_entries(const std::vector<RetrievalEntry>& got, const std::vector<oracle::TieredMemory::Hit>& want) {
    if (got.size() != want.size()) return false;
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (got[i].record.id != want[i].id || got[i].similarity != want[i].similarity ||
            (got[i].tier == Tier::fast) != want[i].fast) {
            return false;
        }
    }
    return true;
}

// Shared by criteria 1 and 3: a random store/retrieve/promote sequence run
// against the library and the oracle side by side.
struct SequenceResult {
    std::size_t mismatches = 0;
    std::size_t conservation_failures = 0;
    std::size_t ops = 0;
};

SequenceResult run_sequence(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t capacity = 2 + rng() % 15;
    const std::size_t n_ops = 1 + rng() % 1000;
    constexpr std::size_t dim = 4;
    HierarchicalMemory mem(MemoryOptions{capacity, dim, false});
    oracle::TieredMemory ref(capacity);
    std::multiset<RecordId> stored;
    SequenceResult out;
    RecordId next = 1;

    for (std::size_t op = 0; op < n_ops; ++op) {
        const auto roll = rng() % 10;
        if (roll < 6) {
            const RecordId id = next++;
            const auto cat = static_cast<std::uint32_t>(rng() % 3);
            auto emb = oracle::coarse_vector(rng, dim, 2);
            const auto got = mem.store(bare_record(id, cat, emb)).evicted_ids;
            const auto want = ref.store(id, cat, emb);
            stored.insert(id);
            out.mismatches += got != want;
        } else if (roll < 9) {
            const auto query = oracle::coarse_vector(rng, dim, 2);
            const std::size_t k = 1 + rng() % 4;
            const double theta = unit_interval(rng);
            std::optional<std::uint32_t> cat;
            if (rng() % 2) cat = static_cast<std::uint32_t>(rng() % 3);
            std::optional<CategoryId> lib_cat;
            if (cat) lib_cat = CategoryId{*cat};
            const auto got = mem.retrieve(EmbeddingVector(query), lib_cat, k, theta);
            const auto want = ref.retrieve(query, cat, k, theta);
            out.mismatches += !same_entries(got.entries, want);
        } else {
            const auto deep = mem.deep_ids();
            if (deep.empty()) continue;
            const RecordId id = deep[rng() % deep.size()];
            out.mismatches += mem.promote(id) != ref.promote(id);
        }
        ++out.ops;
        out.mismatches += fast_set(mem) != to_ids(ref.ids(true));
    }

    // Conservation and counter reconciliation.
    const auto fast = fast_set(mem);
    const auto deep = mem.deep_ids();
    std::multiset<RecordId> all(fast.begin(), fast.end());
    all.insert(deep.begin(), deep.end());
    std::vector<RecordId> overlap;
    std::set_intersection(fast.begin(), fast.end(), deep.begin(), deep.end(), std::back_inserter(overlap));
    const auto s = mem.stats();
    const bool ok = all == stored && overlap.empty() && mem.size() == stored.size() &&
                    s.fast_count <= capacity && s.evictions_total == ref.evictions &&
                    s.promotions_total == ref.promotions && s.fast_hits == ref.fast_hits &&
                    s.deep_hits == ref.deep_hits && to_ids(ref.ids(false)) == deep;
    out.conservation_failures += !ok;
    return out;
}

std::vector<SequenceResult> g_sequences;
double g_sequence_seconds = 0.0;

void run_all_sequences() {
    if (!g_sequences.empty()) return;
    const auto start = Clock::now();
    for (std::uint64_t seed = 0; seed < 200; ++seed) g_sequences.push_back(run_sequence(seed));
    g_sequence_seconds = seconds_since(start);
}

CriterionResult lru_oracle() {
    run_all_sequences();
    std::size_t mismatches = 0, ops = 0;
    for (const auto& r : g_sequences) {
        mismatches += r.mismatches;
        ops += r.ops;
    }
    std::ostringstream d;
    d << "200 sequences, " << ops << " ops, " << mismatches << " mismatches, " << g_sequence_seconds << " s";
    return {mismatches == 0 && g_sequence_seconds < 30.0, d.str()};
}

CriterionResult retrieval_oracle() {
    const auto start = Clock::now();
    std::size_t mismatches = 0, queries = 0;
    for (std::uint64_t inst = 0; inst < 200; ++inst) {
        std::mt19937_64 rng(10'000 + inst);
        const std::size_t dim = 2 + rng() % 3;
        const std::size_t capacity = 2 + rng() % 31;
        const std::size_t n = rng() % 501;
        const bool gate = inst % 2 == 1;
        HierarchicalMemory mem(MemoryOptions{capacity, dim, gate});
        oracle::TieredMemory ref(capacity, gate);
        for (RecordId id = 1; id <= n; ++id) {
            const auto cat = static_cast<std::uint32_t>(rng() % 3);
            auto emb = oracle::coarse_vector(rng, dim, 2);
            mem.store(bare_record(id, cat, emb));
            ref.store(id, cat, emb);
        }
        for (int q = 0; q < 5; ++q) {
            const auto query = oracle::coarse_vector(rng, dim, 2);
            const std::size_t k = 1 + rng() % 10;
            const double theta = unit_interval(rng);
            std::optional<std::uint32_t> cat;
            if (rng() % 2) cat = static_cast<std::uint32_t>(rng() % 3);
            std::optional<CategoryId> lib_cat;
            if (cat) lib_cat = CategoryId{*cat};
            const auto peeked = mem.peek(EmbeddingVector(query), lib_cat, k, theta);
            const auto got = mem.retrieve(EmbeddingVector(query), lib_cat, k, theta);
            const auto want = ref.retrieve(query, cat, k, theta);
            mismatches += !same_entries(got.entries, want) || !same_entries(peeked.entries, want);
            ++queries;
        }
    }
    const double secs = seconds_since(start);
    std::ostringstream d;
    d << "200 instances, " << queries << " queries, " << mismatches << " mismatches, " << secs << " s";
    return {mismatches == 0 && secs < 30.0, d.str()};
}

CriterionResult conservation() {
    run_all_sequences();
    std::size_t failures = 0;
    for (const auto& r : g_sequences) failures += r.conservation_failures;
    return {failures == 0, std::to_string(failures) + " of 200 sequences violate conservation or counters"};
}

std::string random_string(std::mt19937_64& rng) {
    static const std::vector<std::string> pieces = {
        "judgment", "counting", "recognition", "comparison", "addition", "removal", "replacement",
        "count", "object", "task", "of", "the", "COUNTING", "Replace", "add", "compare", "42",
        " ", " ", "  ", "\t", "\n", ",", ".", "-", "_", "!", "\"", "\xc3\xa9", "\xe6\x97\xa5\xe6\x9c\xac",
        "\xf0\x9f\x98\x80", "\xff", "\x01"};
    std::string s;
    const auto kind = rng() % 4;
    if (kind == 0) {
        for (std::size_t i = 0, n = rng() % 20; i < n; ++i) s += static_cast<char>(rng() % 256);
    } else {
        for (std::size_t i = 0, n = rng() % 8; i < n; ++i) s += pieces[rng() % pieces.size()];
    }
    return s;
}

CriterionResult classifier_oracle() {
    ReferenceEmbedder embedder;
    const auto categories = CategorySet::defaults(embedder);
    std::vector<std::vector<double>> labels;
    for (const auto& l : categories.labels()) labels.push_back(oracle::embed(l));

    std::mt19937_64 rng(2024);
    std::vector<std::string> inputs = {"", "\xc3\xa9\xc3\xa8", "\xe6\x97\xa5\xe6\x9c\xac\xe8\xaa\x9e"};
    while (inputs.size() < 1000) inputs.push_back(random_string(rng));

    std::size_t out_of_set = 0, disagreements = 0;
    for (const auto& s : inputs) {
        const auto got = classify(s, categories, embedder);
        out_of_set += got.category.value >= 7;
        const auto q = oracle::embed(s);
        std::size_t best = 0;
        double best_sim = oracle::cosine(q, labels[0]);
        for (std::size_t k = 1; k < labels.size(); ++k) {
            const double sim = oracle::cosine(q, labels[k]);
            if (sim > best_sim) {
                best = k;
                best_sim = sim;
            }
        }
        disagreements += got.category.value != best || got.similarity != best_sim;
    }
    std::ostringstream d;
    d << inputs.size() << " strings, " << out_of_set << " outside the set, " << disagreements
      << " disagreements";
    return {out_of_set == 0 && disagreements == 0, d.str()};
}

CriterionResult insight_lifecycle() {
    std::vector<std::string> problems;
    const CategoryId cat{3};
    for (int w0 = 1; w0 <= 5; ++w0) {
        const auto tag = "W0=" + std::to_string(w0) + ": ";
        {
            InsightPool pool(InsightPoolOptions{w0, 20});
            const auto id = *pool.apply(cat, InsightOp::add("rule")).added;
            for (int i = 0; i < w0 - 1; ++i) pool.apply(cat, InsightOp::downvote(id));
            if (!pool.find(id)) problems.push_back(tag + "removed before W0 downvotes");
            const auto last = pool.apply(cat, InsightOp::downvote(id));
            if (pool.find(id) || last.removed != std::vector<InsightId>{id}) {
                problems.push_back(tag + "survived W0 downvotes");
            }
        }
        {
            // Net count: one upvote buys one extra downvote.
            InsightPool pool(InsightPoolOptions{w0, 20});
            const auto id = *pool.apply(cat, InsightOp::add("rule")).added;
            pool.apply(cat, InsightOp::upvote(id));
            for (int i = 0; i < w0; ++i) pool.apply(cat, InsightOp::downvote(id));
            if (!pool.find(id)) problems.push_back(tag + "net count ignores upvote");
            pool.apply(cat, InsightOp::downvote(id));
            if (pool.find(id)) problems.push_back(tag + "survived net W0 downvotes");
        }
        {
            InsightPool pool(InsightPoolOptions{w0, 20});
            const auto id = *pool.apply(cat, InsightOp::add("before")).added;
            pool.apply(cat, InsightOp::upvote(id));
            pool.apply(cat, InsightOp::edit(id, "after"));
            const auto* ins = pool.find(id);
            if (!ins || ins->weight != w0 + 1 || ins->text != "after") {
                problems.push_back(tag + "EDIT changed weight or dropped text");
            }
            const auto before = pool.all();
            for (const auto& op : {InsightOp::edit(999, "x"), InsightOp::upvote(999), InsightOp::downvote(999)}) {
                const auto r = pool.apply(cat, op);
                if (r.applied || r.warnings.empty()) problems.push_back(tag + "missing id not warned");
            }
            const auto foreign = pool.apply(CategoryId{4}, InsightOp::downvote(id));
            if (foreign.applied || foreign.warnings.empty()) problems.push_back(tag + "foreign id not warned");
            if (pool.all() != before) problems.push_back(tag + "skipped op changed the pool");
        }
    }
    std::string detail = problems.empty() ? "W0 1..5: remove at W0, survive at W0-1, EDIT keeps weight, skips warn"
                                          : problems.front();
    return {problems.empty(), detail};
}

CriterionResult reflection_recursion() {
    using nlohmann::json;
    auto rule = [](const std::string& pattern, const std::string& response, int max_uses) {
        json r = {{"match", "substring"}, {"pattern", pattern}, {"response", response}};
        if (max_uses) r["max_uses"] = max_uses;
        return r;
    };
    testing::AgentHarness h(json{{"rules",
                              {rule("Instruction:", "counting", 0),
                               rule("gave a wrong result", "segment one", 1),
                               rule("gave a wrong result", "segment two", 1),
                               rule("gave a wrong result", "segment three", 1),
                               rule("Reflections on earlier failed attempts", "COUNT", 0)}}});
    auto ctx = h.context();
    const auto exp = run_task(testing::red_cube_task(), ctx, 3);
    const auto events = h.trace.events_for("collect.reflections");
    const std::vector<std::string> want = {"segment one", "segment one\nsegment two",
                                           "segment one\nsegment two\nsegment three"};
    bool ok = exp.outcome == Outcome::failure && exp.attempts_used == 3 && events.size() == 3 &&
              exp.reflections == want[2];
    for (std::size_t i = 0; ok && i < 3; ++i) ok = events[i].detail == want[i];
    const auto* rec = h.memory.find(exp.record_id);
    ok = ok && rec && rec->kind == RecordKind::failure && rec->reflections == want[2];
    const auto segments = std::count(exp.reflections.begin(), exp.reflections.end(), '\n') + 1;
    return {ok, std::to_string(segments) + " segments in generation order, " +
                    std::to_string(events.size()) + " trace steps"};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

CriterionResult persistence_round_trip() {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "ehc_acceptance_store";
    fs::create_directories(dir);
    std::size_t byte_mismatches = 0, retrieval_mismatches = 0;
    for (std::uint64_t state = 0; state < 50; ++state) {
        std::mt19937_64 rng(500 + state);
        const std::size_t capacity = 2 + rng() % 15;
        constexpr std::size_t dim = 16;
        HierarchicalMemory mem(MemoryOptions{capacity, dim, state % 5 == 0});
        InsightPool pool;
        const std::size_t n = rng() % 60;
        for (RecordId id = 1; id <= n; ++id) {
            const auto kind = static_cast<RecordKind>(rng() % 3);
            auto r = testing::make_record(id, EmbeddingVector(oracle::random_unit(rng, dim)),
                                          static_cast<std::uint32_t>(rng() % 7), kind);
            r.content = "Question: q" + std::to_string(id) + " \"quoted\" \xc3\xa9\nAction: COUNT\n";
            if (rng() % 2) r.task_id = "task-" + std::to_string(rng() % 100);
            mem.store(std::move(r));
            if (rng() % 4 == 0) {
                mem.retrieve(EmbeddingVector(oracle::random_unit(rng, dim)), std::nullopt, 1 + rng() % 4,
                             unit_interval(rng) - 0.5);
            }
            if (rng() % 5 == 0) {
                const auto cat = CategoryId{static_cast<std::uint32_t>(rng() % 7)};
                pool.apply(cat, InsightOp::add("insight " + std::to_string(id)));
                const auto all = pool.all();
                if (!all.empty()) pool.apply(all[rng() % all.size()].category, InsightOp::upvote(all[rng() % all.size()].id));
            }
        }
        const auto a = dir / "a.jsonl", b = dir / "b.jsonl";
        persist(a, mem, &pool);
        auto loaded = load(a);
        persist(b, loaded.memory, &loaded.insights);
        byte_mismatches += slurp(a) != slurp(b);

        for (int q = 0; q < 5; ++q) {
            const EmbeddingVector query(oracle::random_unit(rng, dim));
            const double theta = unit_interval(rng) - 0.5;
            const auto x = mem.retrieve(query, std::nullopt, 3, theta).entries;
            const auto y = loaded.memory.retrieve(query, std::nullopt, 3, theta).entries;
            bool same = x.size() == y.size();
            for (std::size_t i = 0; same && i < x.size(); ++i) {
                same = x[i].record == y[i].record && x[i].similarity == y[i].similarity && x[i].tier == y[i].tier;
            }
            retrieval_mismatches += !same;
        }
        persist(a, mem, &pool);
        persist(b, loaded.memory, &loaded.insights);
        byte_mismatches += slurp(a) != slurp(b);
    }
    fs::remove_all(dir);
    std::ostringstream d;
    d << "50 states, " << byte_mismatches << " byte mismatches, " << retrieval_mismatches
      << " retrieval mismatches";
    return {byte_mismatches == 0 && retrieval_mismatches == 0, d.str()};
}

CriterionResult ablation_ordering() {
    const auto start = Clock::now();
    auto base = BenchmarkConfig::load(default_data_dir() / "demo.conf");
    base.seed = 42;
    base.tasks_per_category = 10;
    std::vector<double> acc;
    bool reproducible = true;
    for (auto mode : {BenchmarkMode::baseline, BenchmarkMode::hmr, BenchmarkMode::hmr_toel}) {
        auto c = base;
        c.mode = mode;
        std::string reports[2], stores[2];
        for (int rep = 0; rep < 2; ++rep) {
            const auto out = run_benchmark(c);
            reports[rep] = format_report(out.report);
            std::ostringstream store;
            write_store(store, out.memory, &out.insights);
            stores[rep] = store.str();
            if (rep == 0) acc.push_back(out.report.accuracy);
        }
        reproducible = reproducible && reports[0] == reports[1] && stores[0] == stores[1];
    }
    const double secs = seconds_since(start);
    std::ostringstream d;
    d << "baseline " << acc[0] << " < hmr " << acc[1] << " < hmr_toel " << acc[2]
      << (reproducible ? ", reproducible" : ", NOT reproducible") << ", " << secs << " s";
    return {acc[0] < acc[1] && acc[1] < acc[2] && reproducible && secs < 60.0, d.str()};
}

// Golden value from the first verified run of this workload.
constexpr double kFrozenHotSetHitRate = 0.875;

CriterionResult hot_set() {
    constexpr std::size_t capacity = 32, dim = 256, records = 200, hot = 8, queries = 200;
    std::mt19937_64 rng(9);
    HierarchicalMemory mem(MemoryOptions{capacity, dim, false});
    oracle::TieredMemory ref(capacity);
    std::vector<std::vector<double>> raw;
    std::vector<EmbeddingVector> embeddings;
    // Hot records go in first, so they have been demoted by the time queries start.
    for (RecordId id = 1; id <= records; ++id) {
        auto v = oracle::random_unit(rng, dim);
        raw.push_back(v);
        embeddings.emplace_back(v);
        ref.store(id, 0, v);
        mem.store(bare_record(id, 0, std::move(v)));
    }
    for (std::size_t q = 0; q < queries; ++q) {
        const std::size_t target = rng() % 10 < 9 ? rng() % hot : hot + rng() % (records - hot);
        mem.retrieve(embeddings[target], std::nullopt, 1, 0.7);
        ref.retrieve(raw[target], std::nullopt, 1, 0.7);
    }
    const auto s = mem.stats();
    const double rate = static_cast<double>(s.fast_hits) / static_cast<double>(s.fast_hits + s.deep_hits);
    std::ostringstream d;
    d.precision(17);
    d << "hit rate " << rate << " (fast " << s.fast_hits << ", deep " << s.deep_hits << "), frozen "
      << kFrozenHotSetHitRate;
    const bool oracle_agrees = ref.fast_hits == s.fast_hits && ref.deep_hits == s.deep_hits;
    if (!oracle_agrees) d << ", oracle disagrees (fast " << ref.fast_hits << ", deep " << ref.deep_hits << ")";
    return {rate > 0.8 && rate == kFrozenHotSetHitRate && oracle_agrees, d.str()};
}

CriterionResult http_contract() {
    using testing::StubServer;
    auto endpoint = [](const StubServer& s) {
        HttpEndpoint ep;
        ep.url = s.url();
        ep.model = "stub";
        ep.retries = 2;
        ep.backoff = std::chrono::milliseconds(1);
        ep.timeout = std::chrono::seconds(5);
        return ep;
    };
    std::vector<std::string> problems;

    StubServer ok([](const httplib::Request&, httplib::Response& res, int) {
        res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"COUNT"}}]})", "application/json");
    });
    if (HttpBackend(endpoint(ok)).complete("p", 16, 0.0) != "COUNT" || ok.calls() != 1) {
        problems.push_back("happy path");
    }

    StubServer failing([](const httplib::Request&, httplib::Response& res, int) {
        res.status = 500;
        res.set_content("{}", "application/json");
    });
    try {
        HttpBackend(endpoint(failing)).complete("p", 16, 0.0);
        problems.push_back("500 did not throw");
    } catch (const ProtocolError&) {
        problems.push_back("500 raised a protocol error");
    } catch (const BackendError& e) {
        if (e.status() != 500 || failing.calls() != 3) problems.push_back("500: wrong status or retry count");
    }

    StubServer malformed([](const httplib::Request&, httplib::Response& res, int) {
        res.set_content(R"({"choices":[]})", "application/json");
    });
    try {
        HttpBackend(endpoint(malformed)).complete("p", 16, 0.0);
        problems.push_back("malformed body accepted");
    } catch (const ProtocolError&) {
    } catch (const BackendError&) {
        problems.push_back("malformed body: not a protocol error");
    }
    return {problems.empty(), problems.empty() ? "happy path, 500 after 3 tries, protocol error" : problems.front()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<CriterionResult()>>> criteria = {
        {"lru-oracle-equivalence", lru_oracle},
        {"retrieval-oracle-equivalence", retrieval_oracle},
        {"conservation", conservation},
        {"classifier-closed-world", classifier_oracle},
        {"insight-lifecycle", insight_lifecycle},
        {"reflection-recursion", reflection_recursion},
        {"persistence-round-trip", persistence_round_trip},
        {"ablation-ordering", ablation_ordering},
        {"hot-set-hit-rate", hot_set},
        {"http-backend-contract", http_contract},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        CriterionResult v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += !v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << ' ' << (i + 1) << ' ' << criteria[i].first << ": "
                  << v.detail << std::endl;
    }
    std::cout << (failures ? "FAILED " : "ALL PASSED ") << criteria.size() - failures << '/'
              << criteria.size() << std::endl;
    return failures ? 1 : 0;
}
