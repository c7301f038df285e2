#include "ehc/insight.hpp"

#include <algorithm>
#include <charconv>
#include <random>

#include "ehc/errors.hpp"
#include "ehc/prompt_template.hpp"

namespace ehc {

// ---------------------------------------------------------------------------
// Op grammar

namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
    return out;
}

// Splits off the first whitespace-delimited token.
std::pair<std::string_view, std::string_view> next_token(std::string_view s) {
    s = trim(s);
    const auto end = s.find_first_of(" \t");
    if (end == std::string_view::npos) return {s, {}};
    return {s.substr(0, end), trim(s.substr(end))};
}

std::optional<InsightId> parse_id(std::string_view token) {
    if (token.empty()) return std::nullopt;
    InsightId id = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), id);
    if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
    return id;
}

std::optional<InsightOp> parse_line(std::string_view line) {
    const auto [keyword_raw, rest] = next_token(line);
    const std::string keyword = upper(keyword_raw);
    if (keyword == "ADD") {
        if (rest.empty()) return std::nullopt;
        return InsightOp::add(std::string(rest));
    }
    if (keyword == "EDIT") {
        const auto [id_tok, text] = next_token(rest);
        const auto id = parse_id(id_tok);
        if (!id || text.empty()) return std::nullopt;
        return InsightOp::edit(*id, std::string(text));
    }
    if (keyword == "UPVOTE" || keyword == "DOWNVOTE") {
        const auto [id_tok, extra] = next_token(rest);
        const auto id = parse_id(id_tok);
        if (!id || !extra.empty()) return std::nullopt;
        return keyword == "UPVOTE" ? InsightOp::upvote(*id) : InsightOp::downvote(*id);
    }
    return std::nullopt;
}

}  // namespace

ParsedOps parse_insight_ops(std::string_view llm_text) {
    ParsedOps out;
    std::size_t line_no = 0;
    for (auto raw : split_lines(llm_text)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty()) continue;
        if (auto op = parse_line(line)) {
            out.ops.push_back(std::move(*op));
        } else {
            out.warnings.push_back("line " + std::to_string(line_no) + ": cannot parse '" +
                                   std::string(line) + "'");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pool

InsightPool::InsightPool(InsightPoolOptions options) : options_(options) {
    if (options_.initial_weight < 1) throw ConfigError("insight initial weight must be at least 1");
    if (options_.max_per_category < 1) throw ConfigError("insight cap must be at least 1");
}

ChangeReport InsightPool::apply(CategoryId category, const InsightOp& op) {
    ChangeReport report;
    if (op.kind == InsightOp::Kind::add) {
        const InsightId id = next_id_++;
        insights_.emplace(id, Insight{id, category, op.text, options_.initial_weight});
        report.applied = true;
        report.added = id;
        return report;
    }

    auto it = insights_.find(op.target);
    if (it == insights_.end() || it->second.category != category) {
        report.warnings.push_back("no insight " + std::to_string(op.target) + " in this category");
        return report;
    }
    report.applied = true;
    switch (op.kind) {
        case InsightOp::Kind::edit:
            it->second.text = op.text;
            break;
        case InsightOp::Kind::upvote:
            ++it->second.weight;
            break;
        case InsightOp::Kind::downvote:
            if (--it->second.weight <= 0) {
                report.removed.push_back(it->first);
                insights_.erase(it);
            }
            break;
        case InsightOp::Kind::add:
            break;
    }
    return report;
}

std::vector<InsightId> InsightPool::enforce_cap(CategoryId category) {
    std::vector<InsightId> removed;
    while (size(category) > options_.max_per_category) {
        const Insight* victim = nullptr;
        for (const auto& [id, ins] : insights_) {
            if (ins.category != category) continue;
            if (!victim || ins.weight < victim->weight ||
                (ins.weight == victim->weight && ins.id > victim->id)) {
                victim = &ins;
            }
        }
        removed.push_back(victim->id);
        insights_.erase(victim->id);
    }
    return removed;
}

std::vector<Insight> InsightPool::for_category(CategoryId category) const {
    std::vector<Insight> out;
    for (const auto& [id, ins] : insights_) {
        if (ins.category == category) out.push_back(ins);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Insight& a, const Insight& b) { return a.weight > b.weight; });
    return out;
}

std::vector<Insight> InsightPool::all() const {
    std::vector<Insight> out;
    out.reserve(insights_.size());
    for (const auto& [id, ins] : insights_) out.push_back(ins);
    return out;
}

const Insight* InsightPool::find(InsightId id) const {
    auto it = insights_.find(id);
    return it == insights_.end() ? nullptr : &it->second;
}

std::size_t InsightPool::size(CategoryId category) const {
    return static_cast<std::size_t>(std::count_if(
        insights_.begin(), insights_.end(), [&](const auto& kv) { return kv.second.category == category; }));
}

InsightPool InsightPool::restore(InsightPoolOptions options, std::vector<Insight> insights,
                                 InsightId next_id) {
    InsightPool pool(options);
    for (auto& ins : insights) {
        if (ins.weight < 1) {
            throw UsageError("insight " + std::to_string(ins.id) + " has non-positive weight");
        }
        if (ins.id >= next_id) {
            throw UsageError("insight id " + std::to_string(ins.id) + " is not below next id " +
                             std::to_string(next_id));
        }
        const InsightId id = ins.id;
        if (!pool.insights_.emplace(id, std::move(ins)).second) {
            throw UsageError("duplicate insight id " + std::to_string(id));
        }
    }
    pool.next_id_ = next_id;
    return pool;
}

// ---------------------------------------------------------------------------
// Builders

bool is_success_kind(RecordKind kind) noexcept {
    return kind == RecordKind::success || kind == RecordKind::seed;
}

std::vector<ContrastPair> build_intra_pairs(std::span<const MemoryRecord> records,
                                            CategoryId category, std::size_t segment_length,
                                            std::size_t max_pairs, std::uint64_t seed) {
    std::vector<const MemoryRecord*> successes;
    std::vector<const MemoryRecord*> failures;
    for (const auto& r : records) {
        if (r.category != category) continue;
        if (r.kind == RecordKind::failure) {
            failures.push_back(&r);
        } else if (is_success_kind(r.kind)) {
            successes.push_back(&r);
        }
    }
    auto by_id = [](const MemoryRecord* a, const MemoryRecord* b) { return a->id < b->id; };
    std::sort(successes.begin(), successes.end(), by_id);
    std::sort(failures.begin(), failures.end(), by_id);

    std::vector<ContrastPair> pairs;
    if (successes.empty() || failures.empty() || segment_length == 0) return pairs;

    std::mt19937_64 rng(seed);
    const std::size_t count = std::min(max_pairs, failures.size());
    for (std::size_t i = 0; i < count; ++i) {
        const MemoryRecord& success = *successes[i % successes.size()];
        const MemoryRecord& failure = *failures[i];
        const auto steps = parse_trajectory(success.content).trajectory.steps;
        const std::size_t len = std::min(segment_length, steps.size());
        const std::size_t starts = steps.size() - len + 1;
        const std::size_t start = static_cast<std::size_t>(rng() % starts);

        ContrastPair pair;
        pair.category = category;
        pair.success_id = success.id;
        pair.success_segment.assign(steps.begin() + static_cast<std::ptrdiff_t>(start),
                                    steps.begin() + static_cast<std::ptrdiff_t>(start + len));
        pair.failure_id = failure.id;
        pair.failure_trajectory = parse_trajectory(failure.content).trajectory;
        pair.failure_reflections = failure.reflections.value_or("");
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

std::vector<CrossGroup> build_cross_groups(std::span<const MemoryRecord> records,
                                           CategoryId category, std::size_t max_groups,
                                           std::uint64_t seed) {
    std::map<CategoryId, std::vector<const MemoryRecord*>> successes;
    for (const auto& r : records) {
        if (is_success_kind(r.kind)) successes[r.category].push_back(&r);
    }
    for (auto& [cat, list] : successes) {
        std::sort(list.begin(), list.end(),
                  [](const MemoryRecord* a, const MemoryRecord* b) { return a->id < b->id; });
    }

    std::vector<CrossGroup> groups;
    auto own_it = successes.find(category);
    if (own_it == successes.end()) return groups;
    std::vector<CategoryId> partners;
    for (const auto& [cat, list] : successes) {
        if (cat != category) partners.push_back(cat);
    }
    if (partners.empty()) return groups;

    std::mt19937_64 rng(seed);
    const auto& own = own_it->second;
    for (std::size_t g = 0; g < max_groups; ++g) {
        const CategoryId partner = partners[g % partners.size()];
        const auto& theirs = successes[partner];
        const MemoryRecord& mine = *own[rng() % own.size()];
        const MemoryRecord& other = *theirs[rng() % theirs.size()];
        groups.push_back(CrossGroup{category, mine.id, parse_trajectory(mine.content).trajectory,
                                    partner, other.id, parse_trajectory(other.content).trajectory});
    }
    return groups;
}

// ---------------------------------------------------------------------------
// Generation

namespace {

void append_steps(std::string& out, std::span<const Step> steps) {
    for (const auto& s : steps) {
        out += "  Action: " + s.action + '\n';
        if (!s.observation.empty()) out += "  Observation: " + s.observation + '\n';
    }
}

std::string render_pool(const InsightPool& pool, CategoryId category) {
    const auto insights = pool.for_category(category);
    if (insights.empty()) return "(none)\n";
    std::string out;
    for (const auto& ins : insights) {
        out += '[' + std::to_string(ins.id) + "] (weight " + std::to_string(ins.weight) + ") " +
               ins.text + '\n';
    }
    return out;
}

std::string render_pairs(std::span<const ContrastPair> pairs) {
    if (pairs.empty()) return "(none)\n";
    std::string out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        out += "Pair " + std::to_string(i + 1) + ":\nSuccessful steps:\n";
        append_steps(out, p.success_segment);
        out += "Failed attempt:\n";
        append_steps(out, p.failure_trajectory.steps);
        if (!p.failure_trajectory.final_answer.empty()) {
            out += "  Answer: " + p.failure_trajectory.final_answer + '\n';
        }
        out += "Reflections:\n" + p.failure_reflections + '\n';
    }
    return out;
}

std::string render_groups(std::span<const CrossGroup> groups, const CategorySet& categories) {
    if (groups.empty()) return "(none)\n";
    std::string out;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& g = groups[i];
        out += "Group " + std::to_string(i + 1) + " (" + categories.label(g.category) + " vs " +
               categories.label(g.other_category) + "):\n" + categories.label(g.category) +
               " success:\n";
        append_steps(out, g.own_success.steps);
        out += categories.label(g.other_category) + " success:\n";
        append_steps(out, g.other_success.steps);
    }
    return out;
}

template <typename T>
std::span<const T> chunk(std::span<const T> all, int rounds, int round) {
    const std::size_t per = (all.size() + static_cast<std::size_t>(rounds) - 1) /
                            static_cast<std::size_t>(rounds);
    const std::size_t begin = std::min(all.size(), per * static_cast<std::size_t>(round));
    const std::size_t end = std::min(all.size(), begin + per);
    return all.subspan(begin, end - begin);
}

}  // namespace

InsightGenerationReport generate_insights(CategoryId category, std::span<const ContrastPair> pairs,
                                          std::span<const CrossGroup> groups, InsightPool& pool,
                                          CompletionBackend& llm, int rounds,
                                          std::string_view insight_template,
                                          const CategorySet& categories,
                                          const CompletionSettings& settings, RunTrace* trace) {
    if (rounds < 1) throw UsageError("generate_insights: rounds must be at least 1");
    InsightGenerationReport report;
    for (int round = 0; round < rounds; ++round) {
        const std::string prompt = render_template(
            insight_template, {{"category", categories.label(category)},
                               {"insights", render_pool(pool, category)},
                               {"pairs", render_pairs(chunk(pairs, rounds, round))},
                               {"groups", render_groups(chunk(groups, rounds, round), categories)}});
        if (trace) trace->add("insight.prompt", prompt);

        std::string completion;
        try {
            completion = llm.complete(prompt, settings);
        } catch (const BackendError& e) {
            throw BackendError("insight round " + std::to_string(round) + ": " + e.what(), e.status());
        }
        if (trace) trace->add("insight.completion", completion);

        auto parsed = parse_insight_ops(completion);
        for (auto& w : parsed.warnings) report.warnings.push_back(std::move(w));
        for (const auto& op : parsed.ops) {
            auto change = pool.apply(category, op);
            if (change.applied) ++report.ops_applied;
            for (auto& w : change.warnings) report.warnings.push_back(std::move(w));
        }
        pool.enforce_cap(category);
    }
    if (trace) {
        for (const auto& w : report.warnings) trace->add("insight.warning", w);
    }
    return report;
}

}  // namespace ehc
