#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ehc/category.hpp"
#include "ehc/llm.hpp"
#include "ehc/memory.hpp"
#include "ehc/trace.hpp"
#include "ehc/trajectory.hpp"

namespace ehc {

using InsightId = std::uint64_t;

struct Insight {
    InsightId id = 0;
    CategoryId category;
    std::string text;
    int weight = 0;

    friend bool operator==(const Insight&, const Insight&) = default;
};

struct InsightOp {
    enum class Kind { add, edit, upvote, downvote };

    Kind kind = Kind::add;
    InsightId target = 0;  // edit / upvote / downvote
    std::string text;      // add / edit

    static InsightOp add(std::string text) { return {Kind::add, 0, std::move(text)}; }
    static InsightOp edit(InsightId id, std::string text) { return {Kind::edit, id, std::move(text)}; }
    static InsightOp upvote(InsightId id) { return {Kind::upvote, id, {}}; }
    static InsightOp downvote(InsightId id) { return {Kind::downvote, id, {}}; }

    friend bool operator==(const InsightOp&, const InsightOp&) = default;
};

struct ParsedOps {
    std::vector<InsightOp> ops;
    std::vector<std::string> warnings;
};

/// One op per line: `ADD <text>`, `EDIT <id> <text>`, `UPVOTE <id>`,
/// `DOWNVOTE <id>`. Keywords are case-insensitive and ids decimal. Blank
/// lines are ignored; anything else that does not parse earns a warning.
ParsedOps parse_insight_ops(std::string_view llm_text);

struct InsightPoolOptions {
    int initial_weight = 2;
    std::size_t max_per_category = 20;
};

struct ChangeReport {
    bool applied = false;
    std::optional<InsightId> added;
    std::vector<InsightId> removed;
    std::vector<std::string> warnings;
};

/// Weighted insight rules, partitioned by category. An insight whose weight
/// reaches zero is removed in the same call.
class InsightPool {
public:
    explicit InsightPool(InsightPoolOptions options = {});

    /// Applies `op` within `category`. Ops naming an id that is absent, or
    /// owned by another category, change nothing and add a warning.
    ChangeReport apply(CategoryId category, const InsightOp& op);

    /// Drops lowest-weight insights (ties: larger id first) until the
    /// category holds at most max_per_category. Returns removed ids.
    std::vector<InsightId> enforce_cap(CategoryId category);

    /// Insights of one category, weight descending then id ascending.
    std::vector<Insight> for_category(CategoryId category) const;
    /// Every insight, by id.
    std::vector<Insight> all() const;
    const Insight* find(InsightId id) const;

    std::size_t size() const noexcept { return insights_.size(); }
    std::size_t size(CategoryId category) const;
    InsightId next_id() const noexcept { return next_id_; }
    const InsightPoolOptions& options() const noexcept { return options_; }

    static InsightPool restore(InsightPoolOptions options, std::vector<Insight> insights,
                               InsightId next_id);

private:
    InsightPoolOptions options_;
    std::map<InsightId, Insight> insights_;
    InsightId next_id_ = 1;
};

// ---------------------------------------------------------------------------
// Contrast material

/// A short run of successful steps set against a failed attempt in the same
/// category.
struct ContrastPair {
    CategoryId category;
    RecordId success_id = 0;
    std::vector<Step> success_segment;
    RecordId failure_id = 0;
    Trajectory failure_trajectory;
    std::string failure_reflections;
};

/// A success in `category` next to a success from a different category.
struct CrossGroup {
    CategoryId category;
    RecordId own_id = 0;
    Trajectory own_success;
    CategoryId other_category;
    RecordId other_id = 0;
    Trajectory other_success;
};

/// Success-side records are `success` and `seed` kinds.
bool is_success_kind(RecordKind kind) noexcept;

/// Pairs each failure of `category` (by id, at most `max_pairs`) with a
/// segment of min(L, n) steps cut from a success trajectory, cycling through
/// successes by id. The segment start is `rng() % (n - len + 1)` with
/// std::mt19937_64 seeded by `seed`, drawn once per pair.
std::vector<ContrastPair> build_intra_pairs(std::span<const MemoryRecord> records,
                                            CategoryId category, std::size_t segment_length,
                                            std::size_t max_pairs, std::uint64_t seed);

/// Up to `max_groups` groups whose partner categories rotate round-robin over
/// the other categories that have successes, in index order. Which success is
/// taken from each side is drawn with std::mt19937_64(seed).
std::vector<CrossGroup> build_cross_groups(std::span<const MemoryRecord> records,
                                           CategoryId category, std::size_t max_groups,
                                           std::uint64_t seed);

struct InsightGenerationReport {
    std::size_t ops_applied = 0;
    std::vector<std::string> warnings;
};

/// Runs `rounds` prompt/parse/apply cycles for one category. Round r shows
/// the current pool plus the r-th of `rounds` equal chunks of pairs and
/// groups; ops are applied in order and the cap enforced after each round.
InsightGenerationReport generate_insights(CategoryId category, std::span<const ContrastPair> pairs,
                                          std::span<const CrossGroup> groups, InsightPool& pool,
                                          CompletionBackend& llm, int rounds,
                                          std::string_view insight_template,
                                          const CategorySet& categories,
                                          const CompletionSettings& settings = {},
                                          RunTrace* trace = nullptr);

}  // namespace ehc
