#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ehc/category.hpp"
#include "ehc/embedding.hpp"

namespace ehc {

using RecordId = std::uint64_t;

enum class RecordKind { success, failure, seed };
enum class Tier { fast, deep };

const char* to_string(RecordKind kind) noexcept;
const char* to_string(Tier tier) noexcept;

/// One stored trajectory or exemplar.
///
/// `created_at` and `last_access` are clock stamps owned by the memory; the
/// values a caller puts in them are overwritten by store().
struct MemoryRecord {
    RecordId id = 0;
    CategoryId category;
    RecordKind kind = RecordKind::seed;
    std::string content;
    EmbeddingVector embedding;
    std::optional<std::string> reflections;
    /// Task the record was collected from; empty for seeds.
    std::string task_id;
    std::uint64_t created_at = 0;
    std::uint64_t last_access = 0;

    friend bool operator==(const MemoryRecord&, const MemoryRecord&) = default;
};

struct StoreReceipt {
    Tier tier_placed = Tier::fast;
    std::vector<RecordId> evicted_ids;
};

struct RetrievalEntry {
    MemoryRecord record;
    double similarity = 0.0;
    Tier tier = Tier::fast;
};

struct RetrievalResult {
    std::vector<RetrievalEntry> entries;
    EmbeddingVector query_embedding;
};

struct PoolStats {
    std::size_t fast_count = 0;
    std::size_t deep_count = 0;
    std::uint64_t evictions_total = 0;
    std::uint64_t promotions_total = 0;
    std::uint64_t fast_hits = 0;
    std::uint64_t deep_hits = 0;

    friend bool operator==(const PoolStats&, const PoolStats&) = default;
};

struct MemoryOptions {
    std::size_t capacity = 16;
    std::size_t dim = kDefaultEmbeddingDim;
    /// Apply the similarity threshold to the deep-store fallback as well.
    bool deep_theta_gate = false;
};

/// Two-tier memory: a fixed-capacity, LRU-ordered fast pool backed by an
/// unbounded deep store.
///
/// Inserting past capacity migrates the floor(C/2) least recently accessed
/// fast records (ties: smaller id first) to the deep store. Retrieval scans
/// the fast pool under the threshold, fills any shortfall from the deep store
/// and promotes those deep hits back into the fast pool.
///
/// Not internally synchronized: retrieve() mutates recency, so every call is
/// a write and callers must serialize access.
class HierarchicalMemory {
public:
    explicit HierarchicalMemory(MemoryOptions options = {});

    StoreReceipt store(MemoryRecord record);

    RetrievalResult retrieve(const EmbeddingVector& query, std::optional<CategoryId> category,
                             std::size_t k, double theta);

    /// Same selection as retrieve() with no recency update, promotion or
    /// counter change.
    RetrievalResult peek(const EmbeddingVector& query, std::optional<CategoryId> category,
                         std::size_t k, double theta) const;

    /// Moves a deep record into the fast pool. Throws NotFoundError if `id`
    /// is not in the deep store. Returns ids demoted by the overflow rule.
    std::vector<RecordId> promote(RecordId id);

    PoolStats stats() const;

    std::size_t capacity() const noexcept { return options_.capacity; }
    std::size_t dim() const noexcept { return options_.dim; }
    const MemoryOptions& options() const noexcept { return options_; }
    std::uint64_t clock() const noexcept { return clock_; }
    std::size_t size() const noexcept { return fast_.size() + deep_.size(); }

    bool contains(RecordId id) const { return fast_.contains(id) || deep_.contains(id); }
    std::optional<Tier> tier_of(RecordId id) const;
    const MemoryRecord* find(RecordId id) const;

    /// Smallest id strictly greater than every id ever stored.
    RecordId next_id() const noexcept { return max_id_ + 1; }

    /// Fast-pool ids from least to most recently accessed.
    std::vector<RecordId> fast_ids_by_recency() const;
    std::vector<RecordId> deep_ids() const;

    /// Every record (both tiers) sorted by id, optionally restricted to one
    /// category. Does not touch recency.
    std::vector<MemoryRecord> snapshot(std::optional<CategoryId> category = std::nullopt) const;

    /// Rebuilds a memory exactly as persisted. Used by the store-file loader;
    /// validates capacity and id uniqueness but trusts the stamps.
    struct RestoredState {
        std::uint64_t clock = 0;
        PoolStats counters;
        std::vector<MemoryRecord> fast;
        std::vector<MemoryRecord> deep;
    };
    static HierarchicalMemory restore(MemoryOptions options, RestoredState state);

private:
    using RecencyKey = std::pair<std::uint64_t, RecordId>;

    void check_insertable(const MemoryRecord& record) const;
    void insert_fast(MemoryRecord record);
    void touch(RecordId id, std::uint64_t stamp);
    std::vector<RecordId> enforce_capacity(RecordId protect);
    std::vector<RetrievalEntry> select(const EmbeddingVector& query,
                                       std::optional<CategoryId> category, std::size_t k,
                                       double theta) const;

    MemoryOptions options_;
    std::uint64_t clock_ = 0;
    RecordId max_id_ = 0;
    std::unordered_map<RecordId, MemoryRecord> fast_;
    std::set<RecencyKey> recency_;
    std::map<RecordId, MemoryRecord> deep_;
    std::uint64_t evictions_total_ = 0;
    std::uint64_t promotions_total_ = 0;
    std::uint64_t fast_hits_ = 0;
    std::uint64_t deep_hits_ = 0;
};

}  // namespace ehc
