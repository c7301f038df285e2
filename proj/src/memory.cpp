#include "ehc/memory.hpp"

#include <algorithm>

#include "ehc/errors.hpp"

namespace ehc {

const char* to_string(RecordKind kind) noexcept {
    switch (kind) {
        case RecordKind::success: return "success";
        case RecordKind::failure: return "failure";
        case RecordKind::seed: return "seed";
    }
    return "?";
}

const char* to_string(Tier tier) noexcept {
    return tier == Tier::fast ? "fast" : "deep";
}

namespace {

bool ranks_before(double sim_a, RecordId id_a, double sim_b, RecordId id_b) {
    if (sim_a != sim_b) return sim_a > sim_b;
    return id_a < id_b;
}

void sort_entries(std::vector<RetrievalEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const RetrievalEntry& a, const RetrievalEntry& b) {
        return ranks_before(a.similarity, a.record.id, b.similarity, b.record.id);
    });
}

}  // namespace

HierarchicalMemory::HierarchicalMemory(MemoryOptions options) : options_(options) {
    if (options_.capacity < 2) {
        throw ConfigError("fast pool capacity must be at least 2, got " +
                          std::to_string(options_.capacity));
    }
    if (options_.dim == 0) throw ConfigError("embedding dimension must be positive");
}

void HierarchicalMemory::check_insertable(const MemoryRecord& record) const {
    if (contains(record.id)) {
        throw UsageError("record id " + std::to_string(record.id) + " already stored");
    }
    if (record.embedding.dim() != options_.dim) {
        throw UsageError("record " + std::to_string(record.id) + " has embedding dim " +
                         std::to_string(record.embedding.dim()) + ", memory expects " +
                         std::to_string(options_.dim));
    }
    const bool has_reflections = record.reflections && !record.reflections->empty();
    if ((record.kind == RecordKind::failure) != has_reflections) {
        throw UsageError("record " + std::to_string(record.id) +
                         ": failure records need reflections and only they may carry them");
    }
}

void HierarchicalMemory::insert_fast(MemoryRecord record) {
    const RecordId id = record.id;
    recency_.emplace(record.last_access, id);
    fast_.emplace(id, std::move(record));
}

void HierarchicalMemory::touch(RecordId id, std::uint64_t stamp) {
    auto& rec = fast_.at(id);
    recency_.erase({rec.last_access, id});
    rec.last_access = stamp;
    recency_.emplace(stamp, id);
}

std::vector<RecordId> HierarchicalMemory::enforce_capacity(RecordId protect) {
    std::vector<RecordId> evicted;
    if (fast_.size() <= options_.capacity) return evicted;
    const std::size_t count = options_.capacity / 2;
    auto it = recency_.begin();
    while (evicted.size() < count && it != recency_.end()) {
        const RecordId victim = it->second;
        if (victim == protect) {
            ++it;
            continue;
        }
        it = recency_.erase(it);
        auto node = fast_.extract(victim);
        deep_.emplace(victim, std::move(node.mapped()));
        evicted.push_back(victim);
    }
    evictions_total_ += evicted.size();
    return evicted;
}

StoreReceipt HierarchicalMemory::store(MemoryRecord record) {
    check_insertable(record);
    ++clock_;
    record.created_at = clock_;
    record.last_access = clock_;
    const RecordId id = record.id;
    max_id_ = std::max(max_id_, id);
    insert_fast(std::move(record));
    StoreReceipt receipt;
    receipt.tier_placed = Tier::fast;
    receipt.evicted_ids = enforce_capacity(id);
    return receipt;
}

std::vector<RetrievalEntry> HierarchicalMemory::select(const EmbeddingVector& query,
                                                       std::optional<CategoryId> category,
                                                       std::size_t k, double theta) const {
    if (k == 0) throw UsageError("retrieve: k must be at least 1");
    if (!(theta >= -1.0 && theta <= 1.0)) throw UsageError("retrieve: theta must lie in [-1, 1]");
    if (query.dim() != options_.dim) {
        throw UsageError("retrieve: query dim " + std::to_string(query.dim()) +
                         " does not match memory dim " + std::to_string(options_.dim));
    }

    auto in_scope = [&](const MemoryRecord& r) { return !category || r.category == *category; };

    std::vector<RetrievalEntry> fast_hits;
    for (const auto& [id, rec] : fast_) {
        if (!in_scope(rec)) continue;
        const double s = cosine_sim(query, rec.embedding);
        if (s > theta) fast_hits.push_back({rec, s, Tier::fast});
    }
    sort_entries(fast_hits);
    if (fast_hits.size() > k) fast_hits.resize(k);

    std::vector<RetrievalEntry> out = std::move(fast_hits);
    if (out.size() < k) {
        std::vector<RetrievalEntry> deep_hits;
        for (const auto& [id, rec] : deep_) {
            if (!in_scope(rec)) continue;
            const double s = cosine_sim(query, rec.embedding);
            if (options_.deep_theta_gate && !(s > theta)) continue;
            deep_hits.push_back({rec, s, Tier::deep});
        }
        sort_entries(deep_hits);
        const std::size_t take = std::min(k - out.size(), deep_hits.size());
        out.insert(out.end(), std::make_move_iterator(deep_hits.begin()),
                   std::make_move_iterator(deep_hits.begin() + static_cast<std::ptrdiff_t>(take)));
    }
    sort_entries(out);
    return out;
}

RetrievalResult HierarchicalMemory::peek(const EmbeddingVector& query,
                                         std::optional<CategoryId> category, std::size_t k,
                                         double theta) const {
    return RetrievalResult{select(query, category, k, theta), query};
}

RetrievalResult HierarchicalMemory::retrieve(const EmbeddingVector& query,
                                             std::optional<CategoryId> category, std::size_t k,
                                             double theta) {
    auto entries = select(query, category, k, theta);
    ++clock_;
    // Fast hits are refreshed before any promotion runs the overflow rule.
    for (auto& e : entries) {
        e.record.last_access = clock_;
        if (e.tier != Tier::fast) continue;
        touch(e.record.id, clock_);
        ++fast_hits_;
    }
    for (auto& e : entries) {
        if (e.tier != Tier::deep) continue;
        auto node = deep_.extract(e.record.id);
        node.mapped().last_access = clock_;
        insert_fast(std::move(node.mapped()));
        ++promotions_total_;
        ++deep_hits_;
        enforce_capacity(e.record.id);
    }
    return RetrievalResult{std::move(entries), query};
}

std::vector<RecordId> HierarchicalMemory::promote(RecordId id) {
    auto node = deep_.extract(id);
    if (node.empty()) {
        throw NotFoundError("record " + std::to_string(id) + " is not in the deep store");
    }
    ++clock_;
    node.mapped().last_access = clock_;
    insert_fast(std::move(node.mapped()));
    ++promotions_total_;
    return enforce_capacity(id);
}

PoolStats HierarchicalMemory::stats() const {
    return PoolStats{fast_.size(),       deep_.size(), evictions_total_,
                     promotions_total_, fast_hits_,   deep_hits_};
}

std::optional<Tier> HierarchicalMemory::tier_of(RecordId id) const {
    if (fast_.contains(id)) return Tier::fast;
    if (deep_.contains(id)) return Tier::deep;
    return std::nullopt;
}

const MemoryRecord* HierarchicalMemory::find(RecordId id) const {
    if (auto it = fast_.find(id); it != fast_.end()) return &it->second;
    if (auto it = deep_.find(id); it != deep_.end()) return &it->second;
    return nullptr;
}

std::vector<RecordId> HierarchicalMemory::fast_ids_by_recency() const {
    std::vector<RecordId> ids;
    ids.reserve(recency_.size());
    for (const auto& [stamp, id] : recency_) ids.push_back(id);
    return ids;
}

std::vector<RecordId> HierarchicalMemory::deep_ids() const {
    std::vector<RecordId> ids;
    ids.reserve(deep_.size());
    for (const auto& [id, rec] : deep_) ids.push_back(id);
    return ids;
}

std::vector<MemoryRecord> HierarchicalMemory::snapshot(std::optional<CategoryId> category) const {
    std::vector<MemoryRecord> out;
    auto take = [&](const MemoryRecord& r) {
        if (!category || r.category == *category) out.push_back(r);
    };
    for (const auto& [id, rec] : fast_) take(rec);
    for (const auto& [id, rec] : deep_) take(rec);
    std::sort(out.begin(), out.end(),
              [](const MemoryRecord& a, const MemoryRecord& b) { return a.id < b.id; });
    return out;
}

HierarchicalMemory HierarchicalMemory::restore(MemoryOptions options, RestoredState state) {
    HierarchicalMemory m(options);
    if (state.fast.size() > options.capacity) {
        throw UsageError("restored fast pool holds " + std::to_string(state.fast.size()) +
                         " records, capacity is " + std::to_string(options.capacity));
    }
    auto add = [&](MemoryRecord rec, Tier tier) {
        m.check_insertable(rec);
        m.max_id_ = std::max(m.max_id_, rec.id);
        if (tier == Tier::fast) {
            m.insert_fast(std::move(rec));
        } else {
            const RecordId id = rec.id;
            m.deep_.emplace(id, std::move(rec));
        }
    };
    for (auto& r : state.fast) add(std::move(r), Tier::fast);
    for (auto& r : state.deep) add(std::move(r), Tier::deep);
    m.clock_ = state.clock;
    m.evictions_total_ = state.counters.evictions_total;
    m.promotions_total_ = state.counters.promotions_total;
    m.fast_hits_ = state.counters.fast_hits;
    m.deep_hits_ = state.counters.deep_hits;
    return m;
}

}  // namespace ehc
