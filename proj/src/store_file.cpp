#include "ehc/store_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ehc/errors.hpp"

namespace ehc {

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

using nlohmann::json;

// Hand-assembled so key order and number formatting are fixed.
class LineWriter {
public:
    LineWriter& field(std::string_view key, const std::string& value) {
        sep();
        out_ += json(key).dump() + ':' + json(value).dump(-1, ' ', false, json::error_handler_t::replace);
        return *this;
    }
    LineWriter& field(std::string_view key, std::uint64_t value) {
        sep();
        out_ += json(key).dump() + ':' + std::to_string(value);
        return *this;
    }
    LineWriter& field(std::string_view key, bool value) {
        sep();
        out_ += json(key).dump() + ':' + (value ? "true" : "false");
        return *this;
    }
    LineWriter& field(std::string_view key, const EmbeddingVector& v) {
        sep();
        out_ += json(key).dump() + ":[";
        for (std::size_t i = 0; i < v.dim(); ++i) {
            if (i) out_ += ',';
            out_ += format_double(v[i]);
        }
        out_ += ']';
        return *this;
    }
    std::string finish() { return out_ + "}\n"; }

private:
    void sep() { out_ += out_.size() == 1 ? "" : ","; }
    std::string out_ = "{";
};

RecordKind parse_kind(const std::string& s, std::size_t line) {
    if (s == "success") return RecordKind::success;
    if (s == "failure") return RecordKind::failure;
    if (s == "seed") return RecordKind::seed;
    throw FormatError(line, "unknown record kind '" + s + "'");
}

template <typename T>
T get_field(const json& j, const char* key, std::size_t line) {
    if (!j.contains(key)) throw FormatError(line, std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw FormatError(line, std::string("field '") + key + "' has the wrong type");
    }
}

}  // namespace

void write_store(std::ostream& out, const HierarchicalMemory& memory, const InsightPool* insights) {
    const PoolStats s = memory.stats();
    out << LineWriter{}
               .field("format_version", static_cast<std::uint64_t>(kStoreFormatVersion))
               .field("dim", static_cast<std::uint64_t>(memory.dim()))
               .field("capacity", static_cast<std::uint64_t>(memory.capacity()))
               .field("deep_theta_gate", memory.options().deep_theta_gate)
               .field("clock", memory.clock())
               .field("evictions_total", s.evictions_total)
               .field("promotions_total", s.promotions_total)
               .field("fast_hits", s.fast_hits)
               .field("deep_hits", s.deep_hits)
               .field("next_insight_id", insights ? insights->next_id() : InsightId{1})
               .finish();

    auto records = memory.snapshot();
    std::sort(records.begin(), records.end(), [](const MemoryRecord& a, const MemoryRecord& b) {
        return a.created_at != b.created_at ? a.created_at < b.created_at : a.id < b.id;
    });
    for (const auto& r : records) {
        LineWriter w;
        w.field("type", std::string("record"))
            .field("tier", std::string(to_string(*memory.tier_of(r.id))))
            .field("id", r.id)
            .field("category", static_cast<std::uint64_t>(r.category.value))
            .field("kind", std::string(to_string(r.kind)))
            .field("content", r.content)
            .field("embedding", r.embedding);
        if (r.reflections) w.field("reflections", *r.reflections);
        if (!r.task_id.empty()) w.field("task_id", r.task_id);
        w.field("created_at", r.created_at).field("last_access", r.last_access);
        out << w.finish();
    }
    if (insights) {
        for (const auto& ins : insights->all()) {
            out << LineWriter{}
                       .field("type", std::string("insight"))
                       .field("id", ins.id)
                       .field("category", static_cast<std::uint64_t>(ins.category.value))
                       .field("text", ins.text)
                       .field("weight", static_cast<std::uint64_t>(ins.weight))
                       .finish();
        }
    }
}

void persist(const std::filesystem::path& path, const HierarchicalMemory& memory,
             const InsightPool* insights) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write store " + path.string());
    write_store(out, memory, insights);
    if (!out) throw ConfigError("write to " + path.string() + " failed");
}

LoadedStore read_store(std::istream& in, const LoadOptions& options) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<json> header;
    std::size_t header_line = 0;
    HierarchicalMemory::RestoredState state;
    std::vector<Insight> insights;
    std::set<RecordId> record_ids;
    std::set<InsightId> insight_ids;
    std::size_t dim = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw FormatError(line_no, "not a JSON object");

        if (!header) {
            const auto version = get_field<int>(j, "format_version", line_no);
            if (version != kStoreFormatVersion) {
                throw FormatError(line_no, "unsupported format_version " + std::to_string(version));
            }
            dim = get_field<std::size_t>(j, "dim", line_no);
            if (dim == 0) throw FormatError(line_no, "dim must be positive");
            if (get_field<std::size_t>(j, "capacity", line_no) < 2) {
                throw FormatError(line_no, "capacity must be at least 2");
            }
            header = std::move(j);
            header_line = line_no;
            continue;
        }

        const auto type = get_field<std::string>(j, "type", line_no);
        if (type == "record") {
            MemoryRecord r;
            r.id = get_field<RecordId>(j, "id", line_no);
            if (!record_ids.insert(r.id).second) {
                throw FormatError(line_no, "duplicate record id " + std::to_string(r.id));
            }
            r.category = CategoryId{get_field<std::uint32_t>(j, "category", line_no)};
            r.kind = parse_kind(get_field<std::string>(j, "kind", line_no), line_no);
            r.content = get_field<std::string>(j, "content", line_no);
            auto values = get_field<std::vector<double>>(j, "embedding", line_no);
            if (values.size() != dim) {
                throw FormatError(line_no, "embedding has " + std::to_string(values.size()) +
                                               " values, header says dim " + std::to_string(dim));
            }
            r.embedding = EmbeddingVector(std::move(values));
            if (j.contains("reflections")) r.reflections = get_field<std::string>(j, "reflections", line_no);
            if (j.contains("task_id")) r.task_id = get_field<std::string>(j, "task_id", line_no);
            r.created_at = get_field<std::uint64_t>(j, "created_at", line_no);
            r.last_access = get_field<std::uint64_t>(j, "last_access", line_no);
            if (r.last_access < r.created_at) throw FormatError(line_no, "last_access precedes created_at");
            const bool has_reflections = r.reflections && !r.reflections->empty();
            if ((r.kind == RecordKind::failure) != has_reflections) {
                throw FormatError(line_no, "reflections must be present exactly for failure records");
            }
            const auto tier = get_field<std::string>(j, "tier", line_no);
            if (tier == "fast") {
                state.fast.push_back(std::move(r));
            } else if (tier == "deep") {
                state.deep.push_back(std::move(r));
            } else {
                throw FormatError(line_no, "unknown tier '" + tier + "'");
            }
        } else if (type == "insight") {
            Insight ins;
            ins.id = get_field<InsightId>(j, "id", line_no);
            if (!insight_ids.insert(ins.id).second) {
                throw FormatError(line_no, "duplicate insight id " + std::to_string(ins.id));
            }
            ins.category = CategoryId{get_field<std::uint32_t>(j, "category", line_no)};
            ins.text = get_field<std::string>(j, "text", line_no);
            ins.weight = get_field<int>(j, "weight", line_no);
            if (ins.weight < 1) throw FormatError(line_no, "insight weight must be positive");
            insights.push_back(std::move(ins));
        } else {
            throw FormatError(line_no, "unknown line type '" + type + "'");
        }
    }

    if (!header) {
        return LoadedStore{HierarchicalMemory(options.memory), InsightPool(options.insights)};
    }

    const json& h = *header;
    MemoryOptions mem_opts;
    mem_opts.dim = dim;
    mem_opts.capacity = get_field<std::size_t>(h, "capacity", header_line);
    mem_opts.deep_theta_gate = h.contains("deep_theta_gate")
                                   ? get_field<bool>(h, "deep_theta_gate", header_line)
                                   : options.memory.deep_theta_gate;
    state.clock = get_field<std::uint64_t>(h, "clock", header_line);
    state.counters.evictions_total = get_field<std::uint64_t>(h, "evictions_total", header_line);
    state.counters.promotions_total = get_field<std::uint64_t>(h, "promotions_total", header_line);
    state.counters.fast_hits = get_field<std::uint64_t>(h, "fast_hits", header_line);
    state.counters.deep_hits = get_field<std::uint64_t>(h, "deep_hits", header_line);
    const auto next_insight = get_field<InsightId>(h, "next_insight_id", header_line);

    if (state.fast.size() > mem_opts.capacity) {
        throw FormatError(header_line, "fast tier holds " + std::to_string(state.fast.size()) +
                                           " records, capacity is " +
                                           std::to_string(mem_opts.capacity));
    }
    for (const auto& r : state.fast) {
        if (r.last_access > state.clock) throw FormatError(header_line, "record stamp exceeds clock");
    }
    for (const auto& r : state.deep) {
        if (r.last_access > state.clock) throw FormatError(header_line, "record stamp exceeds clock");
    }
    for (const auto& ins : insights) {
        if (ins.id >= next_insight) {
            throw FormatError(header_line, "next_insight_id " + std::to_string(next_insight) +
                                               " is not above insight " + std::to_string(ins.id));
        }
    }

    try {
        return LoadedStore{HierarchicalMemory::restore(mem_opts, std::move(state)),
                           InsightPool::restore(options.insights, std::move(insights), next_insight)};
    } catch (const Error& e) {
        throw FormatError(0, e.what());
    }
}

LoadedStore load(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(0, "cannot open store " + path.string());
    return read_store(in, options);
}

}  // namespace ehc
