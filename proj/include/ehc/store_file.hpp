#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "ehc/insight.hpp"
#include "ehc/memory.hpp"

namespace ehc {

inline constexpr int kStoreFormatVersion = 1;

/// Line-delimited store file, UTF-8, one JSON object per line.
///
/// Line 1 is the header:
///
///     {"format_version":1,"dim":D,"capacity":C,"deep_theta_gate":false,
///      "clock":N,"evictions_total":..,"promotions_total":..,"fast_hits":..,
///      "deep_hits":..,"next_insight_id":..}
///
/// Then one `{"type":"record",...}` line per memory record, ordered by
/// (created_at, id), and one `{"type":"insight",...}` line per insight,
/// ordered by id. Embedding components are written as shortest round-trip
/// decimals, so persist -> load -> persist is byte-identical.
void write_store(std::ostream& out, const HierarchicalMemory& memory,
                 const InsightPool* insights = nullptr);
void persist(const std::filesystem::path& path, const HierarchicalMemory& memory,
             const InsightPool* insights = nullptr);

struct LoadedStore {
    HierarchicalMemory memory;
    InsightPool insights;
};

struct LoadOptions {
    /// Used when the file is empty (no header).
    MemoryOptions memory;
    InsightPoolOptions insights;
};

/// Throws FormatError naming the first bad line.
LoadedStore read_store(std::istream& in, const LoadOptions& options = {});
LoadedStore load(const std::filesystem::path& path, const LoadOptions& options = {});

/// Shortest decimal that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace ehc
