#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ehc {

struct TraceEvent {
    std::string stage;
    std::string detail;
};

/// Append-only log of pipeline stages, optionally echoed to a stream.
class RunTrace {
public:
    explicit RunTrace(std::ostream* echo = nullptr) : echo_(echo) {}

    void add(std::string_view stage, std::string_view detail);

    const std::vector<TraceEvent>& events() const noexcept { return events_; }
    std::vector<TraceEvent> events_for(std::string_view stage) const;
    void clear() { events_.clear(); }

private:
    std::vector<TraceEvent> events_;
    std::ostream* echo_;
};

}  // namespace ehc
