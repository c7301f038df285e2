#include "ehc/trace.hpp"

namespace ehc {

void RunTrace::add(std::string_view stage, std::string_view detail) {
    events_.push_back(TraceEvent{std::string(stage), std::string(detail)});
    if (echo_) *echo_ << "[trace] " << stage << ": " << detail << '\n';
}

std::vector<TraceEvent> RunTrace::events_for(std::string_view stage) const {
    std::vector<TraceEvent> out;
    for (const auto& e : events_) {
        if (e.stage == stage) out.push_back(e);
    }
    return out;
}

}  // namespace ehc
