#include "ehc/trajectory.hpp"

#include <algorithm>

namespace ehc {

std::string_view trim(std::string_view s) noexcept {
    constexpr std::string_view ws = " \t\r\n\f\v";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view s) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto nl = s.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < s.size()) lines.push_back(s.substr(start));
            break;
        }
        lines.push_back(s.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

std::string Trajectory::program() const {
    std::string out;
    for (const auto& step : steps) {
        if (!out.empty()) out += '\n';
        out += step.action;
    }
    return out;
}

namespace {

std::string flatten(std::string_view s) {
    std::string out(trim(s));
    std::replace(out.begin(), out.end(), '\n', ' ');
    std::replace(out.begin(), out.end(), '\r', ' ');
    return out;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        char a = s[i];
        char b = prefix[i];
        if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
        if (b >= 'A' && b <= 'Z') b = static_cast<char>(b - 'A' + 'a');
        if (a != b) return false;
    }
    return true;
}

// Returns the value after `label` when `line` starts with it.
bool take_field(std::string_view line, std::string_view label, std::string_view& value) {
    if (!starts_with_ci(line, label)) return false;
    value = trim(line.substr(label.size()));
    return true;
}

}  // namespace

std::string format_trajectory(std::string_view question, const Trajectory& trajectory) {
    std::string out = "Question: " + flatten(question) + '\n';
    for (const auto& step : trajectory.steps) {
        if (!trim(step.thought).empty()) out += "Thought: " + flatten(step.thought) + '\n';
        out += "Action: " + flatten(step.action) + '\n';
        if (!trim(step.observation).empty()) {
            out += "Observation: " + flatten(step.observation) + '\n';
        }
    }
    if (!trim(trajectory.final_answer).empty()) {
        out += "Answer: " + flatten(trajectory.final_answer) + '\n';
    }
    return out;
}

ParsedTrajectory parse_trajectory(std::string_view text) {
    ParsedTrajectory out;
    std::string pending_thought;
    for (auto raw : split_lines(text)) {
        const auto line = trim(raw);
        std::string_view v;
        if (take_field(line, "Question:", v)) {
            out.question = std::string(v);
        } else if (take_field(line, "Thought:", v)) {
            pending_thought = std::string(v);
        } else if (take_field(line, "Action:", v)) {
            out.trajectory.steps.push_back(Step{std::move(pending_thought), std::string(v), {}});
            pending_thought.clear();
        } else if (take_field(line, "Observation:", v)) {
            if (!out.trajectory.steps.empty()) out.trajectory.steps.back().observation = std::string(v);
        } else if (take_field(line, "Answer:", v)) {
            out.trajectory.final_answer = std::string(v);
        }
    }
    return out;
}

Trajectory parse_program_output(std::string_view completion) {
    Trajectory out;
    std::string pending_thought;
    for (auto raw : split_lines(completion)) {
        const auto line = trim(raw);
        if (line.empty() || line.starts_with("```")) continue;
        std::string_view v;
        if (take_field(line, "Thought:", v)) {
            pending_thought = std::string(v);
            continue;
        }
        if (take_field(line, "Question:", v) || take_field(line, "Observation:", v) ||
            take_field(line, "Answer:", v) || take_field(line, "Program:", v)) {
            continue;
        }
        std::string_view action = line;
        if (take_field(line, "Action:", v)) action = v;
        if (action.empty()) continue;
        out.steps.push_back(Step{std::move(pending_thought), std::string(action), {}});
        pending_thought.clear();
    }
    return out;
}

}  // namespace ehc
