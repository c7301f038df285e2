#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ehc {

struct Step {
    std::string thought;
    std::string action;
    std::string observation;

    friend bool operator==(const Step&, const Step&) = default;
};

struct Trajectory {
    std::vector<Step> steps;
    std::string final_answer;

    /// Actions joined by newlines: the program the trajectory ran.
    std::string program() const;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct Task {
    std::string id;
    std::string content;
    nlohmann::json payload;
    std::optional<std::string> truth;
    /// Category the task was generated for; used only for scoring.
    std::string gold_category;
};

/// Renders the exemplar block stored as a record's content:
///
///     Question: <question>
///     Thought: <thought>          (omitted when empty)
///     Action: <action>
///     Observation: <observation>  (omitted when empty)
///     Answer: <final answer>      (omitted when empty)
///
/// Embedded newlines in any field are flattened to spaces.
std::string format_trajectory(std::string_view question, const Trajectory& trajectory);

struct ParsedTrajectory {
    std::string question;
    Trajectory trajectory;
};

/// Inverse of format_trajectory. Unknown lines are ignored.
ParsedTrajectory parse_trajectory(std::string_view text);

/// Reads an LLM completion as a program. Each non-blank line is an action,
/// except `Thought:` lines (attached to the next action) and echoed
/// `Question:`/`Observation:`/`Answer:`/`Program:` lines and code fences,
/// which are dropped. An `Action:` prefix is stripped.
Trajectory parse_program_output(std::string_view completion);

std::string_view trim(std::string_view s) noexcept;
std::vector<std::string_view> split_lines(std::string_view s);

}  // namespace ehc
