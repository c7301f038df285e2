#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ehc/trajectory.hpp"

namespace ehc {

struct ExecutionResult {
    bool ok = false;
    std::string result;
    std::string diagnostic;
    /// One observation per executed program line.
    std::vector<std::string> observations;
};

/// Runs a generated program against a task payload.
class Executor {
public:
    virtual ~Executor() = default;
    virtual ExecutionResult run(std::string_view program, const nlohmann::json& payload) const = 0;
};

using SceneObject = std::map<std::string, std::string>;

/// Symbolic scene: `{"objects": [{"color": "red", "shape": "cube", ...}, ...]}`.
std::vector<SceneObject> scene_from_json(const nlohmann::json& payload);
nlohmann::json scene_to_json(const std::vector<SceneObject>& objects);

/// Interpreter for the symbolic-scene program language.
///
/// One op per line. A selection starts as every object in the scene.
///
///     FILTER attr=val       narrow the selection
///     COUNT                 answer = size of selection
///     EXISTS                answer = yes | no
///     QUERY attr            answer = attr of the single selected object
///     COMPARE attr=a,b      answer = yes iff #(attr=a) > #(attr=b) in selection
///     ADD attr=val,...      insert an object; selection resets to all
///     REMOVE attr=val       delete matching objects; selection resets to all
///     REPLACE attr=old,new  rewrite matching values; selection resets to all
///
/// The final answer is the value of the last answering op.
class ToyExecutor final : public Executor {
public:
    ExecutionResult run(std::string_view program, const nlohmann::json& payload) const override;
};

struct Verdict {
    bool success = false;
    std::string feedback;
};

class Evaluator {
public:
    virtual ~Evaluator() = default;
    virtual Verdict judge(const Task& task, const Trajectory& trajectory) const = 0;
};

/// Compares the final answer to `task.truth` after trimming and ASCII
/// lowercasing. Throws UsageError when the task has no truth.
class AnswerMatchEvaluator final : public Evaluator {
public:
    Verdict judge(const Task& task, const Trajectory& trajectory) const override;
};

std::string normalize_answer(std::string_view s);

}  // namespace ehc
