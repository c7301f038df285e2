#include "ehc/executor.hpp"

#include <algorithm>
#include <optional>

#include "ehc/errors.hpp"

namespace ehc {

std::vector<SceneObject> scene_from_json(const nlohmann::json& payload) {
    std::vector<SceneObject> objects;
    if (!payload.is_object() || !payload.contains("objects") || !payload["objects"].is_array()) {
        return objects;
    }
    for (const auto& obj : payload["objects"]) {
        SceneObject o;
        if (obj.is_object()) {
            for (const auto& [key, value] : obj.items()) {
                if (value.is_string()) o[key] = value.get<std::string>();
            }
        }
        objects.push_back(std::move(o));
    }
    return objects;
}

nlohmann::json scene_to_json(const std::vector<SceneObject>& objects) {
    auto arr = nlohmann::json::array();
    for (const auto& o : objects) {
        auto j = nlohmann::json::object();
        for (const auto& [k, v] : o) j[k] = v;
        arr.push_back(std::move(j));
    }
    return nlohmann::json{{"objects", std::move(arr)}};
}

namespace {

struct ExecError {
    std::string message;
};

struct Assignment {
    std::string attr;
    std::vector<std::string> values;
};

// "attr=a" or "attr=a,b"
Assignment parse_assignment(std::string_view arg, std::size_t min_values, std::size_t max_values) {
    const auto eq = arg.find('=');
    if (eq == std::string_view::npos || eq == 0) throw ExecError{"expected attr=value"};
    Assignment a;
    a.attr = std::string(trim(arg.substr(0, eq)));
    std::string_view rest = arg.substr(eq + 1);
    while (true) {
        const auto comma = rest.find(',');
        a.values.emplace_back(trim(rest.substr(0, comma)));
        if (a.values.back().empty()) throw ExecError{"empty value"};
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    if (a.values.size() < min_values || a.values.size() > max_values) {
        throw ExecError{"wrong number of values"};
    }
    return a;
}

// ADD takes a list of attr=value pairs separated by commas.
SceneObject parse_object(std::string_view arg) {
    SceneObject obj;
    while (!arg.empty()) {
        const auto comma = arg.find(',');
        const auto part = trim(arg.substr(0, comma));
        const auto eq = part.find('=');
        if (eq == std::string_view::npos || eq == 0 || eq + 1 == part.size()) {
            throw ExecError{"expected attr=value pairs"};
        }
        obj[std::string(trim(part.substr(0, eq)))] = std::string(trim(part.substr(eq + 1)));
        if (comma == std::string_view::npos) break;
        arg = arg.substr(comma + 1);
    }
    if (obj.empty()) throw ExecError{"ADD needs at least one attribute"};
    return obj;
}

bool has(const SceneObject& o, const std::string& attr, const std::string& value) {
    auto it = o.find(attr);
    return it != o.end() && it->second == value;
}

std::string upper(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
    return out;
}

}  // namespace

ExecutionResult ToyExecutor::run(std::string_view program, const nlohmann::json& payload) const {
    ExecutionResult out;
    std::vector<SceneObject> scene = scene_from_json(payload);
    std::vector<std::size_t> selection(scene.size());
    auto reset = [&] {
        selection.resize(scene.size());
        for (std::size_t i = 0; i < scene.size(); ++i) selection[i] = i;
    };
    reset();
    std::optional<std::string> answer;

    std::size_t line_no = 0;
    for (auto raw : split_lines(program)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty()) continue;
        const auto space = line.find_first_of(" \t");
        const std::string op = upper(line.substr(0, space));
        const std::string_view arg =
            space == std::string_view::npos ? std::string_view{} : trim(line.substr(space + 1));
        try {
            if (op == "FILTER") {
                const auto a = parse_assignment(arg, 1, 1);
                std::erase_if(selection, [&](std::size_t i) { return !has(scene[i], a.attr, a.values[0]); });
                out.observations.push_back(std::to_string(selection.size()) + " selected");
            } else if (op == "COUNT") {
                answer = std::to_string(selection.size());
                out.observations.push_back(*answer);
            } else if (op == "EXISTS") {
                answer = selection.empty() ? "no" : "yes";
                out.observations.push_back(*answer);
            } else if (op == "QUERY") {
                const std::string attr(arg);
                if (attr.empty()) throw ExecError{"QUERY needs an attribute"};
                if (selection.size() != 1) {
                    throw ExecError{"QUERY needs exactly one selected object, have " +
                                    std::to_string(selection.size())};
                }
                auto it = scene[selection[0]].find(attr);
                if (it == scene[selection[0]].end()) throw ExecError{"object has no " + attr};
                answer = it->second;
                out.observations.push_back(*answer);
            } else if (op == "COMPARE") {
                const auto a = parse_assignment(arg, 2, 2);
                std::size_t first = 0;
                std::size_t second = 0;
                for (std::size_t i : selection) {
                    first += has(scene[i], a.attr, a.values[0]);
                    second += has(scene[i], a.attr, a.values[1]);
                }
                answer = first > second ? "yes" : "no";
                out.observations.push_back(std::to_string(first) + " vs " + std::to_string(second));
            } else if (op == "ADD") {
                scene.push_back(parse_object(arg));
                reset();
                out.observations.push_back(std::to_string(scene.size()) + " objects");
            } else if (op == "REMOVE") {
                const auto a = parse_assignment(arg, 1, 1);
                std::erase_if(scene, [&](const SceneObject& o) { return has(o, a.attr, a.values[0]); });
                reset();
                out.observations.push_back(std::to_string(scene.size()) + " objects");
            } else if (op == "REPLACE") {
                const auto a = parse_assignment(arg, 2, 2);
                std::size_t changed = 0;
                for (auto& o : scene) {
                    if (has(o, a.attr, a.values[0])) {
                        o[a.attr] = a.values[1];
                        ++changed;
                    }
                }
                reset();
                out.observations.push_back(std::to_string(changed) + " replaced");
            } else {
                throw ExecError{"unknown op '" + op + "'"};
            }
        } catch (const ExecError& e) {
            out.ok = false;
            out.diagnostic = "line " + std::to_string(line_no) + ": " + e.message;
            return out;
        }
    }
    if (!answer) {
        out.diagnostic = "program produced no answer";
        return out;
    }
    out.ok = true;
    out.result = std::move(*answer);
    return out;
}

std::string normalize_answer(std::string_view s) {
    std::string out(trim(s));
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

Verdict AnswerMatchEvaluator::judge(const Task& task, const Trajectory& trajectory) const {
    if (!task.truth) throw UsageError("task " + task.id + " has no ground truth to judge against");
    const std::string got = normalize_answer(trajectory.final_answer);
    const std::string want = normalize_answer(*task.truth);
    if (got == want) return Verdict{true, "correct"};
    if (got.empty()) return Verdict{false, "no answer produced"};
    return Verdict{false, "answer '" + got + "' is incorrect"};
}

}  // namespace ehc
