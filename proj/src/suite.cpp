#include "ehc/suite.hpp"

#include <map>
#include <ostream>
#include <random>

#include "ehc/category.hpp"
#include "ehc/errors.hpp"
#include "ehc/executor.hpp"

namespace ehc {

namespace {

class Picker {
public:
    explicit Picker(std::uint64_t seed) : rng_(seed) {}

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
    const std::string& from(const std::vector<std::string>& v) { return v[below(v.size())]; }
    std::pair<std::string, std::string> two_distinct(const std::vector<std::string>& v) {
        const std::size_t a = below(v.size());
        const std::size_t b = (a + 1 + below(v.size() - 1)) % v.size();
        return {v[a], v[b]};
    }

private:
    std::mt19937_64 rng_;
};

std::vector<SceneObject> make_scene(Picker& pick) {
    const std::size_t n = 4 + pick.below(5);
    std::vector<SceneObject> scene;
    for (std::size_t i = 0; i < n; ++i) {
        scene.push_back(SceneObject{{"color", pick.from(kSceneColors)},
                                    {"shape", pick.from(kSceneShapes)},
                                    {"size", pick.from(kSceneSizes)}});
    }
    return scene;
}

struct Draft {
    std::string question;
    std::string program;
};

// Picks an object whose (size, shape) pair is unique, regenerating the scene
// until one exists.
Draft recognition_task(Picker& pick, std::vector<SceneObject>& scene) {
    while (true) {
        std::vector<std::size_t> unique;
        for (std::size_t i = 0; i < scene.size(); ++i) {
            std::size_t same = 0;
            for (const auto& o : scene) {
                same += o.at("size") == scene[i].at("size") && o.at("shape") == scene[i].at("shape");
            }
            if (same == 1) unique.push_back(i);
        }
        if (!unique.empty()) {
            const auto& o = scene[unique[pick.below(unique.size())]];
            return {"What color is the " + o.at("size") + " " + o.at("shape") + "?",
                    "FILTER size=" + o.at("size") + "\nFILTER shape=" + o.at("shape") + "\nQUERY color"};
        }
        scene = make_scene(pick);
    }
}

Draft draft_task(const std::string& category, Picker& pick, std::vector<SceneObject>& scene) {
    if (category == "judgment") {
        const auto& color = pick.from(kSceneColors);
        const auto& shape = pick.from(kSceneShapes);
        return {"Is there a " + color + " " + shape + "?",
                "FILTER color=" + color + "\nFILTER shape=" + shape + "\nEXISTS"};
    }
    if (category == "counting") {
        const auto& color = pick.from(kSceneColors);
        const auto& shape = pick.from(kSceneShapes);
        return {"How many " + color + " " + shape + "s are there?",
                "FILTER color=" + color + "\nFILTER shape=" + shape + "\nCOUNT"};
    }
    if (category == "recognition") return recognition_task(pick, scene);
    if (category == "comparison") {
        const auto [a, b] = pick.two_distinct(kSceneColors);
        return {"Are there more " + a + " objects than " + b + " objects?",
                "COMPARE color=" + a + "," + b};
    }
    if (category == "addition") {
        const auto& color = pick.from(kSceneColors);
        const auto& shape = pick.from(kSceneShapes);
        return {"Add a " + color + " " + shape + ". How many " + shape + "s are there now?",
                "ADD color=" + color + ",shape=" + shape + "\nFILTER shape=" + shape + "\nCOUNT"};
    }
    if (category == "removal") {
        const auto& color = pick.from(kSceneColors);
        return {"Remove all " + color + " objects. How many objects are left?",
                "REMOVE color=" + color + "\nCOUNT"};
    }
    if (category == "replacement") {
        const auto [a, b] = pick.two_distinct(kSceneColors);
        return {"Replace every " + a + " object with a " + b + " one. How many " + b +
                    " objects are there?",
                "REPLACE color=" + a + "," + b + "\nFILTER color=" + b + "\nCOUNT"};
    }
    throw UsageError("no task generator for category '" + category + "'");
}

std::string two_digits(std::size_t i) {
    return (i < 10 ? "0" : "") + std::to_string(i);
}

}  // namespace

std::vector<Task> generate_suite(std::uint64_t seed, std::size_t tasks_per_category) {
    if (tasks_per_category == 0) throw ConfigError("tasks_per_category must be at least 1");
    Picker pick(seed);
    const ToyExecutor executor;
    std::vector<Task> tasks;
    for (const auto& category : default_category_labels()) {
        for (std::size_t i = 0; i < tasks_per_category; ++i) {
            auto scene = make_scene(pick);
            const Draft draft = draft_task(category, pick, scene);
            Task t;
            t.id = category + "-" + two_digits(i);
            t.content = draft.question;
            t.payload = scene_to_json(scene);
            const auto res = executor.run(draft.program, t.payload);
            if (!res.ok) throw std::logic_error("reference program failed: " + res.diagnostic);
            t.truth = res.result;
            t.gold_category = category;
            tasks.push_back(std::move(t));
        }
    }
    return tasks;
}

void write_suite(std::ostream& out, const std::vector<Task>& tasks) {
    for (const auto& t : tasks) {
        nlohmann::ordered_json j;
        j["id"] = t.id;
        j["category"] = t.gold_category;
        j["content"] = t.content;
        j["payload"] = t.payload;
        if (t.truth) j["truth"] = *t.truth;
        out << j.dump() << '\n';
    }
}

SuiteSplit split_suite(const std::vector<Task>& tasks, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::map<std::string, std::vector<const Task*>> by_category;
    std::vector<std::string> order;
    for (const auto& t : tasks) {
        if (!by_category.contains(t.gold_category)) order.push_back(t.gold_category);
        by_category[t.gold_category].push_back(&t);
    }

    std::vector<std::vector<const Task*>> train_lists;
    std::vector<std::vector<const Task*>> test_lists;
    for (const auto& cat : order) {
        auto list = by_category[cat];
        for (std::size_t i = list.size(); i > 1; --i) {
            std::swap(list[i - 1], list[static_cast<std::size_t>(rng() % i)]);
        }
        const std::size_t half = list.size() / 2;
        train_lists.emplace_back(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(half));
        test_lists.emplace_back(list.begin() + static_cast<std::ptrdiff_t>(half), list.end());
    }

    auto interleave = [](const std::vector<std::vector<const Task*>>& lists) {
        std::vector<Task> out;
        for (std::size_t pos = 0;; ++pos) {
            bool any = false;
            for (const auto& l : lists) {
                if (pos < l.size()) {
                    out.push_back(*l[pos]);
                    any = true;
                }
            }
            if (!any) break;
        }
        return out;
    };
    return SuiteSplit{interleave(train_lists), interleave(test_lists)};
}

}  // namespace ehc
