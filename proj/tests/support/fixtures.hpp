#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include <memory>

#include "ehc/config.hpp"
#include "ehc/executor.hpp"
#include "ehc/experience.hpp"
#include "ehc/llm.hpp"
#include "ehc/memory.hpp"
#include "ehc/prompt_template.hpp"

namespace ehc::testing {

inline EmbeddingVector vec(std::initializer_list<double> values) {
    return EmbeddingVector(std::vector<double>(values));
}

inline MemoryRecord make_record(RecordId id, EmbeddingVector embedding, std::uint32_t category = 0,
                                RecordKind kind = RecordKind::seed) {
    MemoryRecord r;
    r.id = id;
    r.category = CategoryId{category};
    r.kind = kind;
    r.content = "record " + std::to_string(id);
    r.embedding = std::move(embedding);
    if (kind == RecordKind::failure) r.reflections = "reflection for " + std::to_string(id);
    return r;
}

inline PromptTemplates shipped_templates() {
    return PromptTemplates::load_dir(default_data_dir() / "templates");
}

inline Script script_from(const nlohmann::json& j) { return Script::from_json(j); }

/// Collaborators for run_task / solve with the reference embedder, the toy
/// executor and the shipped templates.
struct AgentHarness {
    ReferenceEmbedder embedder;
    CategorySet categories = CategorySet::defaults(embedder);
    HierarchicalMemory memory{MemoryOptions{16, 256, false}};
    ToyExecutor executor;
    AnswerMatchEvaluator evaluator;
    PromptTemplates templates = shipped_templates();
    std::unique_ptr<ScriptedBackend> llm;
    RunTrace trace;

    AgentHarness() : AgentHarness(nlohmann::json::object()) {}
    explicit AgentHarness(const nlohmann::json& script)
        : llm(std::make_unique<ScriptedBackend>(
              script_from(script.is_null() ? nlohmann::json::object() : script))) {}

    AgentContext context() {
        return AgentContext{memory, embedder, categories, *llm, executor, evaluator, templates,
                            RetrievalSettings{}, CompletionSettings{}, &trace};
    }
};

/// Scene with three red cubes and one blue sphere.
inline Task red_cube_task(std::string id = "counting-t", std::string content = "How many red cubes are there?") {
    Task t;
    t.id = std::move(id);
    t.content = std::move(content);
    t.payload = scene_to_json({{{"color", "red"}, {"shape", "cube"}},
                               {{"color", "red"}, {"shape", "cube"}},
                               {{"color", "red"}, {"shape", "cube"}},
                               {{"color", "blue"}, {"shape", "sphere"}}});
    t.truth = "3";
    t.gold_category = "counting";
    return t;
}

}  // namespace ehc::testing
