#include <gtest/gtest.h>

#include "ehc/errors.hpp"
#include "ehc/inference.hpp"
#include "ehc/prompt_template.hpp"
#include "fixtures.hpp"

namespace ehc {
namespace {

using json = nlohmann::json;
using testing::AgentHarness;
using testing::red_cube_task;

json rule(const std::string& pattern, const std::string& response) {
    return {{"match", "substring"}, {"pattern", pattern}, {"response", response}};
}

json counting_script() {
    return {{"rules",
             {rule("Instruction:", "counting"),
              rule("Current task:", "FILTER color=red\nFILTER shape=cube\nCOUNT")}}};
}

MemoryRecord exemplar(RecordId id, CategoryId cat, std::string content) {
    MemoryRecord r;
    r.id = id;
    r.category = cat;
    r.content = std::move(content);
    r.embedding = EmbeddingVector(std::vector<double>(256, 0.0));
    return r;
}

TEST(Solve, RedCubes) {
    AgentHarness h(counting_script());
    auto ctx = h.context();
    InsightPool pool;
    auto answer = solve(red_cube_task(), ctx, pool);
    EXPECT_EQ(h.categories.label(answer.category), "counting");
    EXPECT_EQ(answer.candidate_label, "counting");
    EXPECT_TRUE(answer.executed);
    EXPECT_EQ(answer.result, "3");
    ASSERT_TRUE(answer.verdict.has_value());
    EXPECT_TRUE(*answer.verdict);
    EXPECT_EQ(answer.program, "FILTER color=red\nFILTER shape=cube\nCOUNT");
    EXPECT_EQ(h.llm->calls(), 2u);
    EXPECT_EQ(h.trace.events_for("solve.verdict").at(0).detail, "success");
}

TEST(Solve, EmptyMemoryAndPool) {
    AgentHarness h(counting_script());
    auto ctx = h.context();
    auto answer = solve(red_cube_task(), ctx, InsightPool{});
    const auto& text = answer.prompt.rendered;
    EXPECT_NE(text.find("(no examples)"), std::string::npos);
    EXPECT_NE(text.find("(no insights)"), std::string::npos);
    EXPECT_NE(text.find("Current task: How many red cubes are there?"), std::string::npos);
    EXPECT_TRUE(template_placeholders(text).empty());
}

TEST(Solve, GarbageLabelStillClassifies) {
    AgentHarness h(json{{"rules", {rule("Instruction:", "@@@ ???"), rule("Current task:", "COUNT")}}});
    auto ctx = h.context();
    auto answer = solve(red_cube_task(), ctx, InsightPool{});
    EXPECT_LT(answer.category.value, h.categories.size());
    EXPECT_EQ(answer.result, "4");
    EXPECT_FALSE(*answer.verdict);
}

TEST(Solve, NoTruthLeavesVerdictEmpty) {
    AgentHarness h(counting_script());
    auto ctx = h.context();
    auto task = red_cube_task();
    task.truth.reset();
    auto answer = solve(task, ctx, InsightPool{});
    EXPECT_FALSE(answer.verdict.has_value());
    EXPECT_EQ(answer.result, "3");
}

TEST(Solve, ExecutionErrorIsReported) {
    AgentHarness h(json{{"rules", {rule("Instruction:", "counting"), rule("Current task:", "JUMP")}}});
    auto ctx = h.context();
    auto answer = solve(red_cube_task(), ctx, InsightPool{});
    EXPECT_FALSE(answer.executed);
    EXPECT_EQ(answer.diagnostic, "line 1: unknown op 'JUMP'");
    EXPECT_FALSE(*answer.verdict);
}

TEST(Solve, ExemplarsAndInsightsStayInCategory) {
    AgentHarness h(counting_script());
    const auto counting = h.categories.find("counting");
    const auto judgment = h.categories.find("judgment");
    const auto query = h.embedder.embed("How many red cubes are there?");
    for (RecordId id = 1; id <= 6; ++id) {
        auto r = exemplar(id, id % 2 ? counting : judgment, "Question: q" + std::to_string(id) + "\n");
        r.embedding = query;
        h.memory.store(r);
    }
    InsightPool pool;
    pool.apply(counting, InsightOp::add("count-rule"));
    pool.apply(judgment, InsightOp::add("judge-rule"));

    auto ctx = h.context();
    auto answer = solve(red_cube_task(), ctx, pool);
    ASSERT_EQ(answer.prompt.exemplars.size(), 3u);
    for (const auto& ex : answer.prompt.exemplars) EXPECT_EQ(ex.category, counting);
    ASSERT_EQ(answer.prompt.insights.size(), 1u);
    EXPECT_EQ(answer.prompt.insights[0].text, "count-rule");
    EXPECT_EQ(answer.prompt.rendered.find("judge-rule"), std::string::npos);
    EXPECT_NE(answer.prompt.rendered.find("1. count-rule"), std::string::npos);
}

TEST(AssemblePrompt, InsightOrderAndExemplarLayout) {
    const CategoryId cat{1};
    std::vector<Insight> insights = {{1, cat, "weak", 2}, {2, cat, "strong", 5}, {3, cat, "tied", 2}};
    std::vector<MemoryRecord> ex = {exemplar(7, cat, "A\n"), exemplar(3, cat, "B")};
    auto b = assemble_prompt(red_cube_task(), cat, insights, ex, "{insights}--\n{exemplars}--{task}");
    EXPECT_EQ(b.rendered, "1. strong\n2. weak\n3. tied\n--\nA\n\nB\n--How many red cubes are there?");
    EXPECT_EQ(b.insights[0].id, 2u);
    EXPECT_EQ(b.exemplars[0].id, 7u);
}

TEST(AssemblePrompt, EmptyInputs) {
    auto b = assemble_prompt(red_cube_task(), CategoryId{0}, {}, {}, "{insights}{exemplars}");
    EXPECT_EQ(b.rendered, "(no insights)\n(no examples)\n");
}

TEST(AssemblePrompt, Deterministic) {
    const CategoryId cat{2};
    std::vector<Insight> insights = {{4, cat, "x", 3}, {9, cat, "y", 3}};
    const auto tmpl = testing::shipped_templates().inference;
    auto a = assemble_prompt(red_cube_task(), cat, insights, {exemplar(1, cat, "E")}, tmpl);
    auto b = assemble_prompt(red_cube_task(), cat, insights, {exemplar(1, cat, "E")}, tmpl);
    EXPECT_EQ(a.rendered, b.rendered);
}

TEST(AssemblePrompt, Errors) {
    const CategoryId cat{0};
    EXPECT_THROW(assemble_prompt(red_cube_task(), cat, {}, {}, "{task} {history}"), ConfigError);
    EXPECT_THROW(assemble_prompt(red_cube_task(), cat, {{1, CategoryId{1}, "t", 2}}, {}, "{task}"),
                 UsageError);
    EXPECT_THROW(assemble_prompt(red_cube_task(), cat, {}, {exemplar(1, CategoryId{3}, "E")}, "{task}"),
                 UsageError);
}

}  // namespace
}  // namespace ehc
