#include <gtest/gtest.h>

#include "ehc/errors.hpp"
#include "ehc/executor.hpp"

namespace ehc {
namespace {

nlohmann::json scene() {
    return scene_to_json({
        {{"color", "red"}, {"shape", "cube"}, {"size", "small"}},
        {{"color", "red"}, {"shape", "cube"}, {"size", "large"}},
        {{"color", "red"}, {"shape", "sphere"}, {"size", "small"}},
        {{"color", "blue"}, {"shape", "cube"}, {"size", "large"}},
        {{"color", "green"}, {"shape", "cylinder"}, {"size", "small"}},
    });
}

std::string run(std::string_view program) {
    auto r = ToyExecutor().run(program, scene());
    return r.ok ? r.result : "ERR " + r.diagnostic;
}

TEST(ToyExecutor, Count) {
    EXPECT_EQ(run("FILTER color=red\nFILTER shape=cube\nCOUNT"), "2");
    EXPECT_EQ(run("COUNT"), "5");
    EXPECT_EQ(run("filter color=purple\ncount"), "0");
}

TEST(ToyExecutor, Exists) {
    EXPECT_EQ(run("FILTER color=green\nEXISTS"), "yes");
    EXPECT_EQ(run("FILTER color=yellow\nEXISTS"), "no");
}

TEST(ToyExecutor, Query) {
    EXPECT_EQ(run("FILTER shape=cylinder\nQUERY color"), "green");
    EXPECT_EQ(run("FILTER shape=cube\nQUERY color"), "ERR line 2: QUERY needs exactly one selected object, have 3");
    EXPECT_EQ(run("FILTER shape=sphere\nQUERY weight"), "ERR line 2: object has no weight");
}

TEST(ToyExecutor, Compare) {
    EXPECT_EQ(run("COMPARE color=red,blue"), "yes");
    EXPECT_EQ(run("COMPARE color=blue,red"), "no");
    EXPECT_EQ(run("FILTER shape=cube\nCOMPARE color=blue,green"), "yes");
}

TEST(ToyExecutor, AddRemoveReplace) {
    EXPECT_EQ(run("ADD color=red,shape=cylinder\nFILTER shape=cylinder\nCOUNT"), "2");
    EXPECT_EQ(run("REMOVE color=red\nCOUNT"), "2");
    EXPECT_EQ(run("REPLACE color=red,blue\nFILTER color=blue\nCOUNT"), "4");
    // Selection resets after a mutation.
    EXPECT_EQ(run("FILTER color=green\nREMOVE shape=sphere\nCOUNT"), "4");
}

TEST(ToyExecutor, LastAnsweringOpWins) { EXPECT_EQ(run("COUNT\nFILTER color=blue\nEXISTS"), "yes"); }

TEST(ToyExecutor, Diagnostics) {
    EXPECT_EQ(run("FILTER color=red"), "ERR program produced no answer");
    EXPECT_EQ(run(""), "ERR program produced no answer");
    EXPECT_EQ(run("COUNT\nJUMP 3"), "ERR line 2: unknown op 'JUMP'");
    EXPECT_EQ(run("FILTER red"), "ERR line 1: expected attr=value");
    EXPECT_EQ(run("COMPARE color=red"), "ERR line 1: wrong number of values");
    EXPECT_EQ(run("ADD"), "ERR line 1: ADD needs at least one attribute");
}

TEST(ToyExecutor, ObservationPerLine) {
    auto r = ToyExecutor().run("FILTER color=red\nCOUNT", scene());
    EXPECT_EQ(r.observations, (std::vector<std::string>{"3 selected", "3"}));
}

TEST(ToyExecutor, MissingSceneIsEmpty) {
    auto r = ToyExecutor().run("COUNT", nlohmann::json::object());
    ASSERT_TRUE(r.ok);
    EXPECT_EQ(r.result, "0");
}

TEST(Scene, JsonRoundTrip) {
    const auto objects = scene_from_json(scene());
    EXPECT_EQ(objects.size(), 5u);
    EXPECT_EQ(scene_to_json(objects), scene());
}

TEST(AnswerMatchEvaluator, NormalizesCaseAndSpace) {
    AnswerMatchEvaluator eval;
    Task task{"t", "q", {}, std::string(" Yes "), ""};
    Trajectory traj;
    traj.final_answer = "yes\n";
    EXPECT_TRUE(eval.judge(task, traj).success);
    traj.final_answer = "no";
    auto v = eval.judge(task, traj);
    EXPECT_FALSE(v.success);
    EXPECT_EQ(v.feedback, "answer 'no' is incorrect");
    traj.final_answer = "";
    EXPECT_EQ(eval.judge(task, traj).feedback, "no answer produced");
}

TEST(AnswerMatchEvaluator, NoTruthIsUsageError) {
    Task task{"t", "q", {}, std::nullopt, ""};
    EXPECT_THROW(AnswerMatchEvaluator().judge(task, Trajectory{}), UsageError);
}

}  // namespace
}  // namespace ehc
