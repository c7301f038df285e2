#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ehc/trajectory.hpp"

namespace ehc {

inline const std::vector<std::string> kSceneColors = {"red", "blue", "green", "yellow"};
inline const std::vector<std::string> kSceneShapes = {"cube", "sphere", "cylinder"};
inline const std::vector<std::string> kSceneSizes = {"small", "large"};

/// `tasks_per_category` symbolic-scene tasks for each of the seven default
/// categories, category by category. Identical seeds give identical suites.
/// Task ids are "<category>-<nn>"; truths come from running each task's
/// reference program on its scene.
std::vector<Task> generate_suite(std::uint64_t seed, std::size_t tasks_per_category);

/// One JSON object per task, in suite order.
void write_suite(std::ostream& out, const std::vector<Task>& tasks);

struct SuiteSplit {
    std::vector<Task> train;
    std::vector<Task> test;
};

/// Per category: seeded shuffle, first floor(n/2) to train, the rest to test.
/// Both halves are interleaved across categories (round-robin by position).
SuiteSplit split_suite(const std::vector<Task>& tasks, std::uint64_t seed);

}  // namespace ehc
