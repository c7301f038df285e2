#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ehc {

/// Names of the `{name}` placeholders in `tmpl`, in order of first use.
/// A placeholder is a brace pair around [a-z_]+; other braces are literal.
std::vector<std::string> template_placeholders(std::string_view tmpl);

/// Throws ConfigError naming the first placeholder not in `allowed`.
void check_placeholders(std::string_view tmpl, const std::set<std::string>& allowed,
                        std::string_view template_name);

/// Substitutes every placeholder. Values are inserted verbatim and not
/// rescanned. Throws ConfigError for a placeholder with no value.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

/// The five prompt skeletons the agent uses.
struct PromptTemplates {
    std::string trajectory;  // {task} {history} {reflections} {categories}
    std::string reflection;  // {task} {history} {trajectory} {feedback}
    std::string labeling;    // {task} {categories}
    std::string insight;     // {category} {insights} {pairs} {groups}
    std::string inference;   // {task} {insights} {exemplars}

    /// Validates every template against its placeholder set.
    void validate() const;

    /// Loads trajectory.txt, reflection.txt, labeling.txt, insight.txt and
    /// inference.txt from `dir`.
    static PromptTemplates load_dir(const std::filesystem::path& dir);
};

std::string read_text_file(const std::filesystem::path& path);

}  // namespace ehc
