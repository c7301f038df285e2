#include "ehc/prompt_template.hpp"

#include <fstream>
#include <sstream>

#include "ehc/errors.hpp"

namespace ehc {

namespace {

bool is_name_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

// Calls on_text(literal) and on_name(name) over `tmpl` in order.
template <typename OnText, typename OnName>
void scan(std::string_view tmpl, OnText on_text, OnName on_name) {
    std::size_t i = 0;
    std::size_t literal_start = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            std::size_t j = i + 1;
            while (j < tmpl.size() && is_name_char(tmpl[j])) ++j;
            if (j > i + 1 && j < tmpl.size() && tmpl[j] == '}') {
                on_text(tmpl.substr(literal_start, i - literal_start));
                on_name(tmpl.substr(i + 1, j - i - 1));
                i = j + 1;
                literal_start = i;
                continue;
            }
        }
        ++i;
    }
    on_text(tmpl.substr(literal_start));
}

}  // namespace

std::vector<std::string> template_placeholders(std::string_view tmpl) {
    std::vector<std::string> names;
    scan(tmpl, [](std::string_view) {}, [&](std::string_view name) {
        for (const auto& n : names) {
            if (n == name) return;
        }
        names.emplace_back(name);
    });
    return names;
}

void check_placeholders(std::string_view tmpl, const std::set<std::string>& allowed,
                        std::string_view template_name) {
    for (const auto& name : template_placeholders(tmpl)) {
        if (!allowed.contains(name)) {
            throw ConfigError(std::string(template_name) + " template: unknown placeholder {" +
                              name + "}");
        }
    }
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size());
    scan(tmpl, [&](std::string_view text) { out.append(text); },
         [&](std::string_view name) {
             auto it = values.find(std::string(name));
             if (it == values.end()) {
                 throw ConfigError("template placeholder {" + std::string(name) + "} has no value");
             }
             out.append(it->second);
         });
    return out;
}

void PromptTemplates::validate() const {
    check_placeholders(trajectory, {"task", "history", "reflections", "categories"}, "trajectory");
    check_placeholders(reflection, {"task", "history", "trajectory", "feedback"}, "reflection");
    check_placeholders(labeling, {"task", "categories"}, "labeling");
    check_placeholders(insight, {"category", "insights", "pairs", "groups"}, "insight");
    check_placeholders(inference, {"task", "insights", "exemplars"}, "inference");
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PromptTemplates PromptTemplates::load_dir(const std::filesystem::path& dir) {
    PromptTemplates t{
        read_text_file(dir / "trajectory.txt"), read_text_file(dir / "reflection.txt"),
        read_text_file(dir / "labeling.txt"),   read_text_file(dir / "insight.txt"),
        read_text_file(dir / "inference.txt"),
    };
    t.validate();
    return t;
}

}  // namespace ehc
