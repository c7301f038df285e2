#include "ehc/category.hpp"

#include <set>

#include "ehc/errors.hpp"

namespace ehc {

const std::vector<std::string>& default_category_labels() {
    static const std::vector<std::string> labels = {
        "judgment", "counting", "recognition", "comparison", "addition", "removal", "replacement"};
    return labels;
}

CategorySet::CategorySet(std::vector<std::string> labels, const Embedder& embedder)
    : labels_(std::move(labels)) {
    if (labels_.size() < 2) throw ConfigError("a category set needs at least two labels");
    std::set<std::string> seen;
    for (const auto& l : labels_) {
        if (!seen.insert(l).second) throw ConfigError("duplicate category label '" + l + "'");
    }
    embeddings_.reserve(labels_.size());
    for (const auto& l : labels_) embeddings_.push_back(embedder.embed(l));
}

CategoryId CategorySet::find(std::string_view label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == label) return CategoryId{static_cast<std::uint32_t>(i)};
    }
    throw NotFoundError("unknown category '" + std::string(label) + "'");
}

Classification classify(std::string_view candidate_label, const CategorySet& categories,
                        const Embedder& embedder) {
    const EmbeddingVector query = embedder.embed(candidate_label);
    Classification out;
    out.degenerate = query.is_zero();
    out.similarity = cosine_sim(query, categories.embeddings().front());
    for (std::size_t k = 1; k < categories.size(); ++k) {
        const double s = cosine_sim(query, categories.embeddings()[k]);
        if (s > out.similarity) {
            out.similarity = s;
            out.category = CategoryId{static_cast<std::uint32_t>(k)};
        }
    }
    return out;
}

}  // namespace ehc
