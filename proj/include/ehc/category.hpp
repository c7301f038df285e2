#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ehc/embedding.hpp"

namespace ehc {

/// Index into a CategorySet.
struct CategoryId {
    std::uint32_t value = 0;

    friend auto operator<=>(const CategoryId&, const CategoryId&) = default;
};

/// The seven instruction classes, in canonical order.
const std::vector<std::string>& default_category_labels();

/// Ordered, distinct category labels plus their embeddings (computed once).
class CategorySet {
public:
    CategorySet(std::vector<std::string> labels, const Embedder& embedder);

    static CategorySet defaults(const Embedder& embedder) {
        return CategorySet(default_category_labels(), embedder);
    }

    std::size_t size() const noexcept { return labels_.size(); }
    const std::string& label(CategoryId id) const { return labels_.at(id.value); }
    const EmbeddingVector& embedding(CategoryId id) const { return embeddings_.at(id.value); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::vector<EmbeddingVector>& embeddings() const noexcept { return embeddings_; }

    /// Exact label lookup. Throws NotFoundError for an unknown label.
    CategoryId find(std::string_view label) const;

private:
    std::vector<std::string> labels_;
    std::vector<EmbeddingVector> embeddings_;
};

struct Classification {
    CategoryId category;
    double similarity = 0.0;
    /// Candidate embedded to the zero vector; category falls back to index 0.
    bool degenerate = false;
};

/// argmax_k cosine_sim(embed(candidate), categories.embedding(k)); ties go to
/// the smaller index.
Classification classify(std::string_view candidate_label, const CategorySet& categories,
                        const Embedder& embedder);

}  // namespace ehc
