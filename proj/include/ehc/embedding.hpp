#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ehc {

inline constexpr std::size_t kDefaultEmbeddingDim = 256;

/// Dense embedding. The all-zero vector is the embedding of empty text.
class EmbeddingVector {
public:
    EmbeddingVector() = default;
    explicit EmbeddingVector(std::size_t dim) : values_(dim, 0.0) {}
    explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {}

    std::size_t dim() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    double norm() const;
    bool is_zero() const;

    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

private:
    std::vector<double> values_;
};

/// Cosine similarity, accumulated in index-ascending order so the result is
/// bit-reproducible and exactly symmetric. Zero when either side is all-zero.
/// Throws UsageError on dimension mismatch.
double cosine_sim(const EmbeddingVector& a, const EmbeddingVector& b);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual EmbeddingVector embed(std::string_view text) const = 0;
    virtual std::size_t dim() const noexcept = 0;
};

/// Hashed bag-of-tokens embedder.
///
/// Text is ASCII-lowercased and split on runs of anything that is not
/// [a-z0-9]. Each token contributes +1 or -1 at index `fnv1a64(token) % dim`,
/// the sign being -1 iff bit 63 of the hash is set. The sum is L2-normalized.
class ReferenceEmbedder final : public Embedder {
public:
    explicit ReferenceEmbedder(std::size_t dim = kDefaultEmbeddingDim);

    EmbeddingVector embed(std::string_view text) const override;
    std::size_t dim() const noexcept override { return dim_; }

private:
    std::size_t dim_;
};

}  // namespace ehc
