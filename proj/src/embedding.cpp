#include "ehc/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ehc/errors.hpp"

namespace ehc {

double EmbeddingVector::norm() const {
    double sum = 0.0;
    for (double v : values_) sum += v * v;
    return std::sqrt(sum);
}

bool EmbeddingVector::is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

double cosine_sim(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw UsageError("cosine_sim: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()) + ")");
    }
    double dot = 0.0;
    double aa = 0.0;
    double bb = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        dot += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) return 0.0;
    // sqrt(aa)*sqrt(bb) rather than sqrt(aa*bb): the product is commutative,
    // so swapping operands cannot change the result.
    return std::clamp(dot / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ReferenceEmbedder::ReferenceEmbedder(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw ConfigError("embedding dimension must be positive");
}

namespace {

bool is_token_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

}  // namespace

EmbeddingVector ReferenceEmbedder::embed(std::string_view text) const {
    std::vector<double> acc(dim_, 0.0);
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        const std::uint64_t h = fnv1a64(token);
        acc[h % dim_] += (h >> 63) ? -1.0 : 1.0;
        token.clear();
    };
    for (unsigned char c : text) {
        if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
        if (is_token_char(c)) {
            token.push_back(static_cast<char>(c));
        } else {
            flush();
        }
    }
    flush();

    double sum = 0.0;
    for (double v : acc) sum += v * v;
    if (sum > 0.0) {
        const double n = std::sqrt(sum);
        for (double& v : acc) v /= n;
    }
    return EmbeddingVector(std::move(acc));
}

}  // namespace ehc
