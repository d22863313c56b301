#include "graphmind/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "graphmind/errors.hpp"
#include "graphmind/text.hpp"

namespace graphmind {

Embedding TrigramEmbedder::operator()(std::string_view text) const {
    std::string normalized = normalize_text(text);
    Embedding vec(dim_, 0.0);
    if (normalized.empty()) return vec;

    std::string padded;
    padded.reserve(normalized.size() + 2);
    padded.push_back('#');
    padded += normalized;
    padded.push_back('#');

    // Trigrams over bytes: multi-byte codepoints contribute byte-level
    // n-grams, which is still deterministic and discriminative enough for
    // nearest-neighbor linking.
    if (padded.size() < 3) return vec;
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
        std::uint64_t h = fnv1a64(std::string_view(padded).substr(i, 3));
        vec[h % dim_] += 1.0;
    }

    double norm_sq = 0.0;
    for (double x : vec) norm_sq += x * x;
    double norm = std::sqrt(norm_sq);
    if (norm > 0.0) {
        for (double& x : vec) x /= norm;
    }
    return vec;
}

Embedding embed_text(std::string_view text) {
    static const TrigramEmbedder embedder;
    return embedder(text);
}

double cosine(const Embedding& a, const Embedding& b) {
    if (a.size() != b.size()) {
        throw ContractViolation("cosine: dimension mismatch");
    }
    double dot = 0.0;
    bool a_zero = true;
    bool b_zero = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        if (a[i] != 0.0) a_zero = false;
        if (b[i] != 0.0) b_zero = false;
    }
    if (a_zero || b_zero) return 0.0;
    return std::clamp(dot, -1.0, 1.0);
}

} // namespace graphmind
