#pragma once

#include <functional>
#include <string_view>
#include <vector>

namespace graphmind {

// Unit-length dense vector, or all zeros for empty text.
using Embedding = std::vector<double>;

// Text -> unit vector. Implementations must be pure so the whole pipeline
// stays deterministic and replayable.
using Embedder = std::function<Embedding(std::string_view)>;

// Default embedder: normalize the text, pad with '#' markers, hash every
// character trigram into `dim` buckets (FNV-1a), count, L2-normalize. Runs
// with zero model downloads and is bitwise reproducible.
class TrigramEmbedder {
public:
    static constexpr std::size_t kDefaultDim = 256;

    explicit TrigramEmbedder(std::size_t dim = kDefaultDim) : dim_(dim) {}

    Embedding operator()(std::string_view text) const;
    std::size_t dim() const { return dim_; }

private:
    std::size_t dim_;
};

Embedding embed_text(std::string_view text);

// Dot product of unit vectors clamped to [-1, 1]; 0 if either vector is all
// zeros. Throws ContractViolation on dimension mismatch.
double cosine(const Embedding& a, const Embedding& b);

} // namespace graphmind
