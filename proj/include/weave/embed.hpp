#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "weave/model.hpp"

namespace weave::embed {

/// Dense row-major matrix of pairwise cosine similarities,
/// rows = entry observations, cols = exit observations.
struct SimilarityMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

/// Boolean mask with SimilarityMatrix shape.
struct FeasibilityMask {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> values;

    bool at(std::size_t i, std::size_t j) const { return values[i * cols + j] != 0; }
};

/// (a.b) / (|a||b|), accumulated in double, clamped to [-1, 1].
/// Throws DimensionMismatch or ZeroNormVector.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// 1 - cosine_similarity(a, b), in [0, 2].
double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b);

/// All-pairs cosine similarity. Norms are computed once per side; each cell
/// is one dot-product kernel call with a fixed summation order, so any
/// row partitioning of this loop reproduces the sequential result bit for bit.
SimilarityMatrix similarity_matrix(std::span<const EmbeddingVector> entries,
                                   std::span<const EmbeddingVector> exits);

/// mask(i, j) = sim(i, j) >= tau. The comparison is inclusive.
FeasibilityMask feasibility_from_threshold(const SimilarityMatrix& sim, double tau);

}  // namespace weave::embed
