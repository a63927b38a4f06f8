#include "weave/embed.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "weave/kernels.hpp"

namespace weave::embed {

namespace {

double checked_squared_norm(const EmbeddingVector& v, const char* side, std::size_t index) {
    double n2 = kernels::squared_norm(v.data(), v.dim());
    if (n2 == 0.0) {
        raise(ErrorCode::ZeroNormVector,
              std::string(side) + " embedding " + std::to_string(index) + " has zero norm");
    }
    return n2;
}

inline double clamp_unit(double x) {
    return std::clamp(x, -1.0, 1.0);
}

}  // namespace

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        raise(ErrorCode::DimensionMismatch,
              "embedding dimensions differ: " + std::to_string(a.dim()) + " vs " +
                  std::to_string(b.dim()));
    }
    double na2 = kernels::squared_norm(a.data(), a.dim());
    double nb2 = kernels::squared_norm(b.data(), b.dim());
    if (na2 == 0.0 || nb2 == 0.0) {
        raise(ErrorCode::ZeroNormVector, "cosine similarity of a zero-norm embedding");
    }
    double d = kernels::dot(a.data(), b.data(), a.dim());
    return clamp_unit(d / std::sqrt(na2 * nb2));
}

double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
    return 1.0 - cosine_similarity(a, b);
}

SimilarityMatrix similarity_matrix(std::span<const EmbeddingVector> entries,
                                   std::span<const EmbeddingVector> exits) {
    SimilarityMatrix m;
    m.rows = entries.size();
    m.cols = exits.size();
    m.values.assign(m.rows * m.cols, 0.0);
    if (m.rows == 0 || m.cols == 0) return m;

    std::size_t dim = entries.empty() ? exits[0].dim() : entries[0].dim();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].dim() != dim) {
            raise(ErrorCode::DimensionMismatch,
                  "entry embedding " + std::to_string(i) + " has dimension " +
                      std::to_string(entries[i].dim()) + ", expected " + std::to_string(dim));
        }
    }
    for (std::size_t j = 0; j < exits.size(); ++j) {
        if (exits[j].dim() != dim) {
            raise(ErrorCode::DimensionMismatch,
                  "exit embedding " + std::to_string(j) + " has dimension " +
                      std::to_string(exits[j].dim()) + ", expected " + std::to_string(dim));
        }
    }

    std::vector<double> entry_norm2(entries.size());
    std::vector<double> exit_norm2(exits.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        entry_norm2[i] = checked_squared_norm(entries[i], "entry", i);
    }
    for (std::size_t j = 0; j < exits.size(); ++j) {
        exit_norm2[j] = checked_squared_norm(exits[j], "exit", j);
    }

    for (std::size_t i = 0; i < entries.size(); ++i) {
        double* row = m.values.data() + i * m.cols;
        for (std::size_t j = 0; j < exits.size(); ++j) {
            double d = kernels::dot(entries[i].data(), exits[j].data(), dim);
            row[j] = clamp_unit(d / std::sqrt(entry_norm2[i] * exit_norm2[j]));
        }
    }
    return m;
}

FeasibilityMask feasibility_from_threshold(const SimilarityMatrix& sim, double tau) {
    FeasibilityMask mask;
    mask.rows = sim.rows;
    mask.cols = sim.cols;
    mask.values.resize(sim.values.size());
    for (std::size_t k = 0; k < sim.values.size(); ++k) {
        mask.values[k] = sim.values[k] >= tau ? 1 : 0;
    }
    return mask;
}

}  // namespace weave::embed
