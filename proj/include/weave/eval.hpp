#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "weave/model.hpp"

namespace weave::eval {

/// Matching-quality counters. tpr follows the coverage definition used for
/// weaving analysis: system-identified matches over all vehicles detected.
struct MatchMetrics {
    long long true_positives = 0;
    long long false_positives = 0;
    long long system_matches = 0;
    long long total_detected = 0;
    double tpr = 0.0;
    double precision = 0.0;
};

using PairKey = std::pair<std::string, std::string>;  // (entry_track, exit_track)

/// Scores predicted pairs against ground truth. Throws ZeroDetected when
/// total_detected <= 0. precision is 0 when there are no system matches.
MatchMetrics match_metrics(std::span<const MatchedPair> predicted,
                           const std::set<PairKey>& ground_truth,
                           long long total_detected);

/// Retrieval-quality metrics. cmc[k-1] holds the rank-k rate.
struct ReidMetrics {
    double mean_average_precision = 0.0;
    std::vector<double> cmc;

    double cmc_at_rank(std::size_t rank) const {
        if (cmc.empty()) return 0.0;
        return cmc[std::min(rank, cmc.size()) - 1];
    }
};

struct LabeledEmbedding {
    std::string identity;
    EmbeddingVector embedding;
};

/// Ranks the gallery by descending cosine similarity per query; cmc[k] is
/// the fraction of queries with a correct identity in the top k, and mAP
/// averages per-query average precision over all correct instances.
/// Throws EmptyInput on an empty query or gallery set, and
/// QueryIdentityAbsentFromGallery when a query identity never occurs.
ReidMetrics cmc_map(std::span<const LabeledEmbedding> query,
                    std::span<const LabeledEmbedding> gallery,
                    std::size_t max_rank);

/// Cross-entropy of predicted class distributions against one-hot labels:
/// -sum_i log p[i][label_i], with probabilities clamped to [1e-12, 1].
/// Rows must sum to 1 within 1e-6. Throws InvalidDistribution.
double id_loss(const std::vector<std::vector<double>>& predicted_probabilities,
               const std::vector<std::size_t>& true_labels);

/// Batch soft triplet loss with Euclidean embedding distance:
/// mean_i log(1 + sum_j exp(d(a_i, p_i) - d(a_i, n_j))), computed with a
/// log-sum-exp shift so large margins cannot overflow.
double soft_triplet_loss(std::span<const EmbeddingVector> anchors,
                         std::span<const EmbeddingVector> positives,
                         std::span<const EmbeddingVector> negatives);

}  // namespace weave::eval
