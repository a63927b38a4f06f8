#include "weave/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "weave/embed.hpp"
#include "weave/kernels.hpp"

namespace weave::eval {

MatchMetrics match_metrics(std::span<const MatchedPair> predicted,
                           const std::set<PairKey>& ground_truth,
                           long long total_detected) {
    if (total_detected <= 0) {
        raise(ErrorCode::ZeroDetected, "total_detected must be positive");
    }
    MatchMetrics m;
    m.total_detected = total_detected;
    m.system_matches = static_cast<long long>(predicted.size());
    for (const MatchedPair& p : predicted) {
        if (ground_truth.contains({p.entry_track, p.exit_track})) {
            ++m.true_positives;
        } else {
            ++m.false_positives;
        }
    }
    m.tpr = static_cast<double>(m.system_matches) / static_cast<double>(m.total_detected);
    m.precision = m.system_matches == 0
                      ? 0.0
                      : static_cast<double>(m.true_positives) / static_cast<double>(m.system_matches);
    return m;
}

ReidMetrics cmc_map(std::span<const LabeledEmbedding> query,
                    std::span<const LabeledEmbedding> gallery,
                    std::size_t max_rank) {
    if (query.empty()) raise(ErrorCode::EmptyInput, "query set is empty");
    if (gallery.empty()) raise(ErrorCode::EmptyInput, "gallery set is empty");
    if (max_rank == 0) raise(ErrorCode::EmptyInput, "max_rank must be >= 1");

    std::size_t ranks = std::min(max_rank, gallery.size());
    std::vector<long long> hits_by_rank(ranks, 0);
    double ap_sum = 0.0;

    std::vector<std::size_t> order(gallery.size());
    std::vector<double> sims(gallery.size());

    for (const LabeledEmbedding& q : query) {
        std::size_t correct_total = 0;
        for (const LabeledEmbedding& g : gallery) {
            if (g.identity == q.identity) ++correct_total;
        }
        if (correct_total == 0) {
            raise(ErrorCode::QueryIdentityAbsentFromGallery,
                  "query identity '" + q.identity + "' has no gallery instance");
        }

        for (std::size_t j = 0; j < gallery.size(); ++j) {
            sims[j] = embed::cosine_similarity(q.embedding, gallery[j].embedding);
        }
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return sims[a] > sims[b];
        });

        std::size_t correct_seen = 0;
        double ap = 0.0;
        for (std::size_t rank = 0; rank < gallery.size(); ++rank) {
            if (gallery[order[rank]].identity == q.identity) {
                if (correct_seen == 0 && rank < ranks) {
                    ++hits_by_rank[rank];
                }
                ++correct_seen;
                ap += static_cast<double>(correct_seen) / static_cast<double>(rank + 1);
            }
        }
        ap_sum += ap / static_cast<double>(correct_total);
    }

    ReidMetrics out;
    out.mean_average_precision = ap_sum / static_cast<double>(query.size());
    out.cmc.resize(ranks);
    long long cumulative = 0;
    for (std::size_t k = 0; k < ranks; ++k) {
        cumulative += hits_by_rank[k];
        out.cmc[k] = static_cast<double>(cumulative) / static_cast<double>(query.size());
    }
    return out;
}

double id_loss(const std::vector<std::vector<double>>& predicted_probabilities,
               const std::vector<std::size_t>& true_labels) {
    if (predicted_probabilities.size() != true_labels.size()) {
        raise(ErrorCode::InvalidDistribution,
              "row count " + std::to_string(predicted_probabilities.size()) +
                  " does not match label count " + std::to_string(true_labels.size()));
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < predicted_probabilities.size(); ++i) {
        const std::vector<double>& row = predicted_probabilities[i];
        if (row.empty()) {
            raise(ErrorCode::InvalidDistribution, "row " + std::to_string(i) + " is empty");
        }
        double sum = 0.0;
        for (double p : row) {
            if (!std::isfinite(p) || p < 0.0) {
                raise(ErrorCode::InvalidDistribution,
                      "row " + std::to_string(i) + " has a negative or non-finite probability");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            raise(ErrorCode::InvalidDistribution,
                  "row " + std::to_string(i) + " sums to " + std::to_string(sum));
        }
        if (true_labels[i] >= row.size()) {
            raise(ErrorCode::IndexOutOfRange,
                  "label " + std::to_string(true_labels[i]) + " outside row of size " +
                      std::to_string(row.size()));
        }
        double p = std::clamp(row[true_labels[i]], 1e-12, 1.0);
        loss -= std::log(p);
    }
    return loss;
}

double soft_triplet_loss(std::span<const EmbeddingVector> anchors,
                         std::span<const EmbeddingVector> positives,
                         std::span<const EmbeddingVector> negatives) {
    if (anchors.size() != positives.size() || anchors.size() != negatives.size()) {
        raise(ErrorCode::DimensionMismatch, "anchor/positive/negative counts differ");
    }
    if (anchors.empty()) {
        raise(ErrorCode::EmptyInput, "triplet batch is empty");
    }
    std::size_t dim = anchors[0].dim();
    auto check_dim = [&](const EmbeddingVector& e) {
        if (e.dim() != dim) {
            raise(ErrorCode::DimensionMismatch, "triplet embeddings have mixed dimensions");
        }
    };
    for (const auto& e : anchors) check_dim(e);
    for (const auto& e : positives) check_dim(e);
    for (const auto& e : negatives) check_dim(e);

    auto distance = [&](const EmbeddingVector& a, const EmbeddingVector& b) {
        return std::sqrt(kernels::squared_l2_distance(a.data(), b.data(), dim));
    };

    std::size_t n = anchors.size();
    double total = 0.0;
    std::vector<double> margins(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d_ap = distance(anchors[i], positives[i]);
        double max_margin = 0.0;  // the implicit exp(0) term
        for (std::size_t j = 0; j < n; ++j) {
            margins[j] = d_ap - distance(anchors[i], negatives[j]);
            max_margin = std::max(max_margin, margins[j]);
        }
        double acc = std::exp(-max_margin);  // the 1 in log(1 + ...)
        for (std::size_t j = 0; j < n; ++j) {
            acc += std::exp(margins[j] - max_margin);
        }
        total += max_margin + std::log(acc);
    }
    return total / static_cast<double>(n);
}

}  // namespace weave::eval
