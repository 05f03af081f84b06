#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "segmenter/pipeline.hpp"

namespace segmenter {

inline constexpr int kUnmatched = -1;

// best_perm[t] is the full-data cluster label matched to training cluster t,
// or kUnmatched when no candidate shares a row.
struct MatchingPermutation {
    std::vector<int> best_perm;
};

struct Metrics {
    double accuracy = 0;
    double precision_weighted = 0;
    double recall_weighted = 0;
    double f1_weighted = 0;
};

struct FoldOutcome {
    int fold_index = 0;
    Metrics metrics;
    MatchingPermutation matching;
    double epsilon_constant = 0;
    bool tuned = false;
    int train_cluster_count = 0;
    int train_nonsingleton_count = 0;
};

struct GeneralizationReport {
    std::vector<FoldOutcome> per_fold;
    Metrics mean_weighted;  // arithmetic mean of each metric across folds
    std::vector<double> epsilon_constants_used;
    int full_cluster_count = 0;
    int full_nonsingleton_count = 0;
    double ground_truth_epsilon = 0;  // absolute epsilon of the full-data run
};

struct EpsilonCandidate {
    double constant = 0;
    double mean_f1 = 0;
    int nonsingleton_clusters = 0;  // on the full training set
    bool accepted = false;
};

struct TuningReport {
    std::vector<EpsilonCandidate> candidates;  // ascending by constant
    double chosen = 0;
};

// Greedy largest-first matching: training clusters (already size-ordered by
// label) each take the unclaimed full-data cluster with the biggest row
// overlap; zero overlap leaves them unmatched. Both inputs index one shared
// row universe.
MatchingPermutation match_clusters(const std::vector<std::vector<int>>& train_clusters,
                                   const std::vector<std::vector<int>>& full_clusters);

// Accuracy plus support-weighted one-vs-rest precision/recall/F1 over the
// classes present in y_true. Zero denominators score 0.
Metrics weighted_metrics(std::span<const int> y_true, std::span<const int> y_pred);

// Inner 5-fold selection of the epsilon constant on a training set:
// candidates failing the non-singleton floor on the whole training set are
// discarded, the rest scored by mean weighted F1, ties to the smaller c.
TuningReport tune_epsilon_detailed(const Dataset& train, std::span<const double> grid,
                                   const PipelineConfig& cfg, int min_clusters);
double tune_epsilon(const Dataset& train, std::span<const double> grid,
                    const PipelineConfig& cfg, int min_clusters);

// k-fold protocol against the full-data segmentation as ground truth. A
// single-value grid is taken as a fixed constant (no inner tuning).
GeneralizationReport generalization_run(const Dataset& d, const PipelineConfig& cfg, int k,
                                        std::span<const double> grid, int min_clusters,
                                        uint64_t seed);

}  // namespace segmenter
