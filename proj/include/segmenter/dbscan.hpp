#pragma once

#include <vector>

#include "segmenter/tsne.hpp"

namespace segmenter {

inline constexpr int kNoise = -1;

struct DbscanConfig {
    // Absolute epsilon is this constant times the mean pairwise distance of
    // the embedding being clustered.
    double epsilon_constant = 0.1;
    int min_pts = 4;
    bool noise_as_single_cluster = false;

    void validate() const;
};

struct ClusterAssignment {
    std::vector<int> labels;         // per point, in [0, n_clusters)
    std::vector<int> cluster_sizes;  // descending
    double epsilon_used = 0.0;

    int n_clusters() const { return static_cast<int>(cluster_sizes.size()); }
    int nonsingleton_count() const;
    std::vector<std::vector<int>> clusters() const;  // member indices per label, ascending
};

double epsilon_from_constant(const Embedding& e, double c);

// Density clustering over 2-d points. Returns one raw label per point in
// creation order, kNoise for unreachable points. A point is core iff its
// closed eps-ball (itself included) holds >= min_pts points; clusters are the
// connected components of core points; border points go to the first cluster
// that reaches them in scan order.
std::vector<int> dbscan_raw(const Matrix& coords, double eps, int min_pts);

// Size-ordered final labels. Noise becomes singleton clusters (or one shared
// cluster), then everything is sorted by size descending, ties broken by the
// smallest original member index, and relabeled 0..K-1.
ClusterAssignment finalize_assignment(const std::vector<int>& raw_labels,
                                      bool noise_as_single_cluster = false);

ClusterAssignment cluster_embedding(const Embedding& e, const DbscanConfig& cfg);

}  // namespace segmenter
