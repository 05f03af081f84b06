#pragma once

#include <string>
#include <vector>

#include "segmenter/dataset.hpp"
#include "segmenter/dbscan.hpp"
#include "segmenter/forest.hpp"
#include "segmenter/tsne.hpp"

namespace segmenter {

struct PipelineConfig {
    TsneConfig tsne;
    DbscanConfig dbscan;
    ForestConfig forest;
    bool standardize_input = true;

    void validate(int n_points, int n_features) const;
};

struct FeatureSummary {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    int count = 0;
};

struct ClusterProfile {
    int label = 0;
    int size = 0;
    std::vector<double> mean;              // per feature
    std::vector<FeatureSummary> features;  // per feature
};

struct ClusterProfileSet {
    std::vector<std::string> feature_names;
    std::vector<ClusterProfile> clusters;  // in label order
};

struct SegmentationResult {
    Embedding embedding;
    ClusterAssignment assignment;
    ForestModel model;
    ClusterProfileSet profiles;
};

// Per-cluster, per-feature summaries of x (count, mean, five-number spread
// with linearly interpolated quartiles).
ClusterProfileSet cluster_profiles(const Matrix& x, const std::vector<std::string>& names,
                                   const ClusterAssignment& a);

// Full pipeline: optional standardization, embedding, density clustering of
// the embedding, forest trained to reproduce the cluster labels from the
// same feature matrix the embedding saw, plus profiles of that matrix.
SegmentationResult segment(const Dataset& d, const PipelineConfig& cfg);

// The stages after the embedding, for callers that reuse one embedding
// across several clustering settings. `prepared` must be the exact matrix
// the embedding was computed from.
SegmentationResult segment_with_embedding(const Dataset& prepared, const PipelineConfig& cfg,
                                          Embedding embedding);

}  // namespace segmenter
