#include "segmenter/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace segmenter {

namespace {

// Linear interpolation between order statistics; v must be sorted ascending.
double quantile_sorted(const std::vector<double>& v, double p) {
    size_t m = v.size();
    if (m == 1) return v[0];
    double pos = p * static_cast<double>(m - 1);
    size_t lo = static_cast<size_t>(pos);
    if (lo + 1 >= m) return v[m - 1];
    double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

}  // namespace

void PipelineConfig::validate(int n_points, int n_features) const {
    tsne.validate(n_points);
    dbscan.validate();
    forest.validate(n_features);
}

ClusterProfileSet cluster_profiles(const Matrix& x, const std::vector<std::string>& names,
                                   const ClusterAssignment& a) {
    if (static_cast<int>(a.labels.size()) != x.rows)
        throw std::invalid_argument("assignment does not match matrix rows");
    if (static_cast<int>(names.size()) != x.cols)
        throw std::invalid_argument("feature name count does not match columns");

    ClusterProfileSet out;
    out.feature_names = names;
    std::vector<std::vector<int>> members = a.clusters();
    out.clusters.reserve(members.size());

    for (size_t k = 0; k < members.size(); ++k) {
        const std::vector<int>& rows = members[k];
        ClusterProfile p;
        p.label = static_cast<int>(k);
        p.size = static_cast<int>(rows.size());
        p.mean.resize(x.cols);
        p.features.resize(x.cols);
        std::vector<double> vals(rows.size());
        for (int c = 0; c < x.cols; ++c) {
            double sum = 0;
            for (size_t i = 0; i < rows.size(); ++i) {
                vals[i] = x(rows[i], c);
                sum += vals[i];
            }
            std::sort(vals.begin(), vals.end());
            p.mean[c] = sum / static_cast<double>(rows.size());
            FeatureSummary& s = p.features[c];
            s.count = p.size;
            s.min = vals.front();
            s.max = vals.back();
            s.q1 = quantile_sorted(vals, 0.25);
            s.median = quantile_sorted(vals, 0.50);
            s.q3 = quantile_sorted(vals, 0.75);
        }
        out.clusters.push_back(std::move(p));
    }
    return out;
}

SegmentationResult segment_with_embedding(const Dataset& prepared, const PipelineConfig& cfg,
                                          Embedding embedding) {
    if (embedding.coords.rows != prepared.n_points())
        throw std::invalid_argument("embedding does not match the dataset");

    SegmentationResult r;
    r.embedding = std::move(embedding);
    r.assignment = cluster_embedding(r.embedding, cfg.dbscan);
    r.model = train_forest(prepared.values, r.assignment.labels, cfg.forest,
                           prepared.feature_names);
    r.profiles = cluster_profiles(prepared.values, prepared.feature_names, r.assignment);
    return r;
}

SegmentationResult segment(const Dataset& d, const PipelineConfig& cfg) {
    d.validate();
    cfg.validate(d.n_points(), d.n_features());
    Dataset prepared = cfg.standardize_input ? standardize(d) : d;
    Embedding e = embed(prepared, cfg.tsne);
    return segment_with_embedding(prepared, cfg, std::move(e));
}

}  // namespace segmenter
