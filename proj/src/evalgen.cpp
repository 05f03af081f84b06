#include "segmenter/evalgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "segmenter/rng.hpp"

namespace segmenter {

namespace {

constexpr uint64_t kInnerFoldStream = 0x7ab5;

struct Prepared {
    Dataset data;
    Scaler scaler;
    bool scaled = false;
};

Prepared prepare(const Dataset& d, bool standardize_input) {
    Prepared p;
    if (standardize_input) {
        p.scaler = Scaler::fit(d);
        p.data = p.scaler.apply(d);
        p.scaled = true;
    } else {
        p.data = d;
    }
    return p;
}

Matrix transform_rows(const Prepared& ref, const Dataset& rows) {
    if (!ref.scaled) return rows.values;
    return ref.scaler.apply(rows).values;
}

// Clusters of `assignment`, with member indices mapped through `rows` into
// the caller's universe.
std::vector<std::vector<int>> clusters_in_universe(const ClusterAssignment& assignment,
                                                   const std::vector<int>& rows) {
    std::vector<std::vector<int>> out = assignment.clusters();
    for (std::vector<int>& cluster : out)
        for (int& idx : cluster) idx = rows[idx];
    return out;
}

std::vector<std::vector<int>> restrict_clusters(const ClusterAssignment& assignment,
                                                const std::vector<int>& keep_rows,
                                                int universe_size) {
    std::vector<char> keep(universe_size, 0);
    for (int r : keep_rows) keep[r] = 1;
    std::vector<std::vector<int>> out(assignment.n_clusters());
    for (size_t i = 0; i < assignment.labels.size(); ++i)
        if (keep[i]) out[assignment.labels[i]].push_back(static_cast<int>(i));
    return out;
}

std::vector<int> translate_predictions(const std::vector<int>& preds,
                                       const MatchingPermutation& perm) {
    std::vector<int> out(preds.size());
    for (size_t i = 0; i < preds.size(); ++i) {
        int p = preds[i];
        out[i] = (p >= 0 && p < static_cast<int>(perm.best_perm.size())) ? perm.best_perm[p]
                                                                         : kUnmatched;
    }
    return out;
}

// One cross-validated score of a fixed epsilon constant against a reference
// clustering of the whole set being folded.
double fold_and_score(const Dataset& whole, const std::vector<Embedding>& fold_embeddings,
                      const std::vector<Prepared>& fold_prepared, const FoldPlan& plan,
                      const ClusterAssignment& reference, const PipelineConfig& cfg,
                      double constant) {
    DbscanConfig dcfg = cfg.dbscan;
    dcfg.epsilon_constant = constant;

    double f1_sum = 0.0;
    for (int f = 0; f < plan.k; ++f) {
        std::vector<int> train_rows = plan.complement_rows(f);
        std::vector<int> test_rows = plan.fold_rows(f);

        ClusterAssignment train_assign = cluster_embedding(fold_embeddings[f], dcfg);
        ForestModel forest = train_forest(fold_prepared[f].data.values, train_assign.labels,
                                          cfg.forest, fold_prepared[f].data.feature_names);

        MatchingPermutation perm =
            match_clusters(clusters_in_universe(train_assign, train_rows),
                           restrict_clusters(reference, train_rows, whole.n_points()));

        Matrix x_test = transform_rows(fold_prepared[f], whole.subset(test_rows));
        std::vector<int> translated = translate_predictions(predict(forest, x_test), perm);

        std::vector<int> truth(test_rows.size());
        for (size_t i = 0; i < test_rows.size(); ++i) truth[i] = reference.labels[test_rows[i]];
        f1_sum += weighted_metrics(truth, translated).f1_weighted;
    }
    return f1_sum / plan.k;
}

}  // namespace

MatchingPermutation match_clusters(const std::vector<std::vector<int>>& train_clusters,
                                   const std::vector<std::vector<int>>& full_clusters) {
    int universe = 0;
    for (const std::vector<int>& c : full_clusters)
        for (int r : c) universe = std::max(universe, r + 1);
    std::vector<int> full_of_row(universe, -1);
    for (size_t k = 0; k < full_clusters.size(); ++k)
        for (int r : full_clusters[k]) full_of_row[r] = static_cast<int>(k);

    MatchingPermutation out;
    out.best_perm.reserve(train_clusters.size());
    std::vector<char> used(full_clusters.size(), 0);
    std::vector<int> overlap(full_clusters.size(), 0);

    for (const std::vector<int>& t : train_clusters) {
        std::fill(overlap.begin(), overlap.end(), 0);
        for (int r : t) {
            if (r < universe && full_of_row[r] >= 0) ++overlap[full_of_row[r]];
        }
        int best = kUnmatched, best_sum = 0;
        for (size_t k = 0; k < full_clusters.size(); ++k) {
            if (used[k]) continue;
            if (overlap[k] > best_sum) {
                best_sum = overlap[k];
                best = static_cast<int>(k);
            }
        }
        out.best_perm.push_back(best);
        if (best != kUnmatched) used[best] = 1;
    }
    return out;
}

Metrics weighted_metrics(std::span<const int> y_true, std::span<const int> y_pred) {
    if (y_true.size() != y_pred.size() || y_true.empty())
        throw std::invalid_argument("label vectors must be non-empty and equally sized");
    size_t n = y_true.size();

    std::vector<int> classes(y_true.begin(), y_true.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

    Metrics m;
    size_t correct = 0;
    for (size_t i = 0; i < n; ++i)
        if (y_true[i] == y_pred[i]) ++correct;
    m.accuracy = static_cast<double>(correct) / static_cast<double>(n);

    double wp = 0, wr = 0, wf = 0;
    for (int c : classes) {
        double tp = 0, support = 0, predicted = 0;
        for (size_t i = 0; i < n; ++i) {
            if (y_true[i] == c) {
                ++support;
                if (y_pred[i] == c) ++tp;
            }
            if (y_pred[i] == c) ++predicted;
        }
        double precision = predicted > 0 ? tp / predicted : 0.0;
        double recall = tp / support;
        double f1 = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        wp += support * precision;
        wr += support * recall;
        wf += support * f1;
    }
    m.precision_weighted = wp / static_cast<double>(n);
    m.recall_weighted = wr / static_cast<double>(n);
    m.f1_weighted = wf / static_cast<double>(n);
    return m;
}

TuningReport tune_epsilon_detailed(const Dataset& train, std::span<const double> grid,
                                   const PipelineConfig& cfg, int min_clusters) {
    if (grid.empty()) throw std::invalid_argument("epsilon grid is empty");
    if (min_clusters < 1) throw std::invalid_argument("min_clusters must be at least 1");
    std::vector<double> constants(grid.begin(), grid.end());
    std::sort(constants.begin(), constants.end());
    constants.erase(std::unique(constants.begin(), constants.end()), constants.end());
    for (double c : constants)
        if (!(c > 0)) throw std::invalid_argument("epsilon constants must be positive");

    // The embedding does not depend on the constant, so embed the whole
    // training set and each inner training part once and sweep the grid over
    // those fixed layouts.
    Prepared whole_prep = prepare(train, cfg.standardize_input);
    Embedding whole_emb = embed(whole_prep.data, cfg.tsne);

    constexpr int kInnerFolds = 5;
    FoldPlan plan = split_folds(train, kInnerFolds, derive_seed(cfg.tsne.seed, kInnerFoldStream));
    std::vector<Prepared> fold_prepared(plan.k);
    std::vector<Embedding> fold_embeddings(plan.k);
    for (int f = 0; f < plan.k; ++f) {
        fold_prepared[f] = prepare(train.subset(plan.complement_rows(f)), cfg.standardize_input);
        fold_embeddings[f] = embed(fold_prepared[f].data, cfg.tsne);
    }

    TuningReport report;
    bool have_best = false;
    double best_f1 = 0.0;
    for (double c : constants) {
        DbscanConfig dcfg = cfg.dbscan;
        dcfg.epsilon_constant = c;
        ClusterAssignment whole_assign = cluster_embedding(whole_emb, dcfg);

        EpsilonCandidate cand;
        cand.constant = c;
        cand.nonsingleton_clusters = whole_assign.nonsingleton_count();
        cand.accepted = cand.nonsingleton_clusters >= min_clusters;
        if (cand.accepted) {
            cand.mean_f1 = fold_and_score(train, fold_embeddings, fold_prepared, plan,
                                          whole_assign, cfg, c);
            if (!have_best || cand.mean_f1 > best_f1) {
                have_best = true;
                best_f1 = cand.mean_f1;
                report.chosen = c;
            }
        }
        report.candidates.push_back(cand);
    }
    if (!have_best)
        throw std::runtime_error(
            "no epsilon constant produced at least " + std::to_string(min_clusters) +
            " non-singleton clusters on the training set; widen the grid");
    return report;
}

double tune_epsilon(const Dataset& train, std::span<const double> grid, const PipelineConfig& cfg,
                    int min_clusters) {
    return tune_epsilon_detailed(train, grid, cfg, min_clusters).chosen;
}

GeneralizationReport generalization_run(const Dataset& d, const PipelineConfig& cfg, int k,
                                        std::span<const double> grid, int min_clusters,
                                        uint64_t seed) {
    d.validate();
    cfg.validate(d.n_points(), d.n_features());
    if (grid.empty()) throw std::invalid_argument("epsilon grid is empty");

    SegmentationResult full = segment(d, cfg);
    FoldPlan plan = split_folds(d, k, seed);
    bool fixed_constant = grid.size() == 1;

    GeneralizationReport report;
    report.full_cluster_count = full.assignment.n_clusters();
    report.full_nonsingleton_count = full.assignment.nonsingleton_count();
    report.ground_truth_epsilon = full.assignment.epsilon_used;

    double acc = 0, prec = 0, rec = 0, f1 = 0;
    for (int f = 0; f < plan.k; ++f) {
        std::vector<int> train_rows = plan.complement_rows(f);
        std::vector<int> test_rows = plan.fold_rows(f);
        Dataset train_ds = d.subset(train_rows);

        FoldOutcome fold;
        fold.fold_index = f;
        fold.tuned = !fixed_constant;
        fold.epsilon_constant =
            fixed_constant ? grid[0] : tune_epsilon(train_ds, grid, cfg, min_clusters);

        PipelineConfig fold_cfg = cfg;
        fold_cfg.dbscan.epsilon_constant = fold.epsilon_constant;

        Prepared prep = prepare(train_ds, cfg.standardize_input);
        Embedding emb = embed(prep.data, fold_cfg.tsne);
        ClusterAssignment assign = cluster_embedding(emb, fold_cfg.dbscan);
        ForestModel forest =
            train_forest(prep.data.values, assign.labels, fold_cfg.forest, prep.data.feature_names);

        fold.train_cluster_count = assign.n_clusters();
        fold.train_nonsingleton_count = assign.nonsingleton_count();
        fold.matching = match_clusters(clusters_in_universe(assign, train_rows),
                                       restrict_clusters(full.assignment, train_rows, d.n_points()));

        Matrix x_test = transform_rows(prep, d.subset(test_rows));
        std::vector<int> translated = translate_predictions(predict(forest, x_test), fold.matching);
        std::vector<int> truth(test_rows.size());
        for (size_t i = 0; i < test_rows.size(); ++i)
            truth[i] = full.assignment.labels[test_rows[i]];
        fold.metrics = weighted_metrics(truth, translated);

        acc += fold.metrics.accuracy;
        prec += fold.metrics.precision_weighted;
        rec += fold.metrics.recall_weighted;
        f1 += fold.metrics.f1_weighted;
        report.epsilon_constants_used.push_back(fold.epsilon_constant);
        report.per_fold.push_back(std::move(fold));
    }

    report.mean_weighted.accuracy = acc / plan.k;
    report.mean_weighted.precision_weighted = prec / plan.k;
    report.mean_weighted.recall_weighted = rec / plan.k;
    report.mean_weighted.f1_weighted = f1 / plan.k;
    return report;
}

}  // namespace segmenter
