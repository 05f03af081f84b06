#include "segmenter/forest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "segmenter/rng.hpp"
#include "segmenter/textio.hpp"

namespace segmenter {

MaxFeatures MaxFeatures::parse(const std::string& s) {
    if (s == "sqrt") return sqrt();
    if (s == "all") return all();
    try {
        size_t pos = 0;
        int n = std::stoi(s, &pos);
        if (pos == s.size() && n > 0) return exactly(n);
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("max_features must be 'sqrt', 'all', or a positive integer");
}

std::string MaxFeatures::str() const {
    switch (kind) {
        case Kind::Sqrt: return "sqrt";
        case Kind::All: return "all";
        default: return std::to_string(count);
    }
}

int MaxFeatures::resolve(int n_features) const {
    switch (kind) {
        case Kind::Sqrt:
            return std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n_features))));
        case Kind::All:
            return n_features;
        default:
            return count;
    }
}

void ForestConfig::validate(int n_features) const {
    if (n_trees < 1) throw std::invalid_argument("n_trees must be at least 1");
    if (min_samples_leaf < 1) throw std::invalid_argument("min_samples_leaf must be at least 1");
    if (max_features.kind == MaxFeatures::Kind::Count &&
        (max_features.count < 1 || max_features.count > n_features))
        throw std::invalid_argument("max_features count must be in [1, n_features]");
}

double gini_impurity(std::span<const int> class_counts) {
    long long total = 0;
    for (int c : class_counts) {
        if (c < 0) throw std::invalid_argument("negative class count");
        total += c;
    }
    if (total == 0) throw std::invalid_argument("gini of an empty count vector");
    double sum_sq = 0;
    for (int c : class_counts) sum_sq += static_cast<double>(c) * c;
    double t = static_cast<double>(total);
    return 1.0 - sum_sq / (t * t);
}

int DecisionTree::predict_index(std::span<const double> row) const {
    int node = 0;
    while (nodes[node].feature >= 0)
        node = row[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left
                                                                 : nodes[node].right;
    const std::vector<double>& counts = nodes[node].class_counts;
    int best = 0;
    for (size_t k = 1; k < counts.size(); ++k)
        if (counts[k] > counts[best]) best = static_cast<int>(k);
    return best;
}

namespace {

double gini_from_sums(double sum_sq, int n) {
    double t = static_cast<double>(n);
    return 1.0 - sum_sq / (t * t);
}

struct TreeBuilder {
    const Matrix& x;
    const std::vector<int>& y;  // class indices
    int n_classes;
    const ForestConfig& cfg;
    int mtry;
    int root_size;
    Rng& rng;
    DecisionTree& tree;
    std::vector<double>& importance;  // accumulated for this tree

    // rows may repeat (bootstrap multiset)
    int build(std::vector<int> rows, int depth) {
        std::vector<int> counts(n_classes, 0);
        for (int r : rows) ++counts[y[r]];
        int m = static_cast<int>(rows.size());

        bool pure = std::count(counts.begin(), counts.end(), 0) >= n_classes - 1;
        bool depth_capped = cfg.max_depth >= 0 && depth >= cfg.max_depth;
        if (pure || depth_capped || m < 2 * cfg.min_samples_leaf) return make_leaf(counts);

        std::vector<int> features = sample_features();

        double parent_imp = gini_impurity(counts);
        int best_feature = -1, best_pos = -1;
        double best_gain = 0.0, best_threshold = 0.0;
        std::vector<int> order(rows);

        for (int f : features) {
            std::sort(order.begin(), order.end(),
                      [&](int a, int b) { return x(a, f) < x(b, f); });
            std::vector<int> left(n_classes, 0);
            double left_sq = 0.0;
            std::vector<int> right(counts);
            double right_sq = 0.0;
            for (int c : counts) right_sq += static_cast<double>(c) * c;

            for (int p = 0; p < m - 1; ++p) {
                int cls = y[order[p]];
                left_sq += 2.0 * left[cls] + 1.0;
                ++left[cls];
                right_sq -= 2.0 * right[cls] - 1.0;
                --right[cls];

                double lo = x(order[p], f), hi = x(order[p + 1], f);
                if (!(lo < hi)) continue;
                int nl = p + 1, nr = m - nl;
                if (nl < cfg.min_samples_leaf || nr < cfg.min_samples_leaf) continue;

                double gain = parent_imp - (nl * gini_from_sums(left_sq, nl) +
                                            nr * gini_from_sums(right_sq, nr)) /
                                               m;
                if (gain > best_gain) {
                    double mid = 0.5 * (lo + hi);
                    if (!(mid < hi)) mid = lo;  // keep the split consistent with the sweep
                    best_gain = gain;
                    best_feature = f;
                    best_pos = p;
                    best_threshold = mid;
                }
            }
        }

        if (best_feature < 0) return make_leaf(counts);

        std::vector<int> left_rows, right_rows;
        left_rows.reserve(best_pos + 1);
        right_rows.reserve(m - best_pos - 1);
        for (int r : rows)
            (x(r, best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);

        // Impurity decrease weighted by the fraction of the tree's samples
        // seen at this node.
        std::vector<int> lc(n_classes, 0), rc(n_classes, 0);
        for (int r : left_rows) ++lc[y[r]];
        for (int r : right_rows) ++rc[y[r]];
        double nl = static_cast<double>(left_rows.size());
        double nr = static_cast<double>(right_rows.size());
        importance[best_feature] += (m * parent_imp - nl * gini_impurity(lc) -
                                     nr * gini_impurity(rc)) /
                                    root_size;

        int idx = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[idx].feature = best_feature;
        tree.nodes[idx].threshold = best_threshold;
        rows.clear();
        rows.shrink_to_fit();
        order.clear();
        order.shrink_to_fit();
        int li = build(std::move(left_rows), depth + 1);
        int ri = build(std::move(right_rows), depth + 1);
        tree.nodes[idx].left = li;
        tree.nodes[idx].right = ri;
        return idx;
    }

    int make_leaf(const std::vector<int>& counts) {
        int idx = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[idx].class_counts.assign(counts.begin(), counts.end());
        return idx;
    }

    std::vector<int> sample_features() {
        int d = x.cols;
        if (mtry >= d) {
            std::vector<int> all(d);
            std::iota(all.begin(), all.end(), 0);
            return all;
        }
        // Partial Fisher-Yates, then ascending order so ties favor the
        // lowest feature index.
        std::vector<int> pool(d);
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < mtry; ++i) {
            int j = i + static_cast<int>(rng.below(static_cast<uint64_t>(d - i)));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(mtry);
        std::sort(pool.begin(), pool.end());
        return pool;
    }
};

}  // namespace

ForestModel train_forest(const Matrix& x, std::span<const int> labels, const ForestConfig& cfg,
                         std::vector<std::string> feature_names) {
    if (x.rows < 1) throw std::invalid_argument("cannot train on an empty matrix");
    if (static_cast<int>(labels.size()) != x.rows)
        throw std::invalid_argument("label count does not match row count");
    cfg.validate(x.cols);
    if (!feature_names.empty() && static_cast<int>(feature_names.size()) != x.cols)
        throw std::invalid_argument("feature name count does not match columns");
    if (feature_names.empty()) {
        for (int c = 0; c < x.cols; ++c) feature_names.push_back("f" + std::to_string(c));
    }

    ForestModel model;
    model.config = cfg;
    model.feature_names = std::move(feature_names);
    model.classes.assign(labels.begin(), labels.end());
    std::sort(model.classes.begin(), model.classes.end());
    model.classes.erase(std::unique(model.classes.begin(), model.classes.end()),
                        model.classes.end());

    std::vector<int> y(x.rows);
    for (int r = 0; r < x.rows; ++r) {
        auto it = std::lower_bound(model.classes.begin(), model.classes.end(), labels[r]);
        y[r] = static_cast<int>(it - model.classes.begin());
    }

    int n = x.rows;
    int n_classes = static_cast<int>(model.classes.size());
    int mtry = cfg.max_features.resolve(x.cols);
    std::vector<double> importance_sum(x.cols, 0.0);

    model.trees.resize(cfg.n_trees);
    for (int t = 0; t < cfg.n_trees; ++t) {
        // Per-tree generator so results do not depend on build order.
        Rng rng(cfg.seed + static_cast<uint64_t>(t));
        std::vector<int> rows(n);
        if (cfg.bootstrap) {
            for (int i = 0; i < n; ++i)
                rows[i] = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
        } else {
            std::iota(rows.begin(), rows.end(), 0);
        }
        std::vector<double> tree_importance(x.cols, 0.0);
        TreeBuilder builder{x, y, n_classes, cfg, mtry, n, rng, model.trees[t], tree_importance};
        builder.build(std::move(rows), 0);
        for (int c = 0; c < x.cols; ++c) importance_sum[c] += tree_importance[c];
    }

    model.importances.assign(x.cols, 0.0);
    double total = 0.0;
    for (int c = 0; c < x.cols; ++c) {
        model.importances[c] = importance_sum[c] / cfg.n_trees;
        total += model.importances[c];
    }
    if (total > 0.0)
        for (double& v : model.importances) v /= total;
    return model;
}

std::vector<int> predict(const ForestModel& m, const Matrix& x) {
    if (x.cols != static_cast<int>(m.feature_names.size()))
        throw std::invalid_argument("prediction matrix has the wrong column count");
    int n_classes = static_cast<int>(m.classes.size());
    std::vector<int> out(x.rows);
    std::vector<int> votes(n_classes);
    for (int r = 0; r < x.rows; ++r) {
        std::fill(votes.begin(), votes.end(), 0);
        for (const DecisionTree& t : m.trees) ++votes[t.predict_index(x.row(r))];
        int best = 0;
        for (int k = 1; k < n_classes; ++k)
            if (votes[k] > votes[best]) best = k;
        out[r] = m.classes[best];
    }
    return out;
}

std::vector<std::pair<std::string, double>> feature_importances(const ForestModel& m) {
    std::vector<std::pair<std::string, double>> out;
    out.reserve(m.importances.size());
    for (size_t c = 0; c < m.importances.size(); ++c)
        out.emplace_back(m.feature_names[c], m.importances[c]);
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

namespace {

using nlohmann::json;

json config_to_json(const ForestConfig& c) {
    return json{{"n_trees", c.n_trees},
                {"max_features", c.max_features.str()},
                {"min_samples_leaf", c.min_samples_leaf},
                {"max_depth", c.max_depth},
                {"bootstrap", c.bootstrap},
                {"seed", c.seed}};
}

ForestConfig config_from_json(const json& j) {
    ForestConfig c;
    c.n_trees = j.at("n_trees").get<int>();
    c.max_features = MaxFeatures::parse(j.at("max_features").get<std::string>());
    c.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    c.max_depth = j.at("max_depth").get<int>();
    c.bootstrap = j.at("bootstrap").get<bool>();
    c.seed = j.at("seed").get<uint64_t>();
    return c;
}

}  // namespace

void save_model(const ForestModel& m, const std::filesystem::path& path) {
    json j;
    j["format"] = "segmenter.forest";
    j["version"] = 1;
    j["config"] = config_to_json(m.config);
    j["classes"] = m.classes;
    j["feature_names"] = m.feature_names;
    j["importances"] = m.importances;
    j["oob_available"] = m.oob_available;
    json trees = json::array();
    for (const DecisionTree& t : m.trees) {
        json nodes = json::array();
        for (const TreeNode& nd : t.nodes)
            nodes.push_back(json::array(
                {nd.feature, nd.threshold, nd.left, nd.right, json(nd.class_counts)}));
        trees.push_back(json{{"nodes", std::move(nodes)}});
    }
    j["trees"] = std::move(trees);
    write_file_atomic(path, j.dump());
}

ForestModel load_model(const std::filesystem::path& path) {
    json j = json::parse(read_file(path));
    if (j.value("format", "") != "segmenter.forest")
        throw std::runtime_error(path.string() + ": not a forest model file");
    if (j.value("version", 0) != 1)
        throw std::runtime_error(path.string() + ": unsupported model version");

    ForestModel m;
    m.config = config_from_json(j.at("config"));
    m.classes = j.at("classes").get<std::vector<int>>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.importances = j.at("importances").get<std::vector<double>>();
    m.oob_available = j.at("oob_available").get<bool>();
    for (const json& jt : j.at("trees")) {
        DecisionTree t;
        for (const json& jn : jt.at("nodes")) {
            TreeNode nd;
            nd.feature = jn.at(0).get<int>();
            nd.threshold = jn.at(1).get<double>();
            nd.left = jn.at(2).get<int>();
            nd.right = jn.at(3).get<int>();
            nd.class_counts = jn.at(4).get<std::vector<double>>();
            t.nodes.push_back(std::move(nd));
        }
        m.trees.push_back(std::move(t));
    }
    return m;
}

}  // namespace segmenter
