#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "segmenter/matrix.hpp"

namespace segmenter {

struct MaxFeatures {
    enum class Kind { Sqrt, All, Count };
    Kind kind = Kind::Sqrt;
    int count = 0;

    static MaxFeatures sqrt() { return {Kind::Sqrt, 0}; }
    static MaxFeatures all() { return {Kind::All, 0}; }
    static MaxFeatures exactly(int n) { return {Kind::Count, n}; }
    static MaxFeatures parse(const std::string& s);

    std::string str() const;
    int resolve(int n_features) const;
};

struct ForestConfig {
    int n_trees = 100;
    MaxFeatures max_features = MaxFeatures::sqrt();
    int min_samples_leaf = 1;
    int max_depth = -1;  // -1 = unlimited
    bool bootstrap = true;
    uint64_t seed = 1;

    void validate(int n_features) const;
};

struct TreeNode {
    int feature = -1;        // -1 marks a leaf
    double threshold = 0.0;  // x[feature] <= threshold goes left
    int left = -1;
    int right = -1;
    std::vector<double> class_counts;  // leaves only, indexed like ForestModel::classes
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // root at 0
    int predict_index(std::span<const double> row) const;
};

struct ForestModel {
    ForestConfig config;
    std::vector<int> classes;  // sorted ascending
    std::vector<std::string> feature_names;
    std::vector<DecisionTree> trees;
    std::vector<double> importances;  // per feature; sums to 1 unless all zero
    bool oob_available = false;
};

// Gini impurity 1 - sum((c/n)^2) of a class count vector. Throws if empty.
double gini_impurity(std::span<const int> class_counts);

ForestModel train_forest(const Matrix& x, std::span<const int> labels, const ForestConfig& cfg,
                         std::vector<std::string> feature_names = {});

std::vector<int> predict(const ForestModel& m, const Matrix& x);

// (name, importance) sorted by importance descending.
std::vector<std::pair<std::string, double>> feature_importances(const ForestModel& m);

void save_model(const ForestModel& m, const std::filesystem::path& path);
ForestModel load_model(const std::filesystem::path& path);

}  // namespace segmenter
