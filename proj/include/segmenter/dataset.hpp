#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "segmenter/matrix.hpp"

namespace segmenter {

// Numeric table: rows are points, columns are named features.
struct Dataset {
    Matrix values;
    std::vector<std::string> feature_names;
    std::vector<std::string> row_ids;

    int n_points() const { return values.rows; }
    int n_features() const { return values.cols; }

    Dataset subset(const std::vector<int>& rows) const;
    void validate() const;  // throws on non-finite entries or size mismatches
};

// Per-feature affine transform fitted on one set of rows, applicable to
// held-out rows and invertible for reporting in original units.
struct Scaler {
    std::vector<double> means;
    std::vector<double> stds;  // population std; 0 for constant columns

    static Scaler fit(const Dataset& d);
    Dataset apply(const Dataset& d) const;
    double invert(int feature, double scaled) const;
};

struct FoldPlan {
    int k = 0;
    uint64_t seed = 0;
    std::vector<int> assignments;  // per point, fold index in [0,k)

    std::vector<int> fold_rows(int fold) const;
    std::vector<int> complement_rows(int fold) const;
};

Dataset load_csv(const std::filesystem::path& path, bool has_header);
void write_csv(const Dataset& d, const std::filesystem::path& path);

// Zero mean, unit population variance per column; constant columns map to 0.
Dataset standardize(const Dataset& d);

// Seeded shuffle, then round-robin assignment. Fold sizes differ by at most 1.
FoldPlan split_folds(const Dataset& d, int k, uint64_t seed);

}  // namespace segmenter
