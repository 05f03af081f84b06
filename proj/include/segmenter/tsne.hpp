#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "segmenter/dataset.hpp"

namespace segmenter {

struct TsneConfig {
    double perplexity = 30.0;
    int n_iterations = 1000;
    double early_exaggeration_factor = 12.0;
    int early_exaggeration_iters = 250;
    double late_exaggeration_factor = 1.0;  // 1 = off
    int late_exaggeration_start = 800;
    double learning_rate = 200.0;
    double momentum_initial = 0.5;
    double momentum_final = 0.8;
    int momentum_switch_iter = 250;
    uint64_t seed = 1;

    void validate(int n_points) const;
};

struct Embedding {
    Matrix coords;  // n x 2
    double final_kl = 0.0;
    TsneConfig config_used;
};

struct BandwidthResult {
    double beta = 1.0;  // Gaussian precision 1/(2*sigma^2)
    bool converged = false;
};

Matrix pairwise_sq_distances(const Matrix& points);

// Binary search for the kernel precision whose conditional distribution over
// the row (self excluded) has perplexity 2^H within 1e-4 of the target.
BandwidthResult calibrate_bandwidth(std::span<const double> sq_dist_row, int self_index,
                                    double target_perplexity);

// Normalized exp(-beta * d^2) over the row; entry at self_index is 0.
std::vector<double> conditional_probs(std::span<const double> sq_dist_row, int self_index,
                                      double beta);

// Symmetrized affinities (p(j|i) + p(i|j)) / (2n). Sums to 1, zero diagonal.
// Non-converged calibrations are counted into *non_converged when given.
Matrix joint_probabilities(const Dataset& d, double perplexity, int* non_converged = nullptr);

double kl_divergence(const Matrix& P, const Matrix& coords);
Matrix kl_gradient(const Matrix& P, const Matrix& coords);

Embedding embed(const Dataset& d, const TsneConfig& cfg);

}  // namespace segmenter
