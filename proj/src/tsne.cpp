#include "segmenter/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "segmenter/rng.hpp"

namespace segmenter {

namespace {

constexpr double kProbFloor = 1e-12;

// Shannon entropy (bits) of the normalized kernel over the row, self
// excluded. Distances are shifted by the row minimum before exponentiation
// so large precisions stay in range; the normalized distribution, and hence
// the entropy, is unchanged by the shift.
double row_entropy_bits(std::span<const double> sq_dist_row, int self_index, double beta) {
    double dmin = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < sq_dist_row.size(); ++j)
        if (static_cast<int>(j) != self_index) dmin = std::min(dmin, sq_dist_row[j]);

    double sum = 0.0, moment = 0.0;
    for (size_t j = 0; j < sq_dist_row.size(); ++j) {
        if (static_cast<int>(j) == self_index) continue;
        double shifted = sq_dist_row[j] - dmin;
        double w = std::exp(-beta * shifted);
        sum += w;
        moment += w * shifted;
    }
    double nats = std::log(sum) + beta * moment / sum;
    return nats / std::numbers::ln2;
}

}  // namespace

void TsneConfig::validate(int n_points) const {
    if (n_points < 4) throw std::invalid_argument("need at least 4 points to embed");
    if (!(perplexity > 0) || perplexity >= n_points)
        throw std::invalid_argument("perplexity must be in (0, n_points)");
    if (n_iterations < 1) throw std::invalid_argument("n_iterations must be positive");
    if (!(learning_rate > 0)) throw std::invalid_argument("learning_rate must be positive");
    if (!(early_exaggeration_factor > 0))
        throw std::invalid_argument("early exaggeration factor must be positive");
    if (late_exaggeration_factor < 1.0)
        throw std::invalid_argument("late exaggeration factor must be >= 1");
    if (early_exaggeration_iters < 0 || early_exaggeration_iters >= late_exaggeration_start ||
        late_exaggeration_start > n_iterations)
        throw std::invalid_argument(
            "need early_exaggeration_iters < late_exaggeration_start <= n_iterations");
    if (momentum_initial < 0 || momentum_initial >= 1 || momentum_final < 0 || momentum_final >= 1)
        throw std::invalid_argument("momenta must lie in [0, 1)");
    if (momentum_switch_iter < 0) throw std::invalid_argument("momentum switch must be >= 0");
}

Matrix pairwise_sq_distances(const Matrix& points) {
    int n = points.rows, d = points.cols;
    Matrix out(n, n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* pi = points.data.data() + static_cast<size_t>(i) * d;
        for (int j = i + 1; j < n; ++j) {
            const double* pj = points.data.data() + static_cast<size_t>(j) * d;
            double s = 0;
            for (int c = 0; c < d; ++c) {
                double dv = pi[c] - pj[c];
                s += dv * dv;
            }
            out(i, j) = s;
            out(j, i) = s;
        }
    }
    return out;
}

BandwidthResult calibrate_bandwidth(std::span<const double> sq_dist_row, int self_index,
                                    double target_perplexity) {
    if (sq_dist_row.size() < 3)
        throw std::invalid_argument("bandwidth search needs at least 2 neighbors");
    if (!(target_perplexity > 0)) throw std::invalid_argument("perplexity must be positive");

    constexpr double kTol = 1e-4;
    auto perp_at = [&](double beta) {
        return std::exp2(row_entropy_bits(sq_dist_row, self_index, beta));
    };

    double beta = 1.0;
    double perp = perp_at(beta);
    double best_beta = beta;
    double best_err = std::abs(perp - target_perplexity);
    if (best_err <= kTol) return {beta, true};

    // Perplexity decreases as beta grows. Bracket the target by doubling or
    // halving, then bisect.
    double lo, hi;
    if (perp > target_perplexity) {
        lo = beta;
        hi = beta;
        int step = 0;
        for (; step < 200; ++step) {
            hi *= 2.0;
            double p = perp_at(hi);
            double err = std::abs(p - target_perplexity);
            if (err < best_err) {
                best_err = err;
                best_beta = hi;
            }
            if (p <= target_perplexity) break;
            lo = hi;
        }
        if (step == 200) return {best_beta, best_err <= kTol};
    } else {
        hi = beta;
        lo = beta;
        int step = 0;
        for (; step < 200; ++step) {
            lo *= 0.5;
            double p = perp_at(lo);
            double err = std::abs(p - target_perplexity);
            if (err < best_err) {
                best_err = err;
                best_beta = lo;
            }
            if (p >= target_perplexity) break;
            hi = lo;
        }
        if (step == 200) return {best_beta, best_err <= kTol};
    }

    // Bisect until the interval is exhausted in doubles rather than stopping
    // at the tolerance: downstream affinities want the bandwidth pinned as
    // tightly as the arithmetic allows.
    for (int it = 0; it < 1000; ++it) {
        double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        double p = perp_at(mid);
        double err = std::abs(p - target_perplexity);
        if (err < best_err) {
            best_err = err;
            best_beta = mid;
        }
        if (p > target_perplexity)
            lo = mid;
        else
            hi = mid;
    }
    return {best_beta, best_err <= kTol};
}

std::vector<double> conditional_probs(std::span<const double> sq_dist_row, int self_index,
                                      double beta) {
    size_t n = sq_dist_row.size();
    std::vector<double> p(n, 0.0);
    double dmin = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < n; ++j)
        if (static_cast<int>(j) != self_index) dmin = std::min(dmin, sq_dist_row[j]);
    double sum = 0.0;
    for (size_t j = 0; j < n; ++j) {
        if (static_cast<int>(j) == self_index) continue;
        p[j] = std::exp(-beta * (sq_dist_row[j] - dmin));
        sum += p[j];
    }
    for (size_t j = 0; j < n; ++j) p[j] /= sum;
    return p;
}

Matrix joint_probabilities(const Dataset& d, double perplexity, int* non_converged) {
    int n = d.n_points();
    if (n < 4) throw std::invalid_argument("need at least 4 points");
    if (!(perplexity > 0) || perplexity >= n)
        throw std::invalid_argument("perplexity must be in (0, n_points)");

    Matrix sq = pairwise_sq_distances(d.values);
    Matrix cond(n, n, 0.0);
    int warnings = 0;
    for (int i = 0; i < n; ++i) {
        BandwidthResult b = calibrate_bandwidth(sq.row(i), i, perplexity);
        if (!b.converged) ++warnings;
        std::vector<double> p = conditional_probs(sq.row(i), i, b.beta);
        for (int j = 0; j < n; ++j) cond(i, j) = p[j];
    }
    if (warnings > 0) {
        if (non_converged) *non_converged = warnings;
        std::cerr << "warning: bandwidth search did not converge for " << warnings << " of " << n
                  << " points\n";
    } else if (non_converged) {
        *non_converged = 0;
    }

    Matrix P(n, n, 0.0);
    double denom = 2.0 * n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) P(i, j) = (cond(i, j) + cond(j, i)) / denom;
    return P;
}

double kl_divergence(const Matrix& P, const Matrix& coords) {
    int n = coords.rows;
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double dx = coords(i, 0) - coords(j, 0);
            double dy = coords(i, 1) - coords(j, 1);
            z += 2.0 / (1.0 + dx * dx + dy * dy);
        }
    }
    double kl = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double p = P(i, j);
            if (p <= 0.0) continue;
            double dx = coords(i, 0) - coords(j, 0);
            double dy = coords(i, 1) - coords(j, 1);
            double q = 1.0 / ((1.0 + dx * dx + dy * dy) * z);
            kl += p * std::log(p / q);
        }
    }
    return kl;
}

namespace {

// Student-t weights, their sum, and the KL gradient for the current layout.
// P may carry an exaggeration factor; w is scratch space reused across calls.
void gradient_into(const Matrix& P, double p_factor, const Matrix& y, Matrix& w, Matrix& grad) {
    int n = y.rows;
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        w(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            double dx = y(i, 0) - y(j, 0);
            double dy = y(i, 1) - y(j, 1);
            double wij = 1.0 / (1.0 + dx * dx + dy * dy);
            w(i, j) = wij;
            w(j, i) = wij;
            z += 2.0 * wij;
        }
    }
    double inv_z = 1.0 / z;
    for (int i = 0; i < n; ++i) {
        double yx = y(i, 0), yy = y(i, 1);
        double gx = 0.0, gy = 0.0;
        const double* wrow = w.data.data() + static_cast<size_t>(i) * n;
        const double* prow = P.data.data() + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            double wij = wrow[j];
            double mult = (p_factor * prow[j] - wij * inv_z) * wij;
            gx += mult * (yx - y(j, 0));
            gy += mult * (yy - y(j, 1));
        }
        grad(i, 0) = 4.0 * gx;
        grad(i, 1) = 4.0 * gy;
    }
}

}  // namespace

Matrix kl_gradient(const Matrix& P, const Matrix& coords) {
    Matrix w(coords.rows, coords.rows), grad(coords.rows, 2);
    gradient_into(P, 1.0, coords, w, grad);
    return grad;
}

Embedding embed(const Dataset& d, const TsneConfig& cfg) {
    int n = d.n_points();
    cfg.validate(n);

    Matrix P = joint_probabilities(d, cfg.perplexity);
    Matrix P_run = P;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && P_run(i, j) < kProbFloor) P_run(i, j) = kProbFloor;

    Matrix y(n, 2);
    Rng rng(cfg.seed);
    for (int i = 0; i < n; ++i) {
        y(i, 0) = rng.normal() * 1e-4;
        y(i, 1) = rng.normal() * 1e-4;
    }

    Matrix velocity(n, 2, 0.0), grad(n, 2), w(n, n);
    for (int t = 0; t < cfg.n_iterations; ++t) {
        double factor = 1.0;
        if (t < cfg.early_exaggeration_iters)
            factor = cfg.early_exaggeration_factor;
        else if (t >= cfg.late_exaggeration_start)
            factor = cfg.late_exaggeration_factor;

        gradient_into(P_run, factor, y, w, grad);

        double momentum = t < cfg.momentum_switch_iter ? cfg.momentum_initial : cfg.momentum_final;
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < 2; ++c) {
                velocity(i, c) = momentum * velocity(i, c) - cfg.learning_rate * grad(i, c);
                y(i, c) += velocity(i, c);
            }
        }
        for (double v : y.data)
            if (!std::isfinite(v))
                throw std::runtime_error("embedding diverged at iteration " + std::to_string(t) +
                                         "; lower the learning rate or exaggeration");
    }

    Embedding e;
    e.coords = std::move(y);
    e.final_kl = kl_divergence(P, e.coords);
    e.config_used = cfg;
    return e;
}

}  // namespace segmenter
