#include "segmenter/dbscan.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <string>

namespace segmenter {

namespace {

constexpr int kUndefined = -2;

inline double sq_dist2(const Matrix& coords, int i, int j) {
    double dx = coords(i, 0) - coords(j, 0);
    double dy = coords(i, 1) - coords(j, 1);
    return dx * dx + dy * dy;
}

}  // namespace

void DbscanConfig::validate() const {
    if (!(epsilon_constant > 0)) throw std::invalid_argument("epsilon constant must be positive");
    if (min_pts < 1) throw std::invalid_argument("min_pts must be at least 1");
}

int ClusterAssignment::nonsingleton_count() const {
    int k = 0;
    for (int s : cluster_sizes)
        if (s >= 2) ++k;
    return k;
}

std::vector<std::vector<int>> ClusterAssignment::clusters() const {
    std::vector<std::vector<int>> out(cluster_sizes.size());
    for (size_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(static_cast<int>(i));
    return out;
}

double epsilon_from_constant(const Embedding& e, double c) {
    if (!(c > 0)) throw std::invalid_argument("epsilon constant must be positive");
    int n = e.coords.rows;
    if (n < 2) throw std::invalid_argument("need at least 2 points for a distance scale");
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) sum += std::sqrt(sq_dist2(e.coords, i, j));
    double mean = sum / (static_cast<double>(n) * (n - 1) / 2.0);
    return c * mean;
}

std::vector<int> dbscan_raw(const Matrix& coords, double eps, int min_pts) {
    if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
    if (min_pts < 1) throw std::invalid_argument("min_pts must be at least 1");
    int n = coords.rows;
    double eps2 = eps * eps;

    // Closed-ball occupancy, the point itself included.
    std::vector<char> core(n, 0);
    for (int i = 0; i < n; ++i) {
        int inside = 1;
        for (int j = 0; j < n; ++j)
            if (j != i && sq_dist2(coords, i, j) <= eps2) ++inside;
        core[i] = inside >= min_pts;
    }

    std::vector<int> labels(n, kUndefined);
    int next_cluster = 0;
    std::deque<int> queue;
    for (int i = 0; i < n; ++i) {
        if (labels[i] != kUndefined) continue;
        if (!core[i]) {
            labels[i] = kNoise;  // may be claimed later as a border point
            continue;
        }
        int cid = next_cluster++;
        labels[i] = cid;
        queue.clear();
        queue.push_back(i);
        while (!queue.empty()) {
            int p = queue.front();
            queue.pop_front();
            for (int q = 0; q < n; ++q) {
                if (q == p || sq_dist2(coords, p, q) > eps2) continue;
                if (labels[q] == kUndefined || labels[q] == kNoise) {
                    labels[q] = cid;
                    if (core[q]) queue.push_back(q);
                }
            }
        }
    }
    return labels;
}

ClusterAssignment finalize_assignment(const std::vector<int>& raw_labels,
                                      bool noise_as_single_cluster) {
    int n = static_cast<int>(raw_labels.size());
    if (n == 0) throw std::invalid_argument("no labels to finalize");

    int max_raw = -1;
    for (int l : raw_labels) {
        if (l < kNoise) throw std::invalid_argument("invalid raw label");
        max_raw = std::max(max_raw, l);
    }

    // Units to order: density clusters, then noise as singletons or one group.
    std::vector<std::vector<int>> units(max_raw + 1);
    std::vector<int> noise_rows;
    for (int i = 0; i < n; ++i) {
        if (raw_labels[i] == kNoise)
            noise_rows.push_back(i);
        else
            units[raw_labels[i]].push_back(i);
    }
    if (noise_as_single_cluster) {
        if (!noise_rows.empty()) units.push_back(noise_rows);
    } else {
        for (int r : noise_rows) units.push_back({r});
    }

    std::erase_if(units, [](const std::vector<int>& u) { return u.empty(); });
    std::sort(units.begin(), units.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a.front() < b.front();  // members are ascending by construction
    });

    ClusterAssignment out;
    out.labels.assign(n, -1);
    out.cluster_sizes.reserve(units.size());
    for (size_t k = 0; k < units.size(); ++k) {
        out.cluster_sizes.push_back(static_cast<int>(units[k].size()));
        for (int r : units[k]) out.labels[r] = static_cast<int>(k);
    }
    return out;
}

ClusterAssignment cluster_embedding(const Embedding& e, const DbscanConfig& cfg) {
    cfg.validate();
    double eps = epsilon_from_constant(e, cfg.epsilon_constant);
    std::vector<int> raw = dbscan_raw(e.coords, eps, cfg.min_pts);
    ClusterAssignment a = finalize_assignment(raw, cfg.noise_as_single_cluster);
    a.epsilon_used = eps;
    return a;
}

}  // namespace segmenter
