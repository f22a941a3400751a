#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"

namespace kmixup {

/// Square grid of squared Euclidean distances between two k-point sets.
class CostMatrix {
public:
    /// Validates squareness and finiteness.
    explicit CostMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
        if (entries_.rows() != entries_.cols())
            throw ShapeError("cost matrix must be square, got " + std::to_string(entries_.rows()) + "x" +
                             std::to_string(entries_.cols()));
        if (!entries_.allFinite()) throw InputError("cost matrix has non-finite entries");
    }

    std::size_t k() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    double operator()(std::size_t i, std::size_t j) const {
        return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const Eigen::MatrixXd& entries() const noexcept { return entries_; }

private:
    Eigen::MatrixXd entries_;
};

/// A permutation sigma (row i is sent to column sigma[i]) and its summed cost.
struct Assignment {
    std::vector<std::size_t> sigma;
    double total_cost = 0.0;

    std::size_t size() const noexcept { return sigma.size(); }
};

inline const Eigen::VectorXd& features_of(const Eigen::VectorXd& v) { return v; }
inline const Eigen::VectorXd& features_of(const LabeledPoint& p) { return p.features; }

/// Pairwise squared distances between two equal-size point ranges (vectors or
/// LabeledPoints). Labels never enter the cost.
template <class RangeA, class RangeB>
CostMatrix pairwise_sq_distances(const RangeA& a, const RangeB& b) {
    const auto k = static_cast<Eigen::Index>(std::size(a));
    if (static_cast<Eigen::Index>(std::size(b)) != k)
        throw ShapeError("batch sizes differ: " + std::to_string(std::size(a)) + " vs " + std::to_string(std::size(b)));
    if (k == 0) throw ShapeError("batches must be non-empty");
    const Eigen::Index d = features_of(a[0]).size();
    Eigen::MatrixXd c(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const Eigen::VectorXd& ai = features_of(a[static_cast<std::size_t>(i)]);
        if (ai.size() != d) throw ShapeError("inconsistent feature dimension in first batch");
        for (Eigen::Index j = 0; j < k; ++j) {
            const Eigen::VectorXd& bj = features_of(b[static_cast<std::size_t>(j)]);
            if (bj.size() != d)
                throw ShapeError("feature dimension mismatch: " + std::to_string(d) + " vs " + std::to_string(bj.size()));
            c(i, j) = (ai - bj).squaredNorm();
        }
    }
    return CostMatrix(std::move(c));
}

inline CostMatrix cost_matrix(const KBatch& a, const KBatch& b) { return pairwise_sq_distances(a.points, b.points); }

/// Exact minimum-cost perfect matching (Kuhn-Munkres with row/column
/// potentials, shortest augmenting paths, O(k^3)).
///
/// Deterministic tie rule: rows are inserted in index order and every scan
/// uses strict `<`, so among equally short augmenting paths the one reaching
/// the lowest column index is taken. The same matrix always yields the same
/// sigma. total_cost is summed over rows in index order.
inline Assignment solve_assignment(const CostMatrix& cost) {
    const std::size_t n = cost.k();
    const double inf = std::numeric_limits<double>::infinity();
    // 1-based with a sentinel column 0, as in the classical formulation.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);

    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    Assignment out;
    out.sigma.assign(n, 0);
    for (std::size_t j = 1; j <= n; ++j) out.sigma[p[j] - 1] = j - 1;
    for (std::size_t i = 0; i < n; ++i) out.total_cost += cost(i, out.sigma[i]);
    return out;
}

inline Assignment solve_assignment(const Eigen::MatrixXd& cost) { return solve_assignment(CostMatrix(cost)); }

/// Squared 2-Wasserstein distance between two uniform k-atom measures:
/// optimal matching cost divided by k.
template <class RangeA, class RangeB>
double w2_squared_points(const RangeA& a, const RangeB& b) {
    const Assignment best = solve_assignment(pairwise_sq_distances(a, b));
    return best.total_cost / static_cast<double>(best.size());
}

inline double w2_squared(const KBatch& a, const KBatch& b) { return w2_squared_points(a.points, b.points); }

}  // namespace kmixup
