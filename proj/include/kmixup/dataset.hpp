#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace kmixup {

/// A feature vector x_i with its soft label y_i (a probability vector).
struct LabeledPoint {
    Eigen::VectorXd features;
    Eigen::VectorXd label;
};

inline Eigen::VectorXd one_hot(std::size_t classes, std::size_t cls) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(classes));
    v(static_cast<Eigen::Index>(cls)) = 1.0;
    return v;
}

/// Index of the largest entry; the lowest index wins ties.
inline std::size_t argmax(const Eigen::VectorXd& v) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (v(i) > v(best)) best = i;
    return static_cast<std::size_t>(best);
}

inline bool is_probability_vector(const Eigen::VectorXd& y, double tol = 1e-9) {
    if (y.size() == 0) return false;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (!(y(i) >= -tol) || !std::isfinite(y(i))) return false;
    return std::abs(y.sum() - 1.0) <= tol;
}

struct Dataset {
    std::vector<LabeledPoint> points;
    std::size_t dim = 0;
    std::size_t classes = 0;
    /// Generator-recorded cluster membership; empty when unknown.
    std::vector<int> cluster_id;
    /// Intrinsic (chart) coordinates for curve/manifold generators; empty otherwise.
    std::vector<Eigen::VectorXd> intrinsic;
    /// Label string for each class index (CSV round trips); may be empty.
    std::vector<std::string> class_names;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }
    std::size_t class_of(std::size_t i) const { return argmax(points[i].label); }

    void push_back(Eigen::VectorXd x, std::size_t cls) {
        points.push_back({std::move(x), one_hot(classes, cls)});
    }
};

inline std::vector<std::size_t> class_counts(const Dataset& data) {
    std::vector<std::size_t> counts(data.classes, 0);
    for (std::size_t i = 0; i < data.size(); ++i) ++counts[data.class_of(i)];
    return counts;
}

/// Throws ShapeError unless every point has the dataset's d and c.
inline void validate_shapes(const Dataset& data) {
    for (const auto& p : data.points) {
        if (static_cast<std::size_t>(p.features.size()) != data.dim)
            throw ShapeError("dataset point has feature dimension " + std::to_string(p.features.size()) +
                             ", expected " + std::to_string(data.dim));
        if (static_cast<std::size_t>(p.label.size()) != data.classes)
            throw ShapeError("dataset point has label dimension " + std::to_string(p.label.size()) +
                             ", expected " + std::to_string(data.classes));
    }
}

/// Copy of the rows at `indices`, keeping per-point metadata aligned.
inline Dataset subset(const Dataset& data, std::span<const std::size_t> indices) {
    Dataset out;
    out.dim = data.dim;
    out.classes = data.classes;
    out.class_names = data.class_names;
    out.points.reserve(indices.size());
    for (std::size_t i : indices) {
        out.points.push_back(data.points.at(i));
        if (!data.cluster_id.empty()) out.cluster_id.push_back(data.cluster_id[i]);
        if (!data.intrinsic.empty()) out.intrinsic.push_back(data.intrinsic[i]);
    }
    return out;
}

/// Fisher-Yates shuffle driven by uniform_index (stable across standard libraries).
template <class T, class Gen>
void shuffle(std::vector<T>& v, Gen& gen) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(gen, i));
        std::swap(v[i - 1], v[j]);
    }
}

/// Seeded split stratified by class: each class contributes round(train_fraction * n_c)
/// points to the training set.
inline std::pair<Dataset, Dataset> split_stratified(const Dataset& data, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ParameterError("train_fraction must be in (0, 1)");
    Rng gen = make_stream(seed, 0x5B1D);
    std::vector<std::vector<std::size_t>> by_class(data.classes);
    for (std::size_t i = 0; i < data.size(); ++i) by_class[data.class_of(i)].push_back(i);
    std::vector<std::size_t> train, test;
    for (auto& members : by_class) {
        shuffle(members, gen);
        const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(members.size())));
        train.insert(train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
        test.insert(test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {subset(data, train), subset(data, test)};
}

/// k labeled points viewed as the uniform measure over its atoms, with the
/// dataset row each atom came from.
struct KBatch {
    std::vector<LabeledPoint> points;
    std::vector<std::size_t> source;

    std::size_t size() const noexcept { return points.size(); }
};

inline KBatch make_batch(const Dataset& data, std::span<const std::size_t> indices) {
    KBatch b;
    b.points.reserve(indices.size());
    b.source.assign(indices.begin(), indices.end());
    for (std::size_t i : indices) b.points.push_back(data.points.at(i));
    return b;
}

}  // namespace kmixup
