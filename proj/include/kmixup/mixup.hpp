#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "beta.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "rng.hpp"
#include "transport.hpp"

namespace kmixup {

struct MixupConfig {
    std::size_t k = 1;
    double alpha = 1.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (k < 1) throw ParameterError("k must be >= 1");
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be positive and finite");
    }
};

/// One displacement-interpolated sample and where it came from.
struct VicinalPoint {
    Eigen::VectorXd features;
    Eigen::VectorXd label;
    double lambda = 0.0;
    std::size_t parent_gamma = 0;
    std::size_t parent_xi = 0;
};

/// m distinct indices from [0, n), in random order (sparse partial Fisher-Yates).
template <class Gen>
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t m, Gen& gen) {
    if (m > n) throw DatasetTooSmall("cannot draw " + std::to_string(m) + " distinct indices from " + std::to_string(n));
    std::unordered_map<std::size_t, std::size_t> swapped;
    auto at = [&](std::size_t i) {
        auto it = swapped.find(i);
        return it == swapped.end() ? i : it->second;
    };
    std::vector<std::size_t> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(uniform_index(gen, n - i));
        const std::size_t vi = at(i), vj = at(j);
        out[i] = vj;
        swapped[j] = vi;
        swapped[i] = vj;
    }
    return out;
}

/// Point i of the result is lambda * (x,y)^gamma_i + (1 - lambda) * (x,y)^xi_{sigma(i)};
/// a single lambda is shared by the whole batch.
inline std::vector<VicinalPoint> displacement_interpolate(const KBatch& gamma, const KBatch& xi, const Assignment& sigma,
                                                          double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda must lie in [0, 1]");
    const std::size_t k = gamma.size();
    if (xi.size() != k || sigma.size() != k) throw ShapeError("batch and assignment sizes disagree");
    std::vector<VicinalPoint> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = sigma.sigma[i];
        if (j >= k) throw ShapeError("assignment index out of range");
        const LabeledPoint& a = gamma.points[i];
        const LabeledPoint& b = xi.points[j];
        if (a.features.size() != b.features.size() || a.label.size() != b.label.size())
            throw ShapeError("batches have incompatible feature or label dimensions");
        VicinalPoint v;
        v.features = lambda * a.features + (1.0 - lambda) * b.features;
        v.label = lambda * a.label + (1.0 - lambda) * b.label;
        v.lambda = lambda;
        v.parent_gamma = gamma.source.empty() ? i : gamma.source[i];
        v.parent_xi = xi.source.empty() ? j : xi.source[j];
        out.push_back(std::move(v));
    }
    return out;
}

/// Match the two index groups by optimal transport and interpolate with a
/// fresh lambda ~ Beta(alpha, alpha).
template <class Gen>
std::vector<VicinalPoint> matched_interpolation(const Dataset& data, std::span<const std::size_t> gamma_idx,
                                                std::span<const std::size_t> xi_idx, double alpha, Gen& gen) {
    const KBatch gamma = make_batch(data, gamma_idx);
    const KBatch xi = make_batch(data, xi_idx);
    const Assignment sigma = solve_assignment(cost_matrix(gamma, xi));
    const double lambda = sample_lambda(alpha, gen);
    return displacement_interpolate(gamma, xi, sigma, lambda);
}

inline void require_room_for_two_batches(const Dataset& data, std::size_t k) {
    if (data.size() < 2 * k)
        throw DatasetTooSmall("dataset has " + std::to_string(data.size()) + " points, k-mixup with k=" +
                              std::to_string(k) + " needs at least " + std::to_string(2 * k));
}

/// One k-mixup step: 2k distinct rows drawn uniformly, split into disjoint
/// batches gamma and xi, matched, and displacement-interpolated.
template <class Gen>
std::vector<VicinalPoint> make_vicinal_step(const Dataset& data, const MixupConfig& cfg, Gen& gen) {
    cfg.validate();
    require_room_for_two_batches(data, cfg.k);
    const auto idx = sample_without_replacement(data.size(), 2 * cfg.k, gen);
    const std::span<const std::size_t> all(idx);
    return matched_interpolation(data, all.first(cfg.k), all.subspan(cfg.k), cfg.alpha, gen);
}

/// Streams vicinal batches in partitioned epochs: each epoch shuffles the
/// dataset and consumes consecutive groups of 2k rows, so every row is used
/// at most once per epoch. The N mod 2k leftover rows sit out that epoch.
class VicinalSampler {
public:
    VicinalSampler(const Dataset& data, const MixupConfig& cfg, std::uint64_t stream = 0)
        : data_(&data), cfg_(cfg), gen_(make_stream(cfg.seed, stream)) {
        cfg_.validate();
        require_room_for_two_batches(data, cfg_.k);
        order_.resize(data.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        reshuffle();
    }

    std::size_t steps_per_epoch() const noexcept { return data_->size() / (2 * cfg_.k); }

    std::vector<VicinalPoint> next() {
        if (cursor_ + 2 * cfg_.k > order_.size()) reshuffle();
        const std::span<const std::size_t> group(order_.data() + cursor_, 2 * cfg_.k);
        cursor_ += 2 * cfg_.k;
        return matched_interpolation(*data_, group.first(cfg_.k), group.subspan(cfg_.k), cfg_.alpha, gen_);
    }

private:
    void reshuffle() {
        shuffle(order_, gen_);
        cursor_ = 0;
    }

    const Dataset* data_;
    MixupConfig cfg_;
    Rng gen_;
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
};

/// Monte Carlo sample of the distribution of points that row `anchor` is
/// transported to.
struct LocalDistribution {
    std::size_t anchor_index = 0;
    std::vector<Eigen::VectorXd> matched_points;
    std::vector<std::size_t> matched_indices;
    Eigen::VectorXd mean;
    Eigen::VectorXd label_mean;
};

inline constexpr std::size_t kDefaultLocalSamples = 256;

/// Each sample draws a k-batch gamma that contains the anchor (the other k-1
/// rows uniform without replacement) and an independent uniform k-batch xi
/// over all rows, matches them, and records where the anchor goes.
template <class Gen>
LocalDistribution estimate_local_distribution(const Dataset& data, std::size_t anchor, const MixupConfig& cfg,
                                              std::size_t num_samples, Gen& gen) {
    cfg.validate();
    if (num_samples < 1) throw ParameterError("num_samples must be >= 1");
    require_room_for_two_batches(data, cfg.k);
    if (anchor >= data.size()) throw ParameterError("anchor index out of range");

    LocalDistribution out;
    out.anchor_index = anchor;
    out.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(data.dim));
    out.label_mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(data.classes));
    out.matched_points.reserve(num_samples);
    out.matched_indices.reserve(num_samples);

    std::vector<std::size_t> gamma_idx(cfg.k);
    for (std::size_t s = 0; s < num_samples; ++s) {
        gamma_idx[0] = anchor;
        // Draw k-1 others from the N-1 non-anchor rows, then shift past the anchor.
        const auto others = sample_without_replacement(data.size() - 1, cfg.k - 1, gen);
        for (std::size_t t = 0; t < others.size(); ++t) gamma_idx[t + 1] = others[t] >= anchor ? others[t] + 1 : others[t];
        const auto xi_idx = sample_without_replacement(data.size(), cfg.k, gen);

        const KBatch gamma = make_batch(data, gamma_idx);
        const KBatch xi = make_batch(data, xi_idx);
        const Assignment sigma = solve_assignment(cost_matrix(gamma, xi));
        const std::size_t hit = xi_idx[sigma.sigma[0]];
        out.matched_indices.push_back(hit);
        out.matched_points.push_back(data.points[hit].features);
    }
    for (std::size_t s = 0; s < num_samples; ++s) {
        out.mean += out.matched_points[s];
        out.label_mean += data.points[out.matched_indices[s]].label;
    }
    out.mean /= static_cast<double>(num_samples);
    out.label_mean /= static_cast<double>(num_samples);
    return out;
}

}  // namespace kmixup
