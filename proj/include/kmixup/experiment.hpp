#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "nn.hpp"

namespace kmixup {

/// Shared settings for a grid of (k, alpha, seed) training runs. The k and
/// alpha inside `train.mixup` are overridden per cell.
struct ExperimentConfig {
    TrainConfig train;
    double train_fraction = 0.8;
    /// Vicinal points drawn when measuring the deviation metric
    /// (split into max(1, deviation_points / k) matchings).
    std::size_t deviation_points = 4096;
};

struct CellResult {
    std::size_t k = 0;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    double test_acc = std::numeric_limits<double>::quiet_NaN();
    double train_acc = std::numeric_limits<double>::quiet_NaN();
    double vicinal_deviation = std::numeric_limits<double>::quiet_NaN();
    double wall_time = 0.0;
    /// "ok" or "diverged: <diagnostic>".
    std::string status = "ok";
    MlpModel model;
    std::vector<EpochMetrics> history;

    bool ok() const { return status == "ok"; }
};

/// Split `data` with `seed`, train one model with k-mixup(k, alpha) and the
/// same seed, and measure accuracy and vicinal deviation. All k and alpha
/// values that share a seed see the same split and initial weights.
inline CellResult run_cell(const Dataset& data, const ExperimentConfig& exp, std::size_t k, double alpha,
                           std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    CellResult cell;
    cell.k = k;
    cell.alpha = alpha;
    cell.seed = seed;

    const auto [train_set, test_set] = split_stratified(data, exp.train_fraction, seed);
    TrainConfig cfg = exp.train;
    cfg.mixup = MixupConfig{k, alpha, seed};
    cfg.seed = seed;
    try {
        TrainResult res = train(train_set, test_set, cfg);
        cell.model = std::move(res.model);
        cell.history = std::move(res.history);
        cell.test_acc = evaluate(cell.model, test_set);
        cell.train_acc = evaluate(cell.model, train_set);
    } catch (const NumericError& e) {
        cell.status = std::string("diverged: ") + e.what();
    }
    const std::size_t steps = std::max<std::size_t>(1, exp.deviation_points / k);
    cell.vicinal_deviation = vicinal_deviation(train_set, cfg.mixup, steps, seed);
    cell.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return cell;
}

/// Throws DatasetTooSmall unless every k in `ks` leaves room for two
/// disjoint k-batches in the training split.
inline void check_grid_fits(const Dataset& data, const ExperimentConfig& exp, const std::vector<std::size_t>& ks) {
    const auto [train_set, test_set] = split_stratified(data, exp.train_fraction, 0);
    if (test_set.empty()) throw DatasetTooSmall("test split is empty; dataset too small for the train fraction");
    for (std::size_t k : ks) require_room_for_two_batches(train_set, k);
}

}  // namespace kmixup
