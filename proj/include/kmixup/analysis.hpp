#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"
#include "mixup.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "synthetic.hpp"
#include "transport.hpp"

namespace kmixup {

// ---------------------------------------------------------------------------
// Cross-cluster matching statistics
// ---------------------------------------------------------------------------

/// Outcome of optimally matching one pair of cluster-labelled batches.
struct ClusterMatch {
    std::size_t cross = 0;
    /// Per-cluster counts in each batch (r for the first, s for the second).
    std::vector<std::size_t> r, s;
    /// Euclidean length of every cross-cluster match.
    std::vector<double> cross_lengths;

    /// Minimum possible number of cross-cluster matches: (1/2) sum_i |r_i - s_i|.
    std::size_t predicted_cross() const {
        std::size_t total = 0;
        for (std::size_t i = 0; i < r.size(); ++i) total += r[i] > s[i] ? r[i] - s[i] : s[i] - r[i];
        return total / 2;
    }
};

inline ClusterMatch match_cluster_batches(const Dataset& a, const Dataset& b, std::size_t clusters) {
    if (a.cluster_id.size() != a.size() || b.cluster_id.size() != b.size())
        throw InputError("batches need recorded cluster ids");
    const Assignment sigma = solve_assignment(pairwise_sq_distances(a.points, b.points));
    ClusterMatch out;
    out.r.assign(clusters, 0);
    out.s.assign(clusters, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++out.r.at(static_cast<std::size_t>(a.cluster_id[i]));
        ++out.s.at(static_cast<std::size_t>(b.cluster_id[i]));
        const std::size_t j = sigma.sigma[i];
        if (a.cluster_id[i] != b.cluster_id[j]) {
            ++out.cross;
            out.cross_lengths.push_back((a.points[i].features - b.points[j].features).norm());
        }
    }
    return out;
}

struct MatchStats {
    std::size_t k = 0;
    std::size_t trials = 0;
    /// Total cross-cluster matches / (k * trials).
    double cross_cluster_fraction = 0.0;
    std::vector<std::size_t> per_trial_counts;
    /// (1/2) sum_i |r_i - s_i| for each trial.
    std::vector<std::size_t> predicted_counts;
    std::vector<std::vector<std::size_t>> r, s;
    /// Lengths of all cross-cluster matches, trial by trial.
    std::vector<double> match_lengths;

    /// Trials whose observed count equals the predicted count.
    std::size_t exact_trials() const {
        std::size_t n = 0;
        for (std::size_t t = 0; t < trials; ++t) n += per_trial_counts[t] == predicted_counts[t] ? 1 : 0;
        return n;
    }
};

/// Each trial draws two fresh i.i.d. k-batches from `spec` (trial t uses
/// generator stream t of `seed`), matches them, and counts matches whose
/// endpoints carry different cluster ids.
inline MatchStats cross_cluster_stats(const ClusterSpec& spec, std::size_t k, std::size_t trials, std::uint64_t seed,
                                      std::size_t threads = 1) {
    spec.validate();
    if (k < 1 || trials < 1) throw ParameterError("k and trials must be >= 1");
    if (!spec.well_separated())
        throw PreconditionError("clusters violate the separation precondition: min ball gap " +
                                std::to_string(spec.min_gap()) + " < 2 * max radius " +
                                std::to_string(2.0 * spec.max_radius()));
    std::vector<ClusterMatch> per_trial(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        Rng gen = make_stream(seed, t);
        const Dataset a = sample_clusters(spec, k, gen);
        const Dataset b = sample_clusters(spec, k, gen);
        per_trial[t] = match_cluster_batches(a, b, spec.m());
    });

    MatchStats out;
    out.k = k;
    out.trials = trials;
    std::size_t total = 0;
    for (auto& m : per_trial) {
        total += m.cross;
        out.per_trial_counts.push_back(m.cross);
        out.predicted_counts.push_back(m.predicted_cross());
        out.match_lengths.insert(out.match_lengths.end(), m.cross_lengths.begin(), m.cross_lengths.end());
        out.r.push_back(std::move(m.r));
        out.s.push_back(std::move(m.s));
    }
    out.cross_cluster_fraction = static_cast<double>(total) / static_cast<double>(k * trials);
    return out;
}

// ---------------------------------------------------------------------------
// Endpoint localization of cross-cluster matches
// ---------------------------------------------------------------------------

struct LocalizationReport {
    std::size_t k = 0;
    std::size_t trials = 0;
    double D = 0.0;
    double epsilon = 0.0;
    std::size_t cross_matches = 0;
    /// Cross matches with the A-side endpoint outside A_eps or the B-side
    /// endpoint outside B_eps.
    std::size_t violations = 0;
    double violation_fraction = 0.0;
};

inline LocalizationReport endpoint_localization(const ClusterSpec& spec, std::size_t k, std::size_t trials,
                                                std::uint64_t seed, std::size_t threads = 1) {
    const ClusterGeometry geom = ClusterGeometry::from_spec(spec);
    if (k < 1 || trials < 1) throw ParameterError("k and trials must be >= 1");
    std::vector<std::size_t> cross(trials, 0), bad(trials, 0);
    parallel_for(trials, threads, [&](std::size_t t) {
        Rng gen = make_stream(seed, t);
        const Dataset a = sample_clusters(spec, k, gen);
        const Dataset b = sample_clusters(spec, k, gen);
        const Assignment sigma = solve_assignment(pairwise_sq_distances(a.points, b.points));
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = sigma.sigma[i];
            if (a.cluster_id[i] == b.cluster_id[j]) continue;
            ++cross[t];
            const bool a_first = a.cluster_id[i] == 0;
            const Eigen::VectorXd& pa = a_first ? a.points[i].features : b.points[j].features;
            const Eigen::VectorXd& pb = a_first ? b.points[j].features : a.points[i].features;
            if (!geom.in_a_eps(pa) || !geom.in_b_eps(pb)) ++bad[t];
        }
    });
    LocalizationReport out;
    out.k = k;
    out.trials = trials;
    out.D = geom.D;
    out.epsilon = geom.epsilon;
    for (std::size_t t = 0; t < trials; ++t) {
        out.cross_matches += cross[t];
        out.violations += bad[t];
    }
    out.violation_fraction =
        out.cross_matches == 0 ? 0.0 : static_cast<double>(out.violations) / static_cast<double>(out.cross_matches);
    return out;
}

// ---------------------------------------------------------------------------
// W2 scaling with batch size
// ---------------------------------------------------------------------------

struct LineFit {
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    /// Root-mean-square residual.
    double residual = std::numeric_limits<double>::quiet_NaN();
};

/// Ordinary least squares y = intercept + slope * x.
inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw ParameterError("line fit needs >= 2 aligned points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw ParameterError("line fit needs distinct x values");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (f.intercept + f.slope * xs[i]);
        ss += e * e;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

struct ScalingReport {
    std::vector<std::size_t> ks;
    std::vector<double> mean_w2sq;
    double fitted_slope = std::numeric_limits<double>::quiet_NaN();
    double fit_residual = std::numeric_limits<double>::quiet_NaN();
    /// Set when some mean is zero or non-finite, so no log-log fit exists.
    bool degenerate = false;
};

/// For each k, the mean W2^2 between two fresh k-point draws of `sampler`
/// over `trials` trials, then an OLS fit of log mean against log k.
/// `sampler(k, gen)` returns k feature vectors.
template <class Sampler>
ScalingReport w2_scaling(Sampler&& sampler, const std::vector<std::size_t>& ks, std::size_t trials,
                         std::uint64_t seed, std::size_t threads = 1) {
    if (ks.size() < 2) throw ParameterError("w2 scaling needs at least two batch sizes");
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] < 1) throw ParameterError("batch sizes must be >= 1");
        if (i > 0 && ks[i] <= ks[i - 1]) throw ParameterError("batch sizes must be strictly increasing");
    }
    if (trials < 1) throw ParameterError("trials must be >= 1");

    ScalingReport out;
    out.ks = ks;
    std::vector<double> xs, ys;
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        const std::size_t k = ks[ki];
        std::vector<double> w(trials);
        parallel_for(trials, threads, [&](std::size_t t) {
            Rng gen = make_stream(seed, (static_cast<std::uint64_t>(ki) << 32) | t);
            const auto a = sampler(k, gen);
            const auto b = sampler(k, gen);
            w[t] = w2_squared_points(a, b);
        });
        double mean = 0.0;
        for (double v : w) mean += v;
        mean /= static_cast<double>(trials);
        out.mean_w2sq.push_back(mean);
        if (!(mean > 0.0) || !std::isfinite(mean)) out.degenerate = true;
        xs.push_back(std::log(static_cast<double>(k)));
        ys.push_back(std::log(mean));
    }
    if (!out.degenerate) {
        const LineFit f = fit_line(xs, ys);
        out.fitted_slope = f.slope;
        out.fit_residual = f.residual;
    }
    return out;
}

/// Sampler for the circle (d_intrinsic = 1) or flat square (2) manifold.
inline auto manifold_sampler(std::size_t d_intrinsic, std::size_t ambient_dim) {
    validate_manifold_dims(d_intrinsic, ambient_dim);
    return [=](std::size_t k, Rng& gen) { return sample_manifold(d_intrinsic, ambient_dim, k, gen); };
}

// ---------------------------------------------------------------------------
// Vicinal deviation
// ---------------------------------------------------------------------------

/// min(|v - x_gamma|^2, |v - x_xi|^2) for one vicinal point.
inline double closest_parent_sq_distance(const VicinalPoint& v, const Dataset& data) {
    const double a = (v.features - data.points[v.parent_gamma].features).squaredNorm();
    const double b = (v.features - data.points[v.parent_xi].features).squaredNorm();
    return std::min(a, b);
}

/// Average over `steps` k-mixup steps of each vicinal point's squared
/// distance to the closer of its two matched parents.
inline double vicinal_deviation(const Dataset& data, const MixupConfig& cfg, std::size_t steps, std::uint64_t seed) {
    if (steps < 1) throw ParameterError("steps must be >= 1");
    Rng gen = make_stream(seed, 0xD1);
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t s = 0; s < steps; ++s) {
        for (const auto& v : make_vicinal_step(data, cfg, gen)) {
            total += closest_parent_sq_distance(v, data);
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

}  // namespace kmixup
