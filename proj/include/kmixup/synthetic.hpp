#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace kmixup {

// ---------------------------------------------------------------------------
// Clustered distributions
// ---------------------------------------------------------------------------

/// m balls with centers, radii, mixture weights and a class label per ball.
struct ClusterSpec {
    std::vector<Eigen::VectorXd> centers;
    std::vector<double> radii;
    std::vector<double> weights;
    std::vector<std::size_t> labels;

    std::size_t m() const noexcept { return centers.size(); }
    std::size_t dim() const { return centers.empty() ? 0 : static_cast<std::size_t>(centers.front().size()); }
    std::size_t classes() const { return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1; }

    void validate() const {
        if (centers.empty()) throw ParameterError("cluster spec needs at least one cluster");
        if (radii.size() != m() || weights.size() != m() || labels.size() != m())
            throw ParameterError("cluster spec fields must all have one entry per cluster");
        for (const auto& c : centers)
            if (static_cast<std::size_t>(c.size()) != dim() || !c.allFinite())
                throw ParameterError("cluster centers must share one finite dimension");
        for (double r : radii)
            if (!(r >= 0.0) || !std::isfinite(r)) throw ParameterError("cluster radii must be finite and >= 0");
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("cluster weights must be finite and >= 0");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-9) throw ParameterError("cluster weights must sum to 1");
    }

    double max_radius() const { return *std::max_element(radii.begin(), radii.end()); }

    double center_distance(std::size_t i, std::size_t j) const { return (centers[i] - centers[j]).norm(); }

    /// Smallest distance between two covering balls (+inf for m = 1).
    double min_gap() const {
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m(); ++i)
            for (std::size_t j = i + 1; j < m(); ++j) gap = std::min(gap, center_distance(i, j) - radii[i] - radii[j]);
        return gap;
    }

    /// Every pair of balls is at least 2 * max radius apart, so any
    /// cross-cluster squared distance dominates any within-cluster one.
    bool well_separated() const { return min_gap() >= 2.0 * max_radius(); }
};

/// Two clusters of radius `radius_a`, `radius_b` whose balls are `gap` apart
/// along the first axis, with mass `p` on the first.
inline ClusterSpec two_cluster_spec(std::size_t dim, double gap, double radius_a, double radius_b, double p = 0.5) {
    if (dim < 1) throw ParameterError("dimension must be >= 1");
    ClusterSpec s;
    Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    Eigen::VectorXd b = a;
    b(0) = radius_a + gap + radius_b;
    s.centers = {a, b};
    s.radii = {radius_a, radius_b};
    s.weights = {p, 1.0 - p};
    s.labels = {0, 1};
    return s;
}

/// m equal-weight clusters centered at scale * e_j in R^dim (dim >= m),
/// each its own class.
inline ClusterSpec simplex_cluster_spec(std::size_t m, std::size_t dim, double scale, double radius) {
    if (m < 1 || dim < m) throw ParameterError("simplex spec needs 1 <= m <= dim");
    ClusterSpec s;
    for (std::size_t j = 0; j < m; ++j) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
        c(static_cast<Eigen::Index>(j)) = scale;
        s.centers.push_back(c);
        s.radii.push_back(radius);
        s.weights.push_back(1.0 / static_cast<double>(m));
        s.labels.push_back(j);
    }
    return s;
}

/// Uniform point in the ball of radius r around c.
template <class Gen>
Eigen::VectorXd uniform_in_ball(const Eigen::VectorXd& c, double r, Gen& gen) {
    const Eigen::Index d = c.size();
    Eigen::VectorXd dir(d);
    double norm = 0.0;
    do {
        for (Eigen::Index i = 0; i < d; ++i) dir(i) = standard_normal(gen);
        norm = dir.norm();
    } while (norm == 0.0);
    const double rho = r * std::pow(uniform01(gen), 1.0 / static_cast<double>(d));
    return c + (rho / norm) * dir;
}

template <class Gen>
std::size_t sample_categorical(const std::vector<double>& weights, Gen& gen) {
    const double u = uniform01(gen);
    double acc = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        acc += weights[j];
        if (u < acc) return j;
    }
    // u landed in the rounding slack above the last cumulative weight.
    for (std::size_t j = weights.size(); j-- > 0;)
        if (weights[j] > 0.0) return j;
    return weights.size() - 1;
}

/// n i.i.d. draws: cluster j ~ weights, then uniform in ball(center_j, radius_j).
template <class Gen>
Dataset sample_clusters(const ClusterSpec& spec, std::size_t n, Gen& gen) {
    spec.validate();
    Dataset out;
    out.dim = spec.dim();
    out.classes = spec.classes();
    out.points.reserve(n);
    out.cluster_id.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = sample_categorical(spec.weights, gen);
        out.push_back(uniform_in_ball(spec.centers[j], spec.radii[j], gen), spec.labels[j]);
        out.cluster_id.push_back(static_cast<int>(j));
    }
    return out;
}

inline Dataset gen_clusters(const ClusterSpec& spec, std::size_t n, std::uint64_t seed) {
    Rng gen = make_stream(seed, 0xC1);
    return sample_clusters(spec, n, gen);
}

/// Two-cluster geometry used by the endpoint-localization check.
struct ClusterGeometry {
    Eigen::VectorXd center_a;
    Eigen::VectorXd center_b;
    double R_A = 0.0;
    double R_B = 0.0;
    /// Euclidean distance between the two balls.
    double D = 0.0;
    /// max(R_A, R_B)^2 / D^2.
    double epsilon = 0.0;

    static ClusterGeometry from_spec(const ClusterSpec& spec) {
        spec.validate();
        if (spec.m() != 2) throw ParameterError("endpoint localization needs exactly two clusters");
        ClusterGeometry g;
        g.center_a = spec.centers[0];
        g.center_b = spec.centers[1];
        g.R_A = spec.radii[0];
        g.R_B = spec.radii[1];
        g.D = spec.center_distance(0, 1) - g.R_A - g.R_B;
        if (!(g.D > 0.0)) throw PreconditionError("clusters must be disjoint (positive gap)");
        const double r = std::max(g.R_A, g.R_B);
        g.epsilon = (r * r) / (g.D * g.D);
        return g;
    }

    double distance_to_a(const Eigen::VectorXd& x) const { return std::max(0.0, (x - center_a).norm() - R_A); }
    double distance_to_b(const Eigen::VectorXd& x) const { return std::max(0.0, (x - center_b).norm() - R_B); }

    /// x (a point of A) lies within D(1 + epsilon) of B.
    bool in_a_eps(const Eigen::VectorXd& x) const { return distance_to_b(x) <= D * (1.0 + epsilon); }
    bool in_b_eps(const Eigen::VectorXd& x) const { return distance_to_a(x) <= D * (1.0 + epsilon); }
};

// ---------------------------------------------------------------------------
// Toy classification sets (2-D, binary)
// ---------------------------------------------------------------------------

struct OneRingParams {
    double disk_radius = 1.0;
    double ring_inner = 1.3;
    double ring_outer = 2.3;
};

struct FourBarsParams {
    double spacing = 1.0;
    double width = 0.4;
    double height = 2.0;
};

struct SwissRollParams {
    /// Radius gained per full turn; the two arms are half a turn apart.
    double pitch = 1.0;
    double theta_min = M_PI;
    double theta_max = 3.0 * M_PI;
};

namespace detail {

inline void require_points(std::size_t n, std::size_t min_n) {
    if (n < min_n) throw ParameterError("n must be >= " + std::to_string(min_n));
}

inline void require_noise(double noise) {
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw ParameterError("noise must be finite and >= 0");
}

/// floor(n/2) zeros and ceil(n/2) ones in shuffled order.
template <class Gen>
std::vector<std::size_t> balanced_binary_labels(std::size_t n, Gen& gen) {
    std::vector<std::size_t> labels(n, 1);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n / 2), 0);
    shuffle(labels, gen);
    return labels;
}

inline Dataset empty_2d_binary() {
    Dataset d;
    d.dim = 2;
    d.classes = 2;
    return d;
}

template <class Gen>
Eigen::Vector2d jitter(double noise, Gen& gen) {
    if (noise == 0.0) return Eigen::Vector2d::Zero();
    return {noise * standard_normal(gen), noise * standard_normal(gen)};
}

}  // namespace detail

/// Class 0 a central disk, class 1 an annulus around it. Intrinsic coords
/// are the noiseless (radius, angle).
inline Dataset gen_one_ring(std::size_t n, const OneRingParams& params, double noise, std::uint64_t seed) {
    detail::require_points(n, 2);
    detail::require_noise(noise);
    if (!(params.disk_radius > 0.0 && params.ring_inner >= params.disk_radius && params.ring_outer > params.ring_inner))
        throw ParameterError("one_ring radii must satisfy 0 < disk <= inner < outer");
    Rng gen = make_stream(seed, 0x0E1);
    Dataset out = detail::empty_2d_binary();
    for (std::size_t cls : detail::balanced_binary_labels(n, gen)) {
        double rho;
        if (cls == 0) {
            rho = params.disk_radius * std::sqrt(uniform01(gen));
        } else {
            const double a = params.ring_inner * params.ring_inner;
            const double b = params.ring_outer * params.ring_outer;
            rho = std::sqrt(a + (b - a) * uniform01(gen));
        }
        const double phi = 2.0 * M_PI * uniform01(gen);
        Eigen::VectorXd x = Eigen::Vector2d(rho * std::cos(phi), rho * std::sin(phi)) + detail::jitter(noise, gen);
        out.push_back(std::move(x), cls);
        out.intrinsic.push_back(Eigen::Vector2d(rho, phi));
    }
    return out;
}

inline Dataset gen_one_ring(std::size_t n, double noise, std::uint64_t seed) {
    return gen_one_ring(n, OneRingParams{}, noise, seed);
}

/// Four parallel vertical strips at x = 0, s, 2s, 3s with labels 0,1,0,1.
/// Intrinsic coords are (bar index, offset across, offset along).
inline Dataset gen_four_bars(std::size_t n, const FourBarsParams& params, double noise, std::uint64_t seed) {
    detail::require_points(n, 2);
    detail::require_noise(noise);
    if (!(params.width > 0.0 && params.height > 0.0 && params.spacing > params.width))
        throw ParameterError("four_bars needs spacing > width > 0 and height > 0");
    Rng gen = make_stream(seed, 0x4BA);
    Dataset out = detail::empty_2d_binary();
    for (std::size_t cls : detail::balanced_binary_labels(n, gen)) {
        const std::size_t bar = cls + 2 * static_cast<std::size_t>(uniform_index(gen, 2));
        const double u = (uniform01(gen) - 0.5) * params.width;
        const double v = (uniform01(gen) - 0.5) * params.height;
        Eigen::VectorXd x =
            Eigen::Vector2d(static_cast<double>(bar) * params.spacing + u, v) + detail::jitter(noise, gen);
        out.push_back(std::move(x), cls);
        out.intrinsic.push_back(Eigen::Vector3d(static_cast<double>(bar), u, v));
    }
    return out;
}

inline Dataset gen_four_bars(std::size_t n, double noise, std::uint64_t seed) {
    return gen_four_bars(n, FourBarsParams{}, noise, seed);
}

/// Point on arm `arm` (0 or 1) of the double spiral at angle theta:
/// radius pitch * theta / 2pi, arm 1 rotated by pi.
inline Eigen::Vector2d swiss_roll_curve(const SwissRollParams& params, std::size_t arm, double theta) {
    const double rho = params.pitch * theta / (2.0 * M_PI);
    const double phase = arm == 0 ? 0.0 : M_PI;
    return {rho * std::cos(theta + phase), rho * std::sin(theta + phase)};
}

/// Two interleaved spiral arms with opposite labels; theta is drawn so points
/// are uniform in arc length. Intrinsic coords are (theta, arm).
inline Dataset gen_swiss_roll(std::size_t n, const SwissRollParams& params, double noise, std::uint64_t seed) {
    detail::require_points(n, 2);
    detail::require_noise(noise);
    if (!(params.pitch > 0.0 && params.theta_min >= 0.0 && params.theta_max > params.theta_min))
        throw ParameterError("swiss_roll needs pitch > 0 and 0 <= theta_min < theta_max");
    Rng gen = make_stream(seed, 0x5A1);
    Dataset out = detail::empty_2d_binary();
    // Arc length of an Archimedean spiral grows ~ theta^2, so theta ~ sqrt(uniform on [t0^2, t1^2]).
    const double a = params.theta_min * params.theta_min;
    const double b = params.theta_max * params.theta_max;
    for (std::size_t cls : detail::balanced_binary_labels(n, gen)) {
        const double theta = std::sqrt(a + (b - a) * uniform01(gen));
        Eigen::VectorXd x = swiss_roll_curve(params, cls, theta) + detail::jitter(noise, gen);
        out.push_back(std::move(x), cls);
        out.intrinsic.push_back(Eigen::Vector2d(theta, static_cast<double>(cls)));
    }
    return out;
}

inline Dataset gen_swiss_roll(std::size_t n, double noise, std::uint64_t seed) {
    return gen_swiss_roll(n, SwissRollParams{}, noise, seed);
}

// ---------------------------------------------------------------------------
// Manifold-supported samples
// ---------------------------------------------------------------------------

inline void validate_manifold_dims(std::size_t d_intrinsic, std::size_t ambient_dim) {
    if (d_intrinsic != 1 && d_intrinsic != 2) throw ParameterError("intrinsic dimension must be 1 or 2");
    if (ambient_dim < 2) throw ParameterError("ambient dimension must be >= 2");
}

/// Uniform point on the unit-radius circle in the first two coordinates
/// (d_intrinsic = 1) or on the flat unit square [0,1]^2 in the first two
/// coordinates (d_intrinsic = 2); remaining coordinates are zero.
/// `chart` receives the intrinsic coordinates (angle, or the square's (u, v)).
template <class Gen>
Eigen::VectorXd sample_manifold_point(std::size_t d_intrinsic, std::size_t ambient_dim, Gen& gen,
                                      Eigen::VectorXd* chart = nullptr, double radius = 1.0) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ambient_dim));
    if (d_intrinsic == 1) {
        const double t = 2.0 * M_PI * uniform01(gen);
        x(0) = radius * std::cos(t);
        x(1) = radius * std::sin(t);
        if (chart) *chart = Eigen::VectorXd::Constant(1, t);
    } else {
        x(0) = uniform01(gen);
        x(1) = uniform01(gen);
        if (chart) *chart = x.head(2);
    }
    return x;
}

template <class Gen>
std::vector<Eigen::VectorXd> sample_manifold(std::size_t d_intrinsic, std::size_t ambient_dim, std::size_t n, Gen& gen) {
    validate_manifold_dims(d_intrinsic, ambient_dim);
    std::vector<Eigen::VectorXd> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sample_manifold_point(d_intrinsic, ambient_dim, gen));
    return out;
}

/// Noise-free manifold samples as a single-class dataset with intrinsic coords.
inline Dataset gen_manifold(std::size_t d_intrinsic, std::size_t ambient_dim, std::size_t n, std::uint64_t seed) {
    validate_manifold_dims(d_intrinsic, ambient_dim);
    detail::require_points(n, 1);
    Rng gen = make_stream(seed, 0x3A7);
    Dataset out;
    out.dim = ambient_dim;
    out.classes = 1;
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::VectorXd chart;
        out.push_back(sample_manifold_point(d_intrinsic, ambient_dim, gen, &chart), 0);
        out.intrinsic.push_back(std::move(chart));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Named generators (CLI front end)
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& generator_names() {
    static const std::vector<std::string> names{"one_ring", "four_bars", "swiss_roll", "two_clusters", "circle", "square"};
    return names;
}

inline bool is_generator_name(const std::string& name) {
    const auto& names = generator_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

// Default Gaussian jitter per toy set, in feature units.
inline constexpr double kOneRingNoise = 0.15;
inline constexpr double kFourBarsNoise = 0.0;
inline constexpr double kSwissRollNoise = 0.05;

/// Generate a named dataset with default parameters. Negative noise selects
/// the generator's default.
inline Dataset generate_named(const std::string& name, std::size_t n, std::uint64_t seed, double noise = -1.0) {
    auto pick = [noise](double fallback) { return noise < 0.0 ? fallback : noise; };
    if (name == "one_ring") return gen_one_ring(n, pick(kOneRingNoise), seed);
    if (name == "four_bars") return gen_four_bars(n, pick(kFourBarsNoise), seed);
    if (name == "swiss_roll") return gen_swiss_roll(n, pick(kSwissRollNoise), seed);
    if (name == "two_clusters") {
        detail::require_points(n, 1);
        return gen_clusters(two_cluster_spec(2, 8.0, 1.0, 1.0), n, seed);
    }
    if (name == "circle") return gen_manifold(1, 2, n, seed);
    if (name == "square") return gen_manifold(2, 2, n, seed);
    throw ParameterError("unknown dataset generator: " + name);
}

}  // namespace kmixup
