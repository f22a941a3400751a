#pragma once

#include <cmath>

#include "error.hpp"
#include "rng.hpp"

namespace kmixup {

/// Logarithm of a Gamma(shape, 1) variate.
///
/// Marsaglia-Tsang squeeze for shape >= 1. For shape < 1 the boost
/// Gamma(shape) = Gamma(shape + 1) * U^(1/shape) is applied in log space, so
/// very small shapes (alpha -> 0) underflow gracefully instead of producing 0/0.
template <class Gen>
double log_gamma_variate(double shape, Gen& gen) {
    if (!(shape > 0.0) || !std::isfinite(shape)) throw ParameterError("gamma shape must be positive and finite");
    if (shape < 1.0) {
        double u;
        do {
            u = uniform01(gen);
        } while (u <= 0.0);
        return log_gamma_variate(shape + 1.0, gen) + std::log(u) / shape;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = standard_normal(gen);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01(gen);
        if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v);
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return std::log(d * v);
    }
}

/// Draw lambda ~ Beta(alpha, alpha) as G1 / (G1 + G2) with G1, G2 ~ Gamma(alpha, 1).
template <class Gen>
double sample_lambda(double alpha, Gen& gen) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be positive and finite");
    const double lg1 = log_gamma_variate(alpha, gen);
    const double lg2 = log_gamma_variate(alpha, gen);
    // 1 / (1 + G2/G1); exp overflow to inf yields exactly 0.
    return 1.0 / (1.0 + std::exp(lg2 - lg1));
}

}  // namespace kmixup
