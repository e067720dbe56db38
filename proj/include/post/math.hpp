#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace post {

// log(1 + e^x), stable on both tails.
inline double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// Inverse of softplus on (0, inf): log(e^y - 1).
// Evaluated as log(expm1(y)) for small y and y + log1p(-e^-y) for large y,
// so gaps as small as 1e-12 survive a round trip.
inline double softplus_inv(double y) {
    if (!(y > 0.0)) {
        throw std::domain_error("softplus_inv: argument must be positive");
    }
    constexpr double kLn2 = 0.6931471805599453;
    return y > kLn2 ? y + std::log1p(-std::exp(-y)) : std::log(std::expm1(y));
}

// 2 / (e^x + e^-x); even, sech(0) = 1, decays to 0.
inline double sech(double x) { return 1.0 / std::cosh(x); }

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log(x / (1 - x)) for x in (0, 1).
inline double logit(double x) {
    if (!(x > 0.0 && x < 1.0)) {
        throw std::domain_error("logit: argument must lie in (0, 1)");
    }
    return std::log(x) - std::log1p(-x);
}

// log(sigmoid(x)) = -softplus(-x), stable for x << 0.
inline double log_sigmoid(double x) { return -softplus(-x); }

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// Position factor t^-alpha with a pinned evaluation order.  The two boundary
// exponents use exact arithmetic (1 and 1/t) so that the limit channels keep
// their closed-form identities bit-for-bit; interior exponents use
// exp(-alpha * log(t)), one fixed order everywhere in the library.
inline double position_scale(double t, double alpha) {
    if (alpha == 0.0) return 1.0;
    if (alpha == 1.0) return 1.0 / t;
    return std::exp(-alpha * std::log(t));
}

inline bool is_finite(double x) { return std::isfinite(x); }

}  // namespace post
