#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace post {

// Pairwise (binary-tree) summation.  The reduction shape depends only on the
// array length, so totals are identical no matter how work was split across
// threads beforehand.
inline double pairwise_sum(const double* a, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(a, h) + pairwise_sum(a + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& a) {
    return pairwise_sum(a.data(), a.size());
}

inline double mean(const std::vector<double>& a) {
    if (a.empty()) throw std::invalid_argument("mean: empty sample");
    return pairwise_sum(a) / static_cast<double>(a.size());
}

// Unbiased sample variance (two-pass).
inline double variance(const std::vector<double>& a, double m) {
    if (a.size() < 2) throw std::invalid_argument("variance: need at least 2 samples");
    std::vector<double> sq(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - m;
        sq[i] = d * d;
    }
    return pairwise_sum(sq) / static_cast<double>(a.size() - 1);
}

inline double stderr_of_mean(const std::vector<double>& a, double m) {
    return std::sqrt(variance(a, m) / static_cast<double>(a.size()));
}

inline double covariance(const std::vector<double>& x, const std::vector<double>& y,
                         double mx, double my) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("covariance: size mismatch or too few samples");
    }
    std::vector<double> prod(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) prod[i] = (x[i] - mx) * (y[i] - my);
    return pairwise_sum(prod) / static_cast<double>(x.size() - 1);
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
};

// Ordinary least squares y = a + b x with coefficient of determination.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("linear_fit: need matching samples, at least 2");
    }
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (syy == 0.0) {
        f.r2 = 1.0;
    } else {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - (f.intercept + f.slope * x[i]);
            ss_res += r * r;
        }
        f.r2 = 1.0 - ss_res / syy;
    }
    return f;
}

// Quantile with linear interpolation at rank q * (n - 1); input need not be sorted.
inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw std::invalid_argument("quantile: empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
}

inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

}  // namespace post
