#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "post/math.hpp"

namespace post {

// Decay spectrum of a diagonal linear recurrence, stored in log-rate space:
//   p_k = ln r_k,   rate r_k = exp(p_k)  [nats/token],
//   gate w_k = exp(-r_k),   timescale tau_k = 1/r_k  [tokens].
struct DecaySpectrum {
    std::vector<double> p;

    static DecaySpectrum from_log_rates(std::vector<double> log_rates) {
        if (log_rates.empty()) {
            throw std::invalid_argument("DecaySpectrum: need at least one channel");
        }
        for (double v : log_rates) {
            if (!is_finite(v)) {
                throw std::invalid_argument("DecaySpectrum: non-finite log-rate");
            }
        }
        return DecaySpectrum{std::move(log_rates)};
    }

    std::size_t channels() const { return p.size(); }
    double rate(std::size_t k) const { return std::exp(p[k]); }
    double timescale(std::size_t k) const { return std::exp(-p[k]); }
    double gate(std::size_t k) const { return std::exp(-rate(k)); }

    bool strictly_ascending() const {
        for (std::size_t k = 1; k < p.size(); ++k) {
            if (!(p[k] > p[k - 1])) return false;
        }
        return true;
    }
};

// Anchor + unconstrained gap parameters; the cumulative-softplus map below
// turns them into a strictly ordered spectrum.
struct PostParams {
    double theta = 0.0;
    std::vector<double> delta;

    std::size_t channels() const { return delta.size() + 1; }
};

struct SpectrumStats {
    std::optional<double> min_gap;
    std::optional<double> max_gap;
    std::optional<double> mean_gap;
    std::optional<double> max_coherence;
    bool strictly_ordered = true;
};

// p_1 = theta, p_k = p_{k-1} + softplus(delta_{k-1}).  Output is strictly
// ascending for every finite parameter vector.
inline DecaySpectrum post_map(const PostParams& params) {
    if (!is_finite(params.theta)) {
        throw std::invalid_argument("post_map: non-finite anchor theta");
    }
    for (double d : params.delta) {
        if (!is_finite(d)) {
            throw std::invalid_argument("post_map: non-finite gap parameter");
        }
    }
    std::vector<double> p(params.channels());
    p[0] = params.theta;
    for (std::size_t k = 1; k < p.size(); ++k) {
        p[k] = p[k - 1] + softplus(params.delta[k - 1]);
    }
    return DecaySpectrum{std::move(p)};
}

// Exact inverse on strictly ordered spectra: theta = p_1 and
// delta_j = softplus^-1(p_{j+1} - p_j).
inline PostParams inverse_post_map(const DecaySpectrum& spectrum) {
    const auto& p = spectrum.p;
    PostParams params;
    params.theta = p[0];
    params.delta.resize(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) {
        const double gap = p[k] - p[k - 1];
        if (!(gap > 0.0)) {
            throw std::invalid_argument(
                "inverse_post_map: spectrum not strictly ordered at channel " +
                std::to_string(k));
        }
        params.delta[k - 1] = softplus_inv(gap);
    }
    return params;
}

// Normalized L2 overlap of two exponential impulse responses with log-rates
// p_i, p_j: sech(|p_i - p_j| / 2).  Equals 1 iff the channels coincide.
inline double coherence(double p_i, double p_j) {
    if (!is_finite(p_i) || !is_finite(p_j)) {
        throw std::invalid_argument("coherence: non-finite log-rate");
    }
    return sech(std::abs(p_i - p_j) / 2.0);
}

// Gap statistics on the sorted spectrum.  A single channel has no pairs, so
// the gap fields stay absent rather than NaN.
inline SpectrumStats spectrum_stats(const DecaySpectrum& spectrum) {
    SpectrumStats stats;
    stats.strictly_ordered = spectrum.strictly_ascending();
    const std::size_t n = spectrum.channels();
    if (n < 2) return stats;

    std::vector<double> sorted = spectrum.p;
    std::sort(sorted.begin(), sorted.end());
    double min_gap = sorted[1] - sorted[0];
    double max_gap = min_gap;
    double sum = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double gap = sorted[k] - sorted[k - 1];
        min_gap = std::min(min_gap, gap);
        max_gap = std::max(max_gap, gap);
        sum += gap;
    }
    stats.min_gap = min_gap;
    stats.max_gap = max_gap;
    stats.mean_gap = sum / static_cast<double>(n - 1);
    // Coherence is monotone decreasing in the log-rate gap, so the most
    // redundant pair is the adjacent sorted pair with the smallest gap.
    stats.max_coherence = sech(min_gap / 2.0);
    return stats;
}

// Parameters whose post_map places log-rates uniformly on [ln(1/T), 0]:
// rates geometric on [1/T, 1], timescales spanning [1, T].
inline PostParams geometric_init(std::size_t n, double design_length) {
    if (n < 2) {
        throw std::invalid_argument("geometric_init: need at least 2 channels");
    }
    if (!(design_length > 1.0) || !is_finite(design_length)) {
        throw std::invalid_argument("geometric_init: design length T must exceed 1");
    }
    const double span = std::log(design_length);
    PostParams params;
    params.theta = -span;
    params.delta.assign(n - 1, softplus_inv(span / static_cast<double>(n - 1)));
    return params;
}

// Coherence ceiling for the first adjacent pair of a rate-space
// cumulative-softplus spectrum with anchor rate theta > 0 and gap parameters
// bounded below by c: sech(ln(1 + softplus(c)/theta) / 2).  Attained exactly
// when every gap parameter equals c.
inline double nondegeneracy_bound(double theta, double c) {
    if (!(theta > 0.0) || !is_finite(theta)) {
        throw std::domain_error("nondegeneracy_bound: anchor rate theta must be positive");
    }
    if (!is_finite(c)) {
        throw std::domain_error("nondegeneracy_bound: non-finite gap floor");
    }
    return sech(0.5 * std::log1p(softplus(c) / theta));
}

}  // namespace post
