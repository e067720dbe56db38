#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "post/math.hpp"
#include "post/spectrum.hpp"

namespace post {

// Per-channel taper exponents alpha_k in [0, 1].  alpha_1 = 1 stretches the
// slowest channel with position; alpha_N = 0 pins the fastest channel to
// absolute lag.  `clamped` records whether any entry hit the [0, 1] clamp.
struct TaperVector {
    std::vector<double> alpha;
    bool clamped = false;

    std::size_t channels() const { return alpha.size(); }
};

struct EquipartitionBand {
    double epsilon = 0.0;
    std::vector<double> deviation;  // allowed |alpha_k - (N-k)/(N-1)|
};

// Ideal taper alpha_k = (N-k)/(N-1).  A single channel gets [0]: it behaves
// like a plain recurrence in absolute lag.
inline TaperVector linear_taper(std::size_t n) {
    if (n == 0) throw std::invalid_argument("linear_taper: need at least 1 channel");
    TaperVector taper;
    taper.alpha.resize(n);
    if (n == 1) {
        taper.alpha[0] = 0.0;
        return taper;
    }
    for (std::size_t k = 0; k < n; ++k) {
        taper.alpha[k] = static_cast<double>(n - 1 - k) / static_cast<double>(n - 1);
    }
    return taper;
}

// Taper that restores equal log-rate gaps at position t_ref:
//   alpha_k = clamp((N-k)/(N-1) + ((p_k - p_1) - (k-1)*Gbar) / ln(t_ref), 0, 1),
// with Gbar the mean gap.  The correction is evaluated from gap prefix sums as
//   (S_k*(N-1) - (k-1)*S_N) / ((N-1) * ln(t_ref)),
// which is exactly zero at both boundary channels.  A spectrum whose gaps are
// equal up to accumulated rounding (a geometric construction read back from
// its cumulative sums) short-circuits to the exact linear taper; the
// threshold sits at the ulp scale of the log-rates, orders of magnitude below
// any meaningful spectral deviation.
inline TaperVector adaptive_taper(const DecaySpectrum& spectrum, double t_ref) {
    const std::size_t n = spectrum.channels();
    if (n == 1) return linear_taper(1);
    if (!(t_ref > 1.0) || !is_finite(t_ref)) {
        throw std::domain_error("adaptive_taper: reference position t_ref must exceed 1");
    }

    std::vector<double> gaps(n - 1);
    double gap_min = 0.0, gap_max = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        gaps[k] = spectrum.p[k + 1] - spectrum.p[k];
        if (!(gaps[k] > 0.0)) {
            throw std::invalid_argument(
                "adaptive_taper: spectrum not strictly ordered at channel " +
                std::to_string(k + 1));
        }
        gap_min = k == 0 ? gaps[k] : std::min(gap_min, gaps[k]);
        gap_max = k == 0 ? gaps[k] : std::max(gap_max, gaps[k]);
    }
    const double scale = std::abs(spectrum.p.front()) + std::abs(spectrum.p.back()) +
                         (spectrum.p.back() - spectrum.p.front());
    constexpr double kUlpSlack = 32.0 * std::numeric_limits<double>::epsilon();
    if (gap_max - gap_min <= kUlpSlack * scale) return linear_taper(n);

    std::vector<double> prefix(n, 0.0);  // prefix[k] = p_{k+1} - p_1
    for (std::size_t k = 1; k < n; ++k) prefix[k] = prefix[k - 1] + gaps[k - 1];

    const double nm1 = static_cast<double>(n - 1);
    const double denom = nm1 * std::log(t_ref);
    TaperVector taper;
    taper.alpha.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double linear = static_cast<double>(n - 1 - k) / nm1;
        const double corr =
            (prefix[k] * nm1 - static_cast<double>(k) * prefix[n - 1]) / denom;
        const double raw = linear + corr;
        taper.alpha[k] = clamp01(raw);
        if (raw != taper.alpha[k]) taper.clamped = true;
    }
    return taper;
}

// Log-timescale proxy for sigmoid-gated channels: log(sigmoid(w0)) evaluated
// as -softplus(-w0).  For w0 << 0 this is ~w0 (the exponential-gate limit).
inline std::vector<double> sigmoid_lograte_proxy(const std::vector<double>& logits) {
    std::vector<double> proxy(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) {
        if (!is_finite(logits[k])) {
            throw std::invalid_argument("sigmoid_lograte_proxy: non-finite logit");
        }
        proxy[k] = log_sigmoid(logits[k]);
    }
    return proxy;
}

// Allowed taper deviation under equipartition slack epsilon:
//   d_k = (2 eps / (1 - eps)) * (N-k)/(N-1);  the boundary d_N is always 0.
inline EquipartitionBand equipartition_band(std::size_t n, double epsilon) {
    if (n < 2) throw std::invalid_argument("equipartition_band: need at least 2 channels");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) {
        throw std::domain_error("equipartition_band: epsilon must lie in [0, 1)");
    }
    EquipartitionBand band;
    band.epsilon = epsilon;
    band.deviation.resize(n);
    const double scale = 2.0 * epsilon / (1.0 - epsilon);
    for (std::size_t k = 0; k < n; ++k) {
        band.deviation[k] =
            scale * static_cast<double>(n - 1 - k) / static_cast<double>(n - 1);
    }
    return band;
}

// Effective spectrum at position t: p_k -> p_k - alpha_k * ln(t), i.e.
// r_k -> r_k * t^-alpha_k.  Identity at t = 1.
inline DecaySpectrum effective_spectrum(const DecaySpectrum& spectrum,
                                        const TaperVector& taper, double t) {
    if (spectrum.channels() != taper.channels()) {
        throw std::invalid_argument("effective_spectrum: channel count mismatch");
    }
    if (!(t >= 1.0)) {
        throw std::domain_error("effective_spectrum: position t must be >= 1");
    }
    const double log_t = std::log(t);
    std::vector<double> p(spectrum.channels());
    for (std::size_t k = 0; k < p.size(); ++k) {
        p[k] = spectrum.p[k] - taper.alpha[k] * log_t;
    }
    return DecaySpectrum{std::move(p)};
}

}  // namespace post
