#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "post/math.hpp"
#include "post/matrix.hpp"
#include "post/spectrum.hpp"
#include "post/taper.hpp"

namespace post {

// L x N schedule of multiplicative decay gates, one row per position
// t = t0 + l with l = 1..L.
struct GateSchedule {
    Matrix w;            // gates in (0, 1)
    std::uint64_t t0 = 0;

    std::size_t length() const { return w.rows; }
    std::size_t channels() const { return w.cols; }
    double position(std::size_t row) const {
        return static_cast<double>(t0 + row + 1);
    }
};

enum class ModulationKind {
    mamba_delta,    // positive step-size modulation, multiplies the log-gate
    rwkv_additive,  // finite additive logit modulation
};

// Data-dependent modulation supplied as a raw L x N matrix; the neural
// projections that would produce it are out of scope, this is the seam.
// Callers with per-head modulation broadcast the head value across its
// channels before handing the matrix over.
struct ModulationInput {
    ModulationKind kind = ModulationKind::mamba_delta;
    Matrix values;

    static ModulationInput constant(ModulationKind kind, std::size_t length,
                                    std::size_t channels, double value) {
        ModulationInput m;
        m.kind = kind;
        m.values = Matrix(length, channels, value);
        return m;
    }
};

// Base logits for a sigmoid-gated decay path plus the fixed gate scale
// lambda = e^-1/2 and an optional intra-head zigzag bias.
struct RwkvInit {
    std::vector<double> w0;      // strictly increasing logits
    double lambda = 0.0;         // exp(-0.5) exactly
    std::vector<double> zigzag;  // per-channel logit bias, zero by default

    std::size_t channels() const { return w0.size(); }
};

struct RwkvGates {
    GateSchedule schedule;  // multiplicative gates exp(log_decay)
    Matrix log_decay;       // per-step log-decay factors in (-lambda, 0)
};

namespace detail {

inline TaperVector taper_for(const DecaySpectrum& spectrum, double t_train) {
    return spectrum.channels() >= 2 ? adaptive_taper(spectrum, t_train)
                                    : linear_taper(1);
}

// w[l][k] = exp((d_base_k * (t0+l)^-alpha_k) * mod[l][k]) with d_base = -exp(p).
inline GateSchedule scaled_exp_gates(const DecaySpectrum& spectrum,
                                     const TaperVector& taper, std::uint64_t t0,
                                     std::size_t length, const Matrix* mod) {
    if (length == 0) throw std::invalid_argument("gate schedule: length L must be >= 1");
    const std::size_t n = spectrum.channels();
    std::vector<double> d_base(n);
    for (std::size_t k = 0; k < n; ++k) d_base[k] = -std::exp(spectrum.p[k]);

    GateSchedule schedule;
    schedule.t0 = t0;
    schedule.w = Matrix(length, n);
    for (std::size_t l = 0; l < length; ++l) {
        const double t = static_cast<double>(t0 + l + 1);
        for (std::size_t k = 0; k < n; ++k) {
            const double d_eff = d_base[k] * position_scale(t, taper.alpha[k]);
            schedule.w(l, k) = std::exp(mod ? d_eff * (*mod)(l, k) : d_eff);
        }
    }
    return schedule;
}

}  // namespace detail

// Architecture-agnostic schedule: spectral map, spectrum-adaptive taper, then
// w[l][k] = exp(-exp(p_k) * (t0+l)^-alpha_k).
inline GateSchedule generic_gates(const PostParams& params, std::uint64_t t0,
                                  std::size_t length, double t_train) {
    const DecaySpectrum spectrum = post_map(params);
    const TaperVector taper = detail::taper_for(spectrum, t_train);
    return detail::scaled_exp_gates(spectrum, taper, t0, length, nullptr);
}

// Selective-scan style gates with a positive step modulation:
// w[l][k] = exp(A_k * s_{l,k} * delta[l][k]), A_k = -exp(p_k).  With
// delta == 1 this reduces to generic_gates bit-for-bit.
inline GateSchedule mamba_gates(const PostParams& params, const ModulationInput& delta,
                                std::uint64_t t0, std::size_t length, double t_train) {
    if (delta.kind != ModulationKind::mamba_delta) {
        throw std::invalid_argument("mamba_gates: modulation kind must be mamba_delta");
    }
    if (delta.values.rows != length || delta.values.cols != params.channels()) {
        throw std::invalid_argument("mamba_gates: modulation shape mismatch");
    }
    for (double v : delta.values.data) {
        if (!(v > 0.0) || !is_finite(v)) {
            throw std::invalid_argument("mamba_gates: modulation entries must be positive");
        }
    }
    const DecaySpectrum spectrum = post_map(params);
    const TaperVector taper = detail::taper_for(spectrum, t_train);
    return detail::scaled_exp_gates(spectrum, taper, t0, length, &delta.values);
}

// Logits linearly interpolated between logit(1/(lambda*T_train)) and 0.5, so
// the slowest channel's timescale is ~T_train and the fastest ~1/(lambda*0.622).
inline RwkvInit rwkv_init(std::size_t channels, double t_train) {
    if (channels < 2) throw std::invalid_argument("rwkv_init: need at least 2 channels");
    RwkvInit init;
    init.lambda = std::exp(-0.5);
    if (!(init.lambda * t_train > 1.0)) {
        throw std::domain_error("rwkv_init: need lambda * T_train > 1");
    }
    const double lo = logit(1.0 / (init.lambda * t_train));
    const double hi = 0.5;
    if (!(lo < hi)) {
        throw std::domain_error("rwkv_init: T_train too small to order the logits");
    }
    init.w0.resize(channels);
    const double nm1 = static_cast<double>(channels - 1);
    for (std::size_t k = 0; k < channels; ++k) {
        init.w0[k] = lo + (hi - lo) * static_cast<double>(k) / nm1;
    }
    init.zigzag.assign(channels, 0.0);
    return init;
}

// Signed-quadratic intra-head bias b_n = 2.5 * u|u| with
// u = ((n mod d_h) - (d_h-1)/2) / ((d_h-1)/2); spans [-2.5, 2.5] per head.
inline std::vector<double> zigzag_bias(std::size_t channels, std::size_t head_dim) {
    if (head_dim < 2) throw std::invalid_argument("zigzag_bias: head_dim must be >= 2");
    if (channels == 0 || channels % head_dim != 0) {
        throw std::invalid_argument("zigzag_bias: channels must be a multiple of head_dim");
    }
    std::vector<double> bias(channels);
    const double half = (static_cast<double>(head_dim) - 1.0) / 2.0;
    for (std::size_t n = 0; n < channels; ++n) {
        const double u = (static_cast<double>(n % head_dim) - half) / half;
        bias[n] = 2.5 * u * std::abs(u);
    }
    return bias;
}

// Sigmoid-gated schedule with the taper applied inside the logit:
//   log-decay[l][k] = -lambda * sigmoid(w0_k + zigzag_k + f[l][k] - alpha_k*ln(t0+l)),
// gate = exp(log-decay) in (e^-lambda, 1).
inline RwkvGates rwkv_gates(const RwkvInit& init, const ModulationInput& modulation,
                            const TaperVector& taper, std::uint64_t t0,
                            std::size_t length) {
    if (modulation.kind != ModulationKind::rwkv_additive) {
        throw std::invalid_argument("rwkv_gates: modulation kind must be rwkv_additive");
    }
    const std::size_t n = init.channels();
    if (modulation.values.rows != length || modulation.values.cols != n) {
        throw std::invalid_argument("rwkv_gates: modulation shape mismatch");
    }
    if (taper.channels() != n) {
        throw std::invalid_argument("rwkv_gates: taper channel count mismatch");
    }
    if (init.zigzag.size() != n) {
        throw std::invalid_argument("rwkv_gates: zigzag bias length mismatch");
    }
    for (double v : modulation.values.data) {
        if (!is_finite(v)) {
            throw std::invalid_argument("rwkv_gates: modulation entries must be finite");
        }
    }

    RwkvGates out;
    out.schedule.t0 = t0;
    out.schedule.w = Matrix(length, n);
    out.log_decay = Matrix(length, n);
    for (std::size_t l = 0; l < length; ++l) {
        const double log_t = std::log(static_cast<double>(t0 + l + 1));
        for (std::size_t k = 0; k < n; ++k) {
            const double logits = init.w0[k] + init.zigzag[k] +
                                  modulation.values(l, k) - taper.alpha[k] * log_t;
            const double factor = -init.lambda * sigmoid(logits);
            out.log_decay(l, k) = factor;
            out.schedule.w(l, k) = std::exp(factor);
        }
    }
    return out;
}

// Taper exponents from the sigmoid log-timescale proxy p_k = log(sigmoid(w0_k)).
inline TaperVector rwkv_taper(const RwkvInit& init, double t_train) {
    DecaySpectrum proxy = DecaySpectrum::from_log_rates(sigmoid_lograte_proxy(init.w0));
    return adaptive_taper(proxy, t_train);
}

// Retention-style per-head gates gamma_{h,l} = gamma_h^(t^-alpha_h) with
// gamma_h = exp(-exp(p_h)); identical arithmetic to generic_gates.
inline GateSchedule retnet_gates(const PostParams& params, std::uint64_t t0,
                                 std::size_t length, double t_train) {
    if (params.channels() < 2) {
        throw std::invalid_argument("retnet_gates: need at least 2 heads");
    }
    if (length == 0) throw std::invalid_argument("retnet_gates: length L must be >= 1");
    const DecaySpectrum spectrum = post_map(params);
    const TaperVector taper = adaptive_taper(spectrum, t_train);
    const std::size_t heads = spectrum.channels();

    std::vector<double> log_gamma(heads);  // log gamma_h = -exp(p_h)
    for (std::size_t h = 0; h < heads; ++h) log_gamma[h] = -std::exp(spectrum.p[h]);

    GateSchedule schedule;
    schedule.t0 = t0;
    schedule.w = Matrix(length, heads);
    for (std::size_t l = 0; l < length; ++l) {
        const double t = static_cast<double>(t0 + l + 1);
        for (std::size_t h = 0; h < heads; ++h) {
            schedule.w(l, h) =
                std::exp(log_gamma[h] * position_scale(t, taper.alpha[h]));
        }
    }
    return schedule;
}

}  // namespace post
