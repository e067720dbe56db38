#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "post/gates.hpp"
#include "post/math.hpp"
#include "post/matrix.hpp"
#include "post/parallel.hpp"
#include "post/rng.hpp"
#include "post/spectrum.hpp"
#include "post/stats.hpp"
#include "post/taper.hpp"

namespace post {

// S_t = diag(w_t) S_{t-1} + u_t, computed strictly left to right.
// Returns all states as an L x N x d tensor; initial state defaults to zero.
inline Tensor3 sequential_scan(const GateSchedule& gates, const Tensor3& inputs,
                               const Matrix* initial = nullptr) {
    const std::size_t length = gates.length();
    const std::size_t n = gates.channels();
    if (inputs.n0 != length || inputs.n1 != n) {
        throw std::invalid_argument("sequential_scan: input shape mismatch");
    }
    const std::size_t d = inputs.n2;
    if (initial && (initial->rows != n || initial->cols != d)) {
        throw std::invalid_argument("sequential_scan: initial state shape mismatch");
    }

    Tensor3 states(length, n, d);
    Matrix s = initial ? *initial : Matrix(n, d);
    for (std::size_t l = 0; l < length; ++l) {
        for (std::size_t k = 0; k < n; ++k) {
            const double w = gates.w(l, k);
            for (std::size_t j = 0; j < d; ++j) {
                s(k, j) = w * s(k, j) + inputs(l, k, j);
                states(l, k, j) = s(k, j);
            }
        }
    }
    return states;
}

inline Matrix final_state(const Tensor3& states) {
    Matrix s(states.n1, states.n2);
    for (std::size_t k = 0; k < states.n1; ++k) {
        for (std::size_t j = 0; j < states.n2; ++j) {
            s(k, j) = states(states.n0 - 1, k, j);
        }
    }
    return s;
}

// Chunked scan: within each chunk the local recurrence starts from zero and
// the carried state enters through the chunk prefix product,
//   S_t = local_t + (prod_{j<=t in chunk} w_j) * S_carry.
// Gates may vary inside a chunk; the result matches the sequential scan up to
// floating-point reassociation.
inline Tensor3 chunked_scan(const GateSchedule& gates, const Tensor3& inputs,
                            std::size_t chunk, const Matrix* initial = nullptr) {
    if (chunk == 0) throw std::invalid_argument("chunked_scan: chunk must be >= 1");
    const std::size_t length = gates.length();
    const std::size_t n = gates.channels();
    if (inputs.n0 != length || inputs.n1 != n) {
        throw std::invalid_argument("chunked_scan: input shape mismatch");
    }
    const std::size_t d = inputs.n2;
    if (initial && (initial->rows != n || initial->cols != d)) {
        throw std::invalid_argument("chunked_scan: initial state shape mismatch");
    }

    Tensor3 states(length, n, d);
    Matrix carry = initial ? *initial : Matrix(n, d);
    std::vector<double> prefix(n);
    Matrix local(n, d);
    for (std::size_t start = 0; start < length; start += chunk) {
        const std::size_t stop = std::min(length, start + chunk);
        prefix.assign(n, 1.0);
        local = Matrix(n, d);
        for (std::size_t l = start; l < stop; ++l) {
            for (std::size_t k = 0; k < n; ++k) {
                const double w = gates.w(l, k);
                prefix[k] *= w;
                for (std::size_t j = 0; j < d; ++j) {
                    local(k, j) = w * local(k, j) + inputs(l, k, j);
                    states(l, k, j) = local(k, j) + prefix[k] * carry(k, j);
                }
            }
        }
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = 0; j < d; ++j) carry(k, j) = states(stop - 1, k, j);
        }
    }
    return states;
}

// Measured vs idealized impulse response of one tapered channel.  The
// response to a unit impulse emitted at position t0, observed s steps later,
// is the product of the position-varying gates over [t0, t0+s-1]; evaluated
// in log space to avoid underflow over long windows.  The idealization
// freezes the gate at the receiving position t = t0 + s:
// exp(-l_k * s * t^-alpha).
struct ImpulseRecord {
    std::size_t channel = 0;
    double base_rate = 0.0;
    double alpha = 0.0;
    std::uint64_t t0 = 1;
    std::vector<std::uint64_t> lags;
    std::vector<double> measured_log;
    std::vector<double> idealized_log;
    std::vector<double> measured;
    std::vector<double> idealized;
};

inline ImpulseRecord impulse_response(const DecaySpectrum& spectrum,
                                      const TaperVector& taper, std::size_t channel,
                                      std::uint64_t t0,
                                      const std::vector<std::uint64_t>& lags) {
    if (spectrum.channels() != taper.channels()) {
        throw std::invalid_argument("impulse_response: channel count mismatch");
    }
    if (channel >= spectrum.channels()) {
        throw std::invalid_argument("impulse_response: channel index out of range");
    }
    if (t0 < 1) throw std::invalid_argument("impulse_response: emission position t0 must be >= 1");

    ImpulseRecord rec;
    rec.channel = channel;
    rec.base_rate = spectrum.rate(channel);
    rec.alpha = taper.alpha[channel];
    rec.t0 = t0;
    rec.lags = lags;
    rec.measured_log.resize(lags.size());
    rec.idealized_log.resize(lags.size());
    rec.measured.resize(lags.size());
    rec.idealized.resize(lags.size());
    for (std::size_t i = 0; i < lags.size(); ++i) {
        const std::uint64_t s = lags[i];
        double scale_sum = 0.0;
        for (std::uint64_t j = t0; j < t0 + s; ++j) {
            scale_sum += position_scale(static_cast<double>(j), rec.alpha);
        }
        const double t = static_cast<double>(t0 + s);
        rec.measured_log[i] = -(rec.base_rate * scale_sum);
        rec.idealized_log[i] =
            -(rec.base_rate * (static_cast<double>(s) * position_scale(t, rec.alpha)));
        rec.measured[i] = std::exp(rec.measured_log[i]);
        rec.idealized[i] = std::exp(rec.idealized_log[i]);
    }
    return rec;
}

// Monte Carlo state energy of a tapered scalar channel driven by
// unit-variance white noise.  Gate at position t is exp(-ell * t^-alpha).
// The closed-form comparison value t^alpha/(2 ell) (1 - exp(-2 ell t^(1-alpha)))
// freezes the gate at the final position; it carries O(1/tau) discrete-time
// error plus O(alpha * tau/t) from the frozen gate, so treat it as an
// idealization unless tau << t.  Energy ratios across positions keep their
// stated scaling either way.
struct EnergyMc {
    double alpha = 0.0;
    double ell = 0.0;
    std::vector<std::uint64_t> positions;
    std::vector<double> mean_energy;
    std::vector<double> stderr_energy;
    std::vector<std::vector<double>> covariance;  // across positions
    std::vector<double> closed_form;
    bool small_tau_warning = false;
};

inline double energy_closed_form(double alpha, double ell, double t) {
    const double t_alpha = 1.0 / position_scale(t, alpha);          // t^alpha
    const double t_one_minus = t * position_scale(t, alpha);        // t^(1-alpha)
    return t_alpha / (2.0 * ell) * (-std::expm1(-2.0 * ell * t_one_minus));
}

inline EnergyMc energy_mc(double alpha, double ell,
                          const std::vector<std::uint64_t>& positions,
                          std::size_t trials, std::uint64_t seed,
                          unsigned threads = 1) {
    if (!(ell > 0.0)) throw std::invalid_argument("energy_mc: base rate ell must be positive");
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("energy_mc: alpha must lie in [0, 1]");
    }
    if (positions.empty() || trials < 2) {
        throw std::invalid_argument("energy_mc: need positions and at least 2 trials");
    }
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (positions[i] < 1 || (i > 0 && positions[i] <= positions[i - 1])) {
            throw std::invalid_argument("energy_mc: positions must be ascending and >= 1");
        }
    }

    const std::uint64_t t_max = positions.back();
    std::vector<double> gate(t_max);
    for (std::uint64_t t = 1; t <= t_max; ++t) {
        gate[t - 1] = std::exp(-ell * position_scale(static_cast<double>(t), alpha));
    }

    const std::size_t m = positions.size();
    std::vector<std::vector<double>> energy(m, std::vector<double>(trials));
    parallel_for(trials, threads, [&](std::size_t trial) {
        CounterRng rng(seed, trial);
        double s = 0.0;
        std::size_t next = 0;
        for (std::uint64_t t = 1; t <= t_max; ++t) {
            s = gate[t - 1] * s + rng.gaussian();
            if (next < m && positions[next] == t) {
                energy[next][trial] = s * s;
                ++next;
            }
        }
    });

    EnergyMc out;
    out.alpha = alpha;
    out.ell = ell;
    out.positions = positions;
    out.mean_energy.resize(m);
    out.stderr_energy.resize(m);
    out.closed_form.resize(m);
    out.covariance.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        out.mean_energy[i] = mean(energy[i]);
        out.stderr_energy[i] = stderr_of_mean(energy[i], out.mean_energy[i]);
        out.closed_form[i] = energy_closed_form(alpha, ell, static_cast<double>(positions[i]));
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            const double c =
                covariance(energy[i], energy[j], out.mean_energy[i], out.mean_energy[j]);
            out.covariance[i][j] = c;
            out.covariance[j][i] = c;
        }
    }
    const double tau = 1.0 / (ell * position_scale(static_cast<double>(t_max), alpha));
    out.small_tau_warning = tau < 10.0;
    return out;
}

// Predicted inter-mode energy ratio distortion between positions t1 < t2:
// (t2/t1)^(alpha_i - alpha_j).  The base rates only identify the modes; the
// asymptotic factor does not depend on them.
inline double energy_ratio_distortion(double alpha_i, double alpha_j, double t1,
                                      double t2, double ell_i, double ell_j) {
    if (!(t2 > t1 && t1 >= 1.0)) {
        throw std::invalid_argument("energy_ratio_distortion: need t2 > t1 >= 1");
    }
    if (!(ell_i > 0.0 && ell_j > 0.0)) {
        throw std::invalid_argument("energy_ratio_distortion: base rates must be positive");
    }
    return std::exp((alpha_i - alpha_j) * std::log(t2 / t1));
}

}  // namespace post
