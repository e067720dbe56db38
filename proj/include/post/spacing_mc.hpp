#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "post/math.hpp"
#include "post/parallel.hpp"
#include "post/rng.hpp"
#include "post/spectrum.hpp"
#include "post/stats.hpp"

namespace post {

enum class SpacingDensity {
    uniform,      // flat on [a, b]; the spacing laws below are exact here
    linear_ramp,  // f(x) = (x-a)/(b-a) + 1/2 on [a, b], density floor m = 1/(2(b-a))
};

struct GapTrialResult {
    std::size_t n = 0;
    std::size_t trials = 0;
    double a = 0.0;
    double b = 1.0;
    SpacingDensity density = SpacingDensity::uniform;
    double mean_min_gap = 0.0;
    double stderr_min_gap = 0.0;
    double mean_max_gap = 0.0;
    double stderr_max_gap = 0.0;
    std::optional<double> mean_max_coherence;  // present only when a > 0
    std::optional<double> stderr_max_coherence;
    // Kolmogorov distance between the empirical law of the normalized minimum
    // spacing and the closed form; present only for the uniform density.
    std::optional<double> ks_distance;
};

// Survival law of the minimum internal spacing of N i.i.d. uniforms on [0,1]:
// Pr(S_min > x) = (1 - (N-1) x)_+^N.
inline double spacing_survival(std::size_t n, double x) {
    if (n < 2) throw std::invalid_argument("spacing_survival: need N >= 2");
    if (!(x >= 0.0)) throw std::invalid_argument("spacing_survival: x must be >= 0");
    const double base = 1.0 - static_cast<double>(n - 1) * x;
    if (base <= 0.0) return 0.0;
    return std::pow(base, static_cast<double>(n));
}

namespace detail {

inline double draw_spacing_sample(CounterRng& rng, double a, double b,
                                  SpacingDensity density) {
    const double u = rng.uniform01();
    if (density == SpacingDensity::uniform) return a + (b - a) * u;
    // Inverse CDF of f(x) = x + 1/2 on [0,1]: x = (sqrt(1 + 8u) - 1) / 2.
    const double x = (std::sqrt(1.0 + 8.0 * u) - 1.0) / 2.0;
    return a + (b - a) * x;
}

struct TrialGaps {
    double min_gap;
    double max_gap;
    double max_coherence;  // NaN when rates are not positive
};

inline TrialGaps gaps_of_sorted(const std::vector<double>& sorted, bool with_coherence) {
    TrialGaps g{};
    g.min_gap = sorted[1] - sorted[0];
    g.max_gap = g.min_gap;
    double min_log_ratio = with_coherence ? std::log(sorted[1] / sorted[0])
                                          : std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 2; k < sorted.size(); ++k) {
        const double gap = sorted[k] - sorted[k - 1];
        g.min_gap = std::min(g.min_gap, gap);
        g.max_gap = std::max(g.max_gap, gap);
        if (with_coherence) {
            min_log_ratio = std::min(min_log_ratio, std::log(sorted[k] / sorted[k - 1]));
        }
    }
    g.max_coherence = with_coherence ? sech(min_log_ratio / 2.0)
                                     : std::numeric_limits<double>::quiet_NaN();
    return g;
}

}  // namespace detail

// Monte Carlo minimum/maximum internal spacing of N i.i.d. draws.  For the
// uniform density the expected minimum gap is exactly (b-a)/((N-1)(N+1)); for
// the ramp the closed form becomes an upper bound 1/(m(N-1)(N+1)).
inline GapTrialResult min_gap_mc(std::size_t n, std::size_t trials, double a, double b,
                                 std::uint64_t seed,
                                 SpacingDensity density = SpacingDensity::uniform,
                                 unsigned threads = 1) {
    if (n < 2) throw std::invalid_argument("min_gap_mc: need N >= 2");
    if (!(b > a)) throw std::invalid_argument("min_gap_mc: need b > a");
    if (trials < 2) throw std::invalid_argument("min_gap_mc: need at least 2 trials");

    const bool with_coherence = a > 0.0;
    std::vector<double> min_gaps(trials), max_gaps(trials), coherences;
    if (with_coherence) coherences.resize(trials);

    parallel_for(trials, threads, [&](std::size_t trial) {
        CounterRng rng(seed, trial);
        std::vector<double> sample(n);
        for (std::size_t k = 0; k < n; ++k) {
            sample[k] = detail::draw_spacing_sample(rng, a, b, density);
        }
        std::sort(sample.begin(), sample.end());
        const auto g = detail::gaps_of_sorted(sample, with_coherence);
        min_gaps[trial] = g.min_gap;
        max_gaps[trial] = g.max_gap;
        if (with_coherence) coherences[trial] = g.max_coherence;
    });

    GapTrialResult out;
    out.n = n;
    out.trials = trials;
    out.a = a;
    out.b = b;
    out.density = density;
    out.mean_min_gap = mean(min_gaps);
    out.stderr_min_gap = stderr_of_mean(min_gaps, out.mean_min_gap);
    out.mean_max_gap = mean(max_gaps);
    out.stderr_max_gap = stderr_of_mean(max_gaps, out.mean_max_gap);
    if (with_coherence) {
        out.mean_max_coherence = mean(coherences);
        out.stderr_max_coherence = stderr_of_mean(coherences, *out.mean_max_coherence);
    }
    if (density == SpacingDensity::uniform) {
        // Empirical CDF of the normalized minimum spacing vs the closed form.
        std::vector<double> normalized(trials);
        for (std::size_t i = 0; i < trials; ++i) normalized[i] = min_gaps[i] / (b - a);
        std::sort(normalized.begin(), normalized.end());
        double ks = 0.0;
        for (std::size_t i = 0; i < trials; ++i) {
            const double cdf = 1.0 - spacing_survival(n, normalized[i]);
            const double hi = static_cast<double>(i + 1) / static_cast<double>(trials);
            const double lo = static_cast<double>(i) / static_cast<double>(trials);
            ks = std::max(ks, std::max(std::abs(hi - cdf), std::abs(cdf - lo)));
        }
        out.ks_distance = ks;
    }
    return out;
}

struct MaxGapPoint {
    std::size_t n = 0;
    double mean_max_gap = 0.0;
    double stderr_max_gap = 0.0;
    double growth_ratio = 0.0;  // N * mean / ln N
};

// Mean maximum internal spacing on uniform [0,1] across N; the normalized
// ratio N * E[S_max] / ln N stays in an O(1) band (extreme-value growth).
inline std::vector<MaxGapPoint> max_gap_mc(const std::vector<std::size_t>& n_list,
                                           std::size_t trials, std::uint64_t seed,
                                           unsigned threads = 1) {
    std::vector<MaxGapPoint> out;
    out.reserve(n_list.size());
    for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
        const std::size_t n = n_list[idx];
        const GapTrialResult r =
            min_gap_mc(n, trials, 0.0, 1.0, seed + idx, SpacingDensity::uniform, threads);
        MaxGapPoint p;
        p.n = n;
        p.mean_max_gap = r.mean_max_gap;
        p.stderr_max_gap = r.stderr_max_gap;
        p.growth_ratio =
            static_cast<double>(n) * r.mean_max_gap / std::log(static_cast<double>(n));
        out.push_back(p);
    }
    return out;
}

struct CoherenceCollapsePoint {
    std::size_t n = 0;
    double mean_max_coherence = 0.0;
    double stderr_max_coherence = 0.0;
};

// Mean maximum pairwise coherence of N i.i.d. rates uniform on [a, b] with
// a > 0; climbs toward 1 as N grows and adjacent rates crowd together.
inline std::vector<CoherenceCollapsePoint> coherence_collapse_mc(
    const std::vector<std::size_t>& n_list, std::size_t trials, std::uint64_t seed,
    double a, double b, unsigned threads = 1) {
    if (!(a > 0.0)) {
        throw std::domain_error("coherence_collapse_mc: rates need a > 0");
    }
    std::vector<CoherenceCollapsePoint> out;
    out.reserve(n_list.size());
    for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
        const GapTrialResult r = min_gap_mc(n_list[idx], trials, a, b, seed + idx,
                                            SpacingDensity::uniform, threads);
        CoherenceCollapsePoint p;
        p.n = n_list[idx];
        p.mean_max_coherence = *r.mean_max_coherence;
        p.stderr_max_coherence = *r.stderr_max_coherence;
        out.push_back(p);
    }
    return out;
}

}  // namespace post
