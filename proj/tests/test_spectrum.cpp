#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "post/rng.hpp"
#include "post/spectrum.hpp"

using namespace post;

namespace {

// Random strictly ordered spectrum with gaps log-uniform in [gap_lo, gap_hi].
DecaySpectrum random_spectrum(CounterRng& rng, std::size_t n, double gap_lo,
                              double gap_hi) {
    std::vector<double> p(n);
    p[0] = rng.uniform(-5.0, 5.0);
    for (std::size_t k = 1; k < n; ++k) {
        const double gap = std::exp(rng.uniform(std::log(gap_lo), std::log(gap_hi)));
        p[k] = p[k - 1] + gap;
    }
    return DecaySpectrum::from_log_rates(p);
}

}  // namespace

TEST_CASE("post_map matches hand-computed anchors and gaps") {
    const double ln_em1 = std::log(std::exp(1.0) - 1.0);
    const DecaySpectrum s = post_map({1.0, {ln_em1, ln_em1}});
    REQUIRE(s.channels() == 3);
    CHECK(s.p[0] == 1.0);
    CHECK_THAT(s.p[1], Catch::Matchers::WithinAbs(2.0, 1e-14));
    CHECK_THAT(s.p[2], Catch::Matchers::WithinAbs(3.0, 1e-14));
}

TEST_CASE("post_map with no gap parameters returns the anchor alone") {
    const DecaySpectrum s = post_map({-3.0, {}});
    REQUIRE(s.channels() == 1);
    CHECK(s.p[0] == -3.0);
}

TEST_CASE("post_map output is strictly ascending for random parameters") {
    CounterRng rng(2024, 0);
    for (int trial = 0; trial < 1000; ++trial) {
        PostParams params;
        params.theta = 0.0;
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform01() * 14);
        for (std::size_t j = 0; j + 1 < n; ++j) {
            params.delta.push_back(rng.uniform(-30.0, 5.0));
        }
        const DecaySpectrum s = post_map(params);
        REQUIRE(s.strictly_ascending());
    }
}

TEST_CASE("post_map rejects non-finite parameters") {
    CHECK_THROWS_AS(post_map({std::nan(""), {}}), std::invalid_argument);
    CHECK_THROWS_AS(post_map({0.0, {std::numeric_limits<double>::infinity()}}),
                    std::invalid_argument);
}

TEST_CASE("inverse_post_map recovers the first example") {
    const PostParams params = inverse_post_map(DecaySpectrum{{1.0, 2.0, 3.0}});
    const double ln_em1 = std::log(std::exp(1.0) - 1.0);
    CHECK(params.theta == 1.0);
    REQUIRE(params.delta.size() == 2);
    CHECK_THAT(params.delta[0], Catch::Matchers::WithinAbs(ln_em1, 1e-14));
    CHECK_THAT(params.delta[1], Catch::Matchers::WithinAbs(ln_em1, 1e-14));
}

TEST_CASE("inverse_post_map survives a 1e-9 gap") {
    const PostParams params = inverse_post_map(DecaySpectrum{{0.0, 1e-9}});
    // High-precision value of ln(exp(1e-9) - 1), frozen from an extended
    // precision evaluation.
    const double expected = -20.723265836446411;
    REQUIRE(params.delta.size() == 1);
    CHECK_THAT(params.delta[0], Catch::Matchers::WithinAbs(expected, 1e-9));
    CHECK(std::isfinite(params.delta[0]));
}

TEST_CASE("inverse_post_map rejects non-ascending spectra") {
    CHECK_THROWS_AS(inverse_post_map(DecaySpectrum{{2.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(inverse_post_map(DecaySpectrum{{1.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("round trip: spectrum -> params -> spectrum within 1e-12") {
    CounterRng rng(7, 1);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform01() * 30);
        const DecaySpectrum s = random_spectrum(rng, n, 1e-9, 10.0);
        const DecaySpectrum back = post_map(inverse_post_map(s));
        for (std::size_t k = 0; k < n; ++k) {
            REQUIRE_THAT(back.p[k], Catch::Matchers::WithinAbs(s.p[k], 1e-12));
        }
    }
}

TEST_CASE("round trip: params -> spectrum -> params within 1e-12") {
    // Gap parameters below ~-5 produce gaps so small that recovering them
    // from O(1) log-rates rounds at the 1e-12 level; the spectrum-space round
    // trip above covers that regime instead.
    CounterRng rng(7, 2);
    for (int trial = 0; trial < 200; ++trial) {
        PostParams params;
        params.theta = rng.uniform(-4.0, 4.0);
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform01() * 14);
        for (std::size_t j = 0; j + 1 < n; ++j) params.delta.push_back(rng.uniform(-4.0, 1.5));
        const PostParams back = inverse_post_map(post_map(params));
        REQUIRE(back.theta == params.theta);
        for (std::size_t j = 0; j < params.delta.size(); ++j) {
            REQUIRE_THAT(back.delta[j],
                         Catch::Matchers::WithinAbs(params.delta[j], 1e-12));
        }
    }
}

TEST_CASE("coherence closed-form values") {
    CHECK(coherence(1.3, 1.3) == 1.0);
    // sech(1) for a log-rate gap of 2.
    CHECK_THAT(coherence(0.0, 2.0),
               Catch::Matchers::WithinAbs(0.6480542736638854, 1e-15));
    CHECK(coherence(-1.0, 1.0) == coherence(1.0, -1.0));
}

TEST_CASE("coherence decreases strictly with the log-rate gap") {
    double prev = coherence(0.0, 0.0);
    for (double gap = 0.25; gap < 8.0; gap += 0.25) {
        const double c = coherence(0.0, gap);
        REQUIRE(c < prev);
        prev = c;
    }
}

namespace {

// Trapezoid-rule L2 overlap of h(s) = exp(-r s) on [0, 200/min(r_i, r_j)].
double quadrature_coherence(double r_i, double r_j, std::size_t steps) {
    const double upper = 200.0 / std::min(r_i, r_j);
    const double h = upper / static_cast<double>(steps);
    double dot = 0.0, norm_i = 0.0, norm_j = 0.0;
    for (std::size_t q = 0; q <= steps; ++q) {
        const double s = h * static_cast<double>(q);
        const double wq = (q == 0 || q == steps) ? 0.5 : 1.0;
        const double hi = std::exp(-r_i * s);
        const double hj = std::exp(-r_j * s);
        dot += wq * hi * hj;
        norm_i += wq * hi * hi;
        norm_j += wq * hj * hj;
    }
    return dot / std::sqrt(norm_i * norm_j);
}

}  // namespace

TEST_CASE("coherence matches the quadrature overlap of exponential responses") {
    // The trapezoid resolution requirement grows with the rate ratio, so the
    // step counts below are sized to keep the quadrature itself under 1e-7.
    CounterRng rng(11, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const double p_i = rng.uniform(-3.0, 2.0);
        const double gap = rng.uniform(0.0, 1.5) * (rng.uniform01() < 0.5 ? -1.0 : 1.0);
        const double p_j = p_i + gap;
        const double oracle = quadrature_coherence(std::exp(p_i), std::exp(p_j), 1 << 21);
        REQUIRE_THAT(coherence(p_i, p_j), Catch::Matchers::WithinAbs(oracle, 1e-6));
    }
    // The log-rate gap 2 pair from the closed-form check, at finer resolution.
    const double oracle = quadrature_coherence(std::exp(-1.0), std::exp(1.0), 1 << 22);
    REQUIRE_THAT(coherence(-1.0, 1.0), Catch::Matchers::WithinAbs(oracle, 1e-6));
}

TEST_CASE("spectrum_stats on equal-gap and near-degenerate spectra") {
    const SpectrumStats s1 = spectrum_stats(DecaySpectrum{{1.0, 2.0, 3.0}});
    REQUIRE(s1.min_gap.has_value());
    CHECK(*s1.min_gap == 1.0);
    CHECK(*s1.max_gap == 1.0);
    CHECK(*s1.mean_gap == 1.0);
    // sech(0.5)
    CHECK_THAT(*s1.max_coherence,
               Catch::Matchers::WithinAbs(0.8868188839700739, 1e-15));
    CHECK(s1.strictly_ordered);

    const SpectrumStats s2 = spectrum_stats(DecaySpectrum{{0.0, 0.001, 5.0}});
    CHECK_THAT(*s2.min_gap, Catch::Matchers::WithinAbs(0.001, 1e-15));
    // sech(x) = 1 - x^2/2 + O(x^4) at x = 0.0005.
    CHECK_THAT(*s2.max_coherence,
               Catch::Matchers::WithinAbs(1.0 - 1.25e-7, 2e-14));

    const SpectrumStats s3 = spectrum_stats(DecaySpectrum{{0.5}});
    CHECK(s3.strictly_ordered);
    CHECK_FALSE(s3.min_gap.has_value());
    CHECK_FALSE(s3.max_coherence.has_value());

    const SpectrumStats s4 = spectrum_stats(DecaySpectrum{{2.0, 1.0}});
    CHECK_FALSE(s4.strictly_ordered);
    CHECK(*s4.min_gap == 1.0);  // gaps are computed on the sorted spectrum
}

TEST_CASE("geometric_init spans [1/T, 1] with equal gaps") {
    const DecaySpectrum two = post_map(geometric_init(2, std::exp(1.0)));
    CHECK_THAT(two.p[0], Catch::Matchers::WithinAbs(-1.0, 1e-14));
    CHECK_THAT(two.p[1], Catch::Matchers::WithinAbs(0.0, 1e-14));
    CHECK_THAT(two.rate(0), Catch::Matchers::WithinAbs(std::exp(-1.0), 1e-14));
    CHECK_THAT(two.timescale(0), Catch::Matchers::WithinAbs(std::exp(1.0), 1e-13));

    const DecaySpectrum five = post_map(geometric_init(5, 1024.0));
    const double expected_gap = std::log(1024.0) / 4.0;
    for (std::size_t k = 1; k < 5; ++k) {
        REQUIRE_THAT(five.p[k] - five.p[k - 1],
                     Catch::Matchers::WithinAbs(expected_gap, 1e-12));
    }
    CHECK_THAT(five.p[0], Catch::Matchers::WithinAbs(-std::log(1024.0), 1e-12));
    CHECK_THAT(five.p[4], Catch::Matchers::WithinAbs(0.0, 1e-12));

    const PostParams round = inverse_post_map(five);
    const PostParams direct = geometric_init(5, 1024.0);
    for (std::size_t j = 0; j < 4; ++j) {
        REQUIRE_THAT(round.delta[j],
                     Catch::Matchers::WithinAbs(direct.delta[j], 1e-12));
    }

    CHECK_THROWS_AS(geometric_init(5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(geometric_init(1, 8.0), std::invalid_argument);
}

TEST_CASE("nondegeneracy_bound closed form and limits") {
    // softplus(c) = theta makes the bound sech(ln(2)/2) = 2 sqrt(2) / 3.
    const double theta = 0.75;
    const double c = softplus_inv(theta);
    CHECK_THAT(nondegeneracy_bound(theta, c),
               Catch::Matchers::WithinAbs(0.9428090415820634, 1e-15));
    // Gap floor -> -inf collapses the bound to 1.
    CHECK(nondegeneracy_bound(1.0, -40.0) > 1.0 - 1e-12);
    CHECK(nondegeneracy_bound(1.0, -40.0) <= 1.0);
    CHECK_THROWS_AS(nondegeneracy_bound(0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(nondegeneracy_bound(-1.0, 0.0), std::domain_error);
}

TEST_CASE("nondegeneracy bound is attained by the first adjacent pair") {
    CounterRng rng(5, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const double theta = std::exp(rng.uniform(std::log(1e-3), std::log(10.0)));
        const double c = rng.uniform(-5.0, 3.0);
        // Rate-space cumulative-softplus chain with every gap parameter at the
        // floor; the first adjacent pair realizes the bound exactly.
        const double r1 = theta;
        const double r2 = theta + softplus(c);
        const double measured = coherence(std::log(r1), std::log(r2));
        REQUIRE_THAT(measured,
                     Catch::Matchers::WithinAbs(nondegeneracy_bound(theta, c), 1e-12));
    }
}

TEST_CASE("for two channels the bound equals the measured max coherence") {
    CounterRng rng(5, 1);
    for (int trial = 0; trial < 20; ++trial) {
        const double theta = std::exp(rng.uniform(std::log(0.01), std::log(5.0)));
        const double c = rng.uniform(-3.0, 2.0);
        const DecaySpectrum s{{std::log(theta), std::log(theta + softplus(c))}};
        const SpectrumStats stats = spectrum_stats(s);
        REQUIRE_THAT(*stats.max_coherence,
                     Catch::Matchers::WithinAbs(nondegeneracy_bound(theta, c), 1e-12));
    }
}
