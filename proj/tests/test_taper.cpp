#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "post/rng.hpp"
#include "post/spectrum.hpp"
#include "post/taper.hpp"

using namespace post;

TEST_CASE("linear_taper values") {
    CHECK(linear_taper(2).alpha == std::vector<double>{1.0, 0.0});
    CHECK(linear_taper(5).alpha == std::vector<double>{1.0, 0.75, 0.5, 0.25, 0.0});
    CHECK(linear_taper(1).alpha == std::vector<double>{0.0});
}

TEST_CASE("adaptive_taper equals linear_taper exactly on geometric spectra") {
    for (std::size_t n : {2UL, 5UL, 16UL}) {
        const DecaySpectrum s = post_map(geometric_init(n, 4096.0));
        const TaperVector adaptive = adaptive_taper(s, 777.0);
        const TaperVector linear = linear_taper(n);
        REQUIRE(adaptive.alpha == linear.alpha);
        CHECK_FALSE(adaptive.clamped);
    }
}

TEST_CASE("adaptive_taper worked example") {
    const DecaySpectrum s{{0.0, 0.5, 2.0}};
    const TaperVector taper = adaptive_taper(s, std::exp(4.0));
    REQUIRE(taper.alpha.size() == 3);
    CHECK(taper.alpha[0] == 1.0);
    CHECK_THAT(taper.alpha[1], Catch::Matchers::WithinAbs(0.375, 1e-15));
    CHECK(taper.alpha[2] == 0.0);
}

TEST_CASE("adaptive_taper boundary exponents are exact for any spectrum") {
    CounterRng rng(31, 0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> p(6);
        p[0] = rng.uniform(-6.0, 0.0);
        for (std::size_t k = 1; k < 6; ++k) p[k] = p[k - 1] + rng.uniform(0.05, 2.0);
        const TaperVector taper = adaptive_taper(DecaySpectrum{p}, 2048.0);
        CHECK(taper.alpha.front() == 1.0);
        CHECK(taper.alpha.back() == 0.0);
        for (double a : taper.alpha) {
            REQUIRE(a >= 0.0);
            REQUIRE(a <= 1.0);
        }
    }
}

TEST_CASE("adaptive_taper restores equal gaps at the reference position") {
    // Pre-clamp taper makes p_k - alpha_k ln(T_ref) an arithmetic progression
    // with common difference Gbar + ln(T_ref)/(N-1).
    CounterRng rng(31, 1);
    const double t_ref = 512.0;
    int unclamped = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 4 + static_cast<std::size_t>(rng.uniform01() * 8);
        // Geometric base plus sub-gap deviations: ordered and clamp-free.
        const double span = std::log(t_ref);
        const double gap = span / static_cast<double>(n - 1);
        std::vector<double> p(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double dev =
                (k > 0 && k + 1 < n) ? rng.uniform(-0.3, 0.3) * gap : 0.0;
            p[k] = -span + static_cast<double>(k) * gap + dev;
        }
        const DecaySpectrum s{p};
        const TaperVector taper = adaptive_taper(s, t_ref);
        if (taper.clamped) continue;
        ++unclamped;
        const DecaySpectrum eff = effective_spectrum(s, taper, t_ref);
        const double gbar = (p[n - 1] - p[0]) / static_cast<double>(n - 1);
        const double expected = gbar + span / static_cast<double>(n - 1);
        for (std::size_t k = 1; k < n; ++k) {
            REQUIRE_THAT(eff.p[k] - eff.p[k - 1],
                         Catch::Matchers::WithinAbs(expected, 1e-12));
        }
    }
    REQUIRE(unclamped == 100);
}

TEST_CASE("adaptive_taper domain errors") {
    const DecaySpectrum s{{0.0, 1.0}};
    CHECK_THROWS_AS(adaptive_taper(s, 1.0), std::domain_error);
    CHECK_THROWS_AS(adaptive_taper(s, 0.5), std::domain_error);
    CHECK_THROWS_AS(adaptive_taper(DecaySpectrum{{1.0, 0.5}}, 8.0),
                    std::invalid_argument);
}

TEST_CASE("sigmoid_lograte_proxy values and limits") {
    const auto proxy = sigmoid_lograte_proxy({0.0, -20.0, 0.5});
    CHECK_THAT(proxy[0], Catch::Matchers::WithinAbs(-0.6931471805599453, 1e-15));
    CHECK_THAT(proxy[1], Catch::Matchers::WithinAbs(-20.0, 1e-8));
    CHECK_THAT(proxy[2], Catch::Matchers::WithinAbs(-0.4740769841801067, 1e-15));
    // Strictly increasing in the logit.
    double prev = -1e300;
    for (double w : {-30.0, -5.0, -1.0, 0.0, 2.0, 10.0}) {
        const double v = sigmoid_lograte_proxy({w})[0];
        REQUIRE(v > prev);
        prev = v;
    }
}

TEST_CASE("equipartition_band values") {
    const EquipartitionBand zero = equipartition_band(5, 0.0);
    for (double d : zero.deviation) CHECK(d == 0.0);

    const EquipartitionBand third = equipartition_band(2, 1.0 / 3.0);
    CHECK_THAT(third.deviation[0], Catch::Matchers::WithinAbs(1.0, 1e-15));
    CHECK(third.deviation[1] == 0.0);

    CHECK(equipartition_band(7, 0.1).deviation.back() == 0.0);
    CHECK_THROWS_AS(equipartition_band(4, 1.0), std::domain_error);
    CHECK_THROWS_AS(equipartition_band(4, -0.1), std::domain_error);
}

TEST_CASE("effective_spectrum identity at t = 1 and timescale stretch") {
    const DecaySpectrum s = post_map(geometric_init(6, 256.0));
    const TaperVector taper = linear_taper(6);
    const DecaySpectrum same = effective_spectrum(s, taper, 1.0);
    CHECK(same.p == s.p);

    // Slowest channel: rate 1/T with alpha = 1 gives effective timescale t*T.
    const double T = 256.0;
    for (double t : {2.0, 16.0, 256.0}) {
        const DecaySpectrum eff = effective_spectrum(s, taper, t);
        REQUIRE_THAT(eff.timescale(0), Catch::Matchers::WithinRel(t * T, 1e-12));
    }
    CHECK_THROWS_AS(effective_spectrum(s, taper, 0.5), std::domain_error);
}

TEST_CASE("in-band spectra keep the adaptive taper within the deviation band") {
    CounterRng rng(31, 2);
    const std::size_t n = 8;
    const double t_ref = 1024.0;
    const double span = std::log(t_ref);
    const double gap = span / static_cast<double>(n - 1);
    const EquipartitionBand band = equipartition_band(n, 0.1);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> p(n);
        for (std::size_t k = 0; k < n; ++k) {
            double dev = 0.0;
            if (k > 0 && k + 1 < n) {
                // Inside the band and below half a gap, so ordering holds.
                const double room = std::min(band.deviation[k] * span, 0.45 * gap);
                dev = rng.uniform(-room, room);
            }
            p[k] = -span + static_cast<double>(k) * gap + dev;
        }
        const TaperVector taper = adaptive_taper(DecaySpectrum{p}, t_ref);
        const TaperVector linear = linear_taper(n);
        for (std::size_t k = 0; k < n; ++k) {
            REQUIRE(std::abs(taper.alpha[k] - linear.alpha[k]) <=
                    band.deviation[k] + 1e-12);
        }
    }
}
