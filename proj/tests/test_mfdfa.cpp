#include <doctest.h>

#include <cmath>
#include <cstring>

#include <mfstream/errors.hpp>
#include <mfstream/mfdfa.hpp>
#include <mfstream/synth.hpp>

#include "helpers.hpp"

using namespace mfstream;

namespace {

// Alternating +-1 prefix (profile oscillates, mean exactly zero) followed by
// an all-zero half whose profile is exactly constant: segments inside it have
// exactly zero detrending variance.
std::vector<double> zero_run_series(std::size_t n) {
    std::vector<double> series(n, 0.0);
    for (std::size_t i = 0; i < n / 2; ++i) {
        series[i] = (i % 2 == 0) ? 1.0 : -1.0;
    }
    return series;
}

}  // namespace

TEST_CASE("default q grid excludes zero and spans [-5, 5]") {
    const auto grid = MfdfaConfig::default_q_grid();
    CHECK(grid.size() == 20);
    CHECK(grid.front() == -5.0);
    CHECK(grid.back() == 5.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(grid[i] != 0.0);
        if (i > 0) {
            CHECK(grid[i] > grid[i - 1]);
        }
    }
    CHECK(std::count(grid.begin(), grid.end(), 2.0) == 1);
}

TEST_CASE("default scales are log-spaced within [max(10, m+2), n/4]") {
    const auto scales = default_scales(1 << 14, 1);
    CHECK(scales.size() >= 4);
    CHECK(scales.front() >= 10);
    CHECK(scales.back() <= (1 << 14) / 4);
    for (std::size_t i = 1; i < scales.size(); ++i) {
        CHECK(scales[i] > scales[i - 1]);
    }
    SUBCASE("minimum viable length still yields four scales") {
        const auto small = default_scales(128, 1);
        CHECK(small.size() >= 4);
        CHECK(small.back() <= 32);
    }
    SUBCASE("too-short series is an input error") {
        CHECK_THROWS_AS(default_scales(30, 1), InputError);
    }
}

TEST_CASE("config validation") {
    MfdfaConfig config;
    SUBCASE("zero in the q grid is rejected") {
        config.q_grid = {-1.0, 0.0, 1.0};
        CHECK_THROWS_WITH_AS(resolve_config(config, 1024), doctest::Contains("exclude 0"),
                             InputError);
    }
    SUBCASE("non-increasing q grid is rejected") {
        config.q_grid = {1.0, 1.0, 2.0};
        CHECK_THROWS_AS(resolve_config(config, 1024), InputError);
    }
    SUBCASE("detrend order bounds") {
        config.detrend_order = 0;
        CHECK_THROWS_AS(resolve_config(config, 1024), InputError);
        config.detrend_order = 4;
        CHECK_THROWS_AS(resolve_config(config, 1024), InputError);
    }
    SUBCASE("scales above n/2 are rejected") {
        config.scales = {10, 20, 40, 600};
        CHECK_THROWS_AS(resolve_config(config, 1024), InputError);
    }
    SUBCASE("fewer than 4 scales is rejected") {
        config.scales = {10, 20, 40};
        CHECK_THROWS_AS(resolve_config(config, 1024), InputError);
    }
    SUBCASE("scale below m+2 is rejected") {
        config.detrend_order = 3;
        config.scales = {4, 8, 16, 32};
        CHECK_THROWS_AS(resolve_config(config, 1024), InputError);
    }
}

TEST_CASE("validity_check applies the length, zero-fraction and constant rules") {
    const MfdfaConfig config;
    SUBCASE("all-zero series reports the zero fraction") {
        const std::vector<double> zeros(200, 0.0);
        const auto verdict = validity_check(zeros, config);
        CHECK(!verdict.ok);
        CHECK(verdict.reason.find("zeros") != std::string::npos);
    }
    SUBCASE("length 64 is below the default minimum of 128") {
        const auto wn = white_noise(64, 1);
        const auto verdict = validity_check(wn, config);
        CHECK(!verdict.ok);
        CHECK(verdict.reason.find("short") != std::string::npos);
    }
    SUBCASE("constant series is rejected") {
        const std::vector<double> flat(256, 3.25);
        const auto verdict = validity_check(flat, config);
        CHECK(!verdict.ok);
        CHECK(verdict.reason.find("constant") != std::string::npos);
    }
    SUBCASE("a long positive cascade passes") {
        CHECK(validity_check(binomial_cascade({0.75, 14}), config).ok);
    }
    SUBCASE("exactly half zeros still passes the default threshold") {
        CHECK(validity_check(zero_run_series(256), config).ok);
    }
}

TEST_CASE("profile accumulates mean deviations") {
    const std::vector<double> series{1.0, 2.0, 3.0};
    CHECK(profile(series) == std::vector<double>{-1.0, -1.0, 0.0});

    SUBCASE("constant series gives an all-zero profile") {
        const std::vector<double> flat(16, 4.5);
        for (double y : profile(flat)) {
            CHECK(y == 0.0);
        }
    }
    SUBCASE("terminal value is zero to 1e-9 relative tolerance") {
        const auto wn = white_noise(4096, 8);
        const auto prof = profile(wn);
        double peak = 1.0;
        for (double y : prof) {
            peak = std::max(peak, std::abs(y));
        }
        CHECK(std::abs(prof.back()) <= 1e-9 * peak);
    }
    SUBCASE("too-short input") {
        CHECK_THROWS_AS(profile(std::vector<double>{1.0}), InputError);
    }
}

TEST_CASE("segment_variances tiles forward then backward") {
    // n = 10, s = 4: forward segments {0..3}, {4..7}; backward {6..9}, {2..5}.
    std::vector<double> prof(10);
    for (std::size_t i = 0; i < prof.size(); ++i) {
        prof[i] = static_cast<double>(i * i) * 0.37 + ((i % 3 == 0) ? 1.5 : -0.25);
    }
    const auto variances = segment_variances(prof, 4, 1);
    REQUIRE(variances.size() == 4);
    const std::span<const double> view(prof);
    CHECK(variances[0] ==
          doctest::Approx(testutil::lsq_msr_oracle(view.subspan(0, 4), 1)).epsilon(1e-12));
    CHECK(variances[1] ==
          doctest::Approx(testutil::lsq_msr_oracle(view.subspan(4, 4), 1)).epsilon(1e-12));
    CHECK(variances[2] ==
          doctest::Approx(testutil::lsq_msr_oracle(view.subspan(6, 4), 1)).epsilon(1e-12));
    CHECK(variances[3] ==
          doctest::Approx(testutil::lsq_msr_oracle(view.subspan(2, 4), 1)).epsilon(1e-12));

    SUBCASE("a linear profile detrends to zero with m = 1") {
        std::vector<double> line(64);
        for (std::size_t i = 0; i < line.size(); ++i) {
            line[i] = 3.0 * static_cast<double>(i) - 17.0;
        }
        for (double v : segment_variances(line, 8, 1)) {
            CHECK(v <= 1e-20);
        }
    }
    SUBCASE("parabolic profile against the least-squares oracle") {
        std::vector<double> parabola(64);
        for (std::size_t i = 0; i < parabola.size(); ++i) {
            const double t = static_cast<double>(i + 1);
            parabola[i] = t * t;
        }
        const auto got = segment_variances(parabola, 8, 1);
        REQUIRE(got.size() == 16);
        const std::span<const double> pview(parabola);
        for (std::size_t v = 0; v < 8; ++v) {
            CHECK(got[v] ==
                  doctest::Approx(testutil::lsq_msr_oracle(pview.subspan(v * 8, 8), 1))
                      .epsilon(1e-10));
        }
        // all 8-point windows of a fixed parabola share the same curvature,
        // hence the same linear-fit residual
        for (std::size_t v = 1; v < got.size(); ++v) {
            CHECK(got[v] == doctest::Approx(got[0]).epsilon(1e-9));
        }
    }
    SUBCASE("every detrend order agrees with the oracle on random data") {
        const auto noise = white_noise(37, 4);
        for (int m = 1; m <= 3; ++m) {
            const auto got = segment_variances(noise, 37, m);
            REQUIRE(got.size() == 2);
            CHECK(got[0] ==
                  doctest::Approx(testutil::lsq_msr_oracle(noise, m)).epsilon(1e-10));
        }
    }
    SUBCASE("scale bounds") {
        CHECK_THROWS_AS(segment_variances(prof, 2, 1), InputError);   // < m+2
        CHECK_THROWS_AS(segment_variances(prof, 11, 1), InputError);  // > n
    }
    SUBCASE("segment bookkeeping: 2*floor(n/s) segments") {
        const auto wn = white_noise(1000, 2);
        const auto prof2 = profile(wn);
        CHECK(segment_variances(prof2, 64, 1).size() == 2 * (1000 / 64));
        CHECK(segment_variances(prof2, 500, 1).size() == 4);
    }
}

TEST_CASE("fluctuation_function") {
    const auto cascade = binomial_cascade({0.75, 12});
    const auto prof = profile(cascade);
    MfdfaConfig config;
    const auto resolved = resolve_config(config, cascade.size());
    const auto surface = fluctuation_function(prof, resolved);

    SUBCASE("q = 2 reduces to the plain RMS of segment variances") {
        const std::size_t qi =
            std::find(surface.q_grid.begin(), surface.q_grid.end(), 2.0) - surface.q_grid.begin();
        for (std::size_t si = 0; si < surface.scales.size(); ++si) {
            const auto variances = segment_variances(prof, surface.scales[si], 1);
            double mean = 0.0;
            for (double v : variances) {
                mean += v;
            }
            mean /= static_cast<double>(variances.size());
            CHECK(surface.fq[qi][si] == doctest::Approx(std::sqrt(mean)).epsilon(1e-12));
        }
    }
    SUBCASE("power-mean monotonicity: F_q nondecreasing in q") {
        for (std::size_t si = 0; si < surface.scales.size(); ++si) {
            for (std::size_t qi = 1; qi < surface.q_grid.size(); ++qi) {
                CHECK(surface.fq[qi][si] >=
                      surface.fq[qi - 1][si] * (1.0 - 1e-12));
            }
        }
    }
    SUBCASE("F_-2 never exceeds F_2") {
        const std::size_t lo =
            std::find(surface.q_grid.begin(), surface.q_grid.end(), -2.0) - surface.q_grid.begin();
        const std::size_t hi =
            std::find(surface.q_grid.begin(), surface.q_grid.end(), 2.0) - surface.q_grid.begin();
        for (std::size_t si = 0; si < surface.scales.size(); ++si) {
            CHECK(surface.fq[lo][si] <= surface.fq[hi][si]);
        }
    }
    SUBCASE("segment counts are recorded per scale") {
        REQUIRE(surface.segment_counts.size() == surface.scales.size());
        for (std::size_t si = 0; si < surface.scales.size(); ++si) {
            CHECK(surface.segment_counts[si] ==
                  2 * (static_cast<std::int64_t>(cascade.size()) / surface.scales[si]));
        }
    }
    SUBCASE("degenerate zero-variance segment is a hard error for negative q") {
        const auto series = zero_run_series(256);
        const auto zprof = profile(series);
        MfdfaConfig zconfig;  // default grid contains negative q
        CHECK_THROWS_WITH_AS(fluctuation_function(zprof, resolve_config(zconfig, series.size())),
                             doctest::Contains("zero variance at scale"), NumericalError);
    }
    SUBCASE("zero-variance segments contribute nothing for positive q and are reported") {
        const auto series = zero_run_series(256);
        const auto zprof = profile(series);
        MfdfaConfig zconfig;
        zconfig.q_grid = {0.5, 1.0, 2.0, 3.0};
        const auto zsurface = fluctuation_function(zprof, resolve_config(zconfig, series.size()));
        CHECK(!zsurface.zero_variance_segments.empty());
        for (const auto& row : zsurface.fq) {
            for (double f : row) {
                CHECK(std::isfinite(f));
                CHECK(f > 0.0);
            }
        }
    }
    SUBCASE("degenerate-segment errors are identical across thread counts") {
        const auto series = zero_run_series(256);
        const auto zprof = profile(series);
        std::string message_single, message_threaded;
        MfdfaConfig zconfig;
        try {
            fluctuation_function(zprof, resolve_config(zconfig, series.size()));
        } catch (const NumericalError& e) {
            message_single = e.what();
        }
        zconfig.threads = 4;
        try {
            fluctuation_function(zprof, resolve_config(zconfig, series.size()));
        } catch (const NumericalError& e) {
            message_threaded = e.what();
        }
        CHECK(!message_single.empty());
        CHECK(message_single == message_threaded);
    }
    SUBCASE("thread counts do not change a single bit") {
        MfdfaConfig threaded = config;
        threaded.threads = 4;
        const auto surface4 = fluctuation_function(prof, resolve_config(threaded, cascade.size()));
        REQUIRE(surface4.fq.size() == surface.fq.size());
        for (std::size_t qi = 0; qi < surface.fq.size(); ++qi) {
            CHECK(std::memcmp(surface4.fq[qi].data(), surface.fq[qi].data(),
                              surface.fq[qi].size() * sizeof(double)) == 0);
        }
    }
}

TEST_CASE("generalized_hurst recovers exact power laws") {
    FluctuationSurface surface;
    surface.q_grid = {-2.0, 1.0, 2.0};
    surface.scales = {8, 16, 32, 64, 128};
    surface.segment_counts = {100, 50, 25, 12, 6};
    surface.fq.resize(3);
    for (auto& row : surface.fq) {
        for (int s : surface.scales) {
            row.push_back(3.0 * std::sqrt(static_cast<double>(s)));
        }
    }
    const auto fits = generalized_hurst(surface);
    for (const auto& fit : fits) {
        CHECK(fit.h == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(fit.residual_rms <= 1e-12);
    }
    SUBCASE("too few scales") {
        surface.scales = {8, 16, 32};
        for (auto& row : surface.fq) {
            row.resize(3);
        }
        CHECK_THROWS_AS(generalized_hurst(surface), InputError);
    }
    SUBCASE("non-finite values are rejected") {
        surface.fq[1][2] = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(generalized_hurst(surface), InputError);
    }
}

TEST_CASE("scaling_function is q*h - 1") {
    const std::vector<double> q{-2.0, 2.0, 4.0};
    const std::vector<HurstFit> fits{{0.9, 0.0}, {0.5, 0.0}, {0.25, 0.0}};
    const auto tau = scaling_function(q, fits);
    CHECK(tau[0] == doctest::Approx(-2.8));
    CHECK(tau[1] == 0.0);  // h(2) = 0.5 -> tau(2) = 0 exactly
    CHECK(tau[2] == 0.0);

    SUBCASE("constant h gives an affine tau") {
        const std::vector<double> grid = MfdfaConfig::default_q_grid();
        std::vector<HurstFit> constant(grid.size(), {0.7, 0.0});
        const auto t = scaling_function(grid, constant);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(t[i] == doctest::Approx(0.7 * grid[i] - 1.0).epsilon(1e-15));
        }
    }
    SUBCASE("analytic cascade value at q = 2") {
        const double h2 = analytic_hurst_binomial(2.0, 0.75);
        CHECK(h2 == doctest::Approx(0.839).epsilon(1e-3));
        const auto t = scaling_function(std::vector<double>{2.0},
                                        std::vector<HurstFit>{{h2, 0.0}});
        CHECK(t[0] == doctest::Approx(0.678).epsilon(1e-3));
    }
}

TEST_CASE("legendre_spectrum differentiates tau on the grid") {
    SUBCASE("monofractal affine tau gives alpha = H and f = 1 everywhere") {
        const auto grid = MfdfaConfig::default_q_grid();
        std::vector<double> tau(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            tau[i] = 0.62 * grid[i] - 1.0;
        }
        for (const auto& point : legendre_spectrum(grid, tau)) {
            CHECK(point.alpha == doctest::Approx(0.62).epsilon(1e-12));
            CHECK(point.f == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("quadratic tau is differentiated exactly, even across the q = 0 gap") {
        const auto grid = MfdfaConfig::default_q_grid();
        std::vector<double> tau(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            tau[i] = grid[i] * grid[i] / 2.0;
        }
        const auto points = legendre_spectrum(grid, tau);
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            CHECK(points[i].alpha == doctest::Approx(grid[i]).epsilon(1e-12));
            CHECK(points[i].f == doctest::Approx(grid[i] * grid[i] / 2.0).epsilon(1e-11));
        }
    }
    SUBCASE("analytic tau is concave to 1e-6 in the divided second differences") {
        const auto grid = MfdfaConfig::default_q_grid();
        std::vector<double> tau(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            tau[i] = testutil::analytic_tau_binomial(grid[i], 0.75);
        }
        for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
            const double left = (tau[k] - tau[k - 1]) / (grid[k] - grid[k - 1]);
            const double right = (tau[k + 1] - tau[k]) / (grid[k + 1] - grid[k]);
            CHECK(right - left <= 1e-6);
        }
    }
    SUBCASE("analytic cascade tau yields the expected width") {
        const auto grid = MfdfaConfig::default_q_grid();
        std::vector<double> tau(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            tau[i] = testutil::analytic_tau_binomial(grid[i], 0.75);
        }
        const auto points = legendre_spectrum(grid, tau);
        double lo = points[0].alpha, hi = points[0].alpha;
        for (const auto& point : points) {
            lo = std::min(lo, point.alpha);
            hi = std::max(hi, point.alpha);
        }
        CHECK(hi - lo == doctest::Approx(1.5).epsilon(0.2 / 1.5));
        // interior alphas track the exact derivative
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            CHECK(points[i].alpha ==
                  doctest::Approx(testutil::analytic_alpha_binomial(grid[i], 0.75)).epsilon(0.02));
        }
    }
    SUBCASE("needs at least 3 points") {
        CHECK_THROWS_AS(
            legendre_spectrum(std::vector<double>{1.0, 2.0}, std::vector<double>{0.0, 1.0}),
            InputError);
    }
}

TEST_CASE("spectrum composes the full pipeline") {
    const MfdfaConfig config;

    SUBCASE("binomial cascade has a wide spectrum") {
        const auto result = spectrum(binomial_cascade({0.75, 14}), config);
        REQUIRE(result.ok());
        CHECK(result.spectrum->width() > 1.0);
        CHECK(result.spectrum->q == config.q_grid);
        // tau(q) = q h(q) - 1 holds exactly by construction
        for (std::size_t i = 0; i < result.spectrum->q.size(); ++i) {
            CHECK(result.spectrum->tau[i] ==
                  result.spectrum->q[i] * result.spectrum->h[i] - 1.0);
        }
    }
    SUBCASE("white noise has a narrow spectrum") {
        const auto result = spectrum(white_noise(1 << 14, 42), config);
        REQUIRE(result.ok());
        CHECK(result.spectrum->width() <= 0.4);
    }
    SUBCASE("constant series yields an insufficient-data verdict, not an error") {
        const auto result = spectrum(std::vector<double>(256, 1.0), config);
        CHECK(!result.ok());
        CHECK(!result.spectrum.has_value());
        CHECK(result.verdict.reason.find("constant") != std::string::npos);
    }
    SUBCASE("h(q) is nonincreasing on cascade input (tolerance 0.02)") {
        const auto result = spectrum(binomial_cascade({0.75, 14}), config);
        for (std::size_t i = 1; i < result.spectrum->h.size(); ++i) {
            CHECK(result.spectrum->h[i] <= result.spectrum->h[i - 1] + 0.02);
        }
    }
    SUBCASE("estimated tau is concave up to 0.05 in the slope differences") {
        const auto result = spectrum(binomial_cascade({0.75, 14}), config);
        const auto& sp = *result.spectrum;
        for (std::size_t k = 1; k + 1 < sp.q.size(); ++k) {
            const double left = (sp.tau[k] - sp.tau[k - 1]) / (sp.q[k] - sp.q[k - 1]);
            const double right = (sp.tau[k + 1] - sp.tau[k]) / (sp.q[k + 1] - sp.q[k]);
            CHECK(right - left <= 0.05);
        }
    }
    SUBCASE("f stays below the soft cap of 1.1") {
        for (const auto& series :
             {binomial_cascade({0.75, 14}), white_noise(1 << 13, 5), random_walk(1 << 13, 6)}) {
            const auto result = spectrum(series, config);
            REQUIRE(result.ok());
            for (double f : result.spectrum->f) {
                CHECK(f <= 1.1);
            }
        }
    }
}

TEST_CASE("spectrum invariances") {
    const MfdfaConfig config;
    for (std::uint64_t seed = 100; seed < 105; ++seed) {
        const auto base = white_noise(2048, seed);
        const auto reference = spectrum(base, config);
        REQUIRE(reference.ok());

        auto scaled = base;
        for (double& v : scaled) {
            v *= 3.5;
        }
        auto shifted = base;
        for (double& v : shifted) {
            v += 2.0;
        }
        const auto scaled_result = spectrum(scaled, config);
        const auto shifted_result = spectrum(shifted, config);
        for (std::size_t i = 0; i < reference.spectrum->h.size(); ++i) {
            CHECK(std::abs(scaled_result.spectrum->h[i] - reference.spectrum->h[i]) <= 1e-9);
            CHECK(std::abs(shifted_result.spectrum->h[i] - reference.spectrum->h[i]) <= 1e-9);
        }
    }
}

TEST_CASE("spectrum estimates are bit-deterministic") {
    const auto cascade = binomial_cascade({0.75, 12});
    MfdfaConfig config;
    const auto first = spectrum(cascade, config);
    const auto second = spectrum(cascade, config);
    CHECK(*first.spectrum == *second.spectrum);

    config.threads = 8;
    const auto threaded = spectrum(cascade, config);
    CHECK(*threaded.spectrum == *first.spectrum);
}

TEST_CASE("cascade estimates track the analytic exponents") {
    const auto cascade = binomial_cascade({0.75, 14});
    const MfdfaConfig config;
    const auto result = spectrum(cascade, config);
    REQUIRE(result.ok());
    const auto& sp = *result.spectrum;
    for (std::size_t i = 0; i < sp.q.size(); ++i) {
        const double expected = analytic_hurst_binomial(sp.q[i], 0.75);
        const double tolerance = std::abs(sp.q[i]) >= 1.0 ? 0.05 : 0.08;
        CHECK(std::abs(sp.h[i] - expected) <= tolerance);
    }

    SUBCASE("log-log fits are tight on a dyadic scale grid") {
        MfdfaConfig dyadic;
        dyadic.scales = {16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
        const auto aligned = spectrum(cascade, dyadic);
        REQUIRE(aligned.ok());
        for (double residual : aligned.spectrum->fit_residual) {
            CHECK(residual < 0.05);
        }
    }
    SUBCASE("white noise h(2) sits near one half") {
        const auto noise = spectrum(white_noise(1 << 14, 42), config);
        const std::size_t qi =
            std::find(noise.spectrum->q.begin(), noise.spectrum->q.end(), 2.0) -
            noise.spectrum->q.begin();
        CHECK(noise.spectrum->h[qi] >= 0.40);
        CHECK(noise.spectrum->h[qi] <= 0.60);
    }
}
