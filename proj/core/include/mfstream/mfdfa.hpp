#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mfstream/series.hpp"

namespace mfstream {

/// Parameters of the multifractal detrended fluctuation analysis.
struct MfdfaConfig {
    /// Moment orders, strictly increasing, zero excluded.
    std::vector<double> q_grid = default_q_grid();

    /// Segment lengths, strictly increasing. Empty means: derive
    /// default_scales() from the series length at run time.
    std::vector<int> scales;

    /// Order of the per-segment least-squares detrending polynomial (1..3).
    int detrend_order = 1;

    /// Validity thresholds for daily series ("too short" / "too many zeros").
    std::size_t min_length = 128;
    double max_zero_fraction = 0.5;

    /// Worker threads for the per-scale loop. Scale columns are computed
    /// independently, so any thread count produces bit-identical results.
    int threads = 1;

    /// -5 to 5 in steps of 0.5 with 0 removed (20 values).
    static std::vector<double> default_q_grid();
};

/// ~20 log-spaced integer scales in [max(10, m+2), n/4], deduplicated.
/// Capping at n/4 keeps at least 8 segments per scale.
std::vector<int> default_scales(std::size_t n, int detrend_order);

/// Resolves config against a concrete series length: fills in default scales
/// and validates grids. Throws InputError on malformed configuration.
MfdfaConfig resolve_config(const MfdfaConfig& config, std::size_t n);

struct ValidityVerdict {
    bool ok = false;
    std::string reason;  // empty when ok
};

/// ok iff length >= min_length, zero fraction <= max_zero_fraction and the
/// series is non-constant. A verdict, not an error: failing series are an
/// expected analysis outcome.
ValidityVerdict validity_check(std::span<const double> series, const MfdfaConfig& config);
ValidityVerdict validity_check(const DailySeries& series, const MfdfaConfig& config);

/// Cumulative mean-deviation sums: y_t = sum_{k<=t} (x_k - mean(x)).
/// The final value is zero up to rounding. Requires length >= 2.
std::vector<double> profile(std::span<const double> series);

/// Mean squared detrending residuals per segment at one scale. The domain is
/// split into floor(n/s) segments from the start and the same number from the
/// end (2*floor(n/s) total, covering the tail that the forward pass misses
/// when s does not divide n). Each segment gets an order-m least-squares
/// polynomial fit; F2[v] is the mean squared residual of segment v.
/// Requires s >= m+2 and n >= s.
std::vector<double> segment_variances(std::span<const double> profile, int scale,
                                      int detrend_order);

/// The fluctuation function over the (q, scale) grid plus bookkeeping.
struct FluctuationSurface {
    std::vector<double> q_grid;
    std::vector<int> scales;
    /// fq[qi][si]; finite and > 0. For fixed s, nondecreasing in q.
    std::vector<std::vector<double>> fq;
    /// Per scale: 2*floor(n/s).
    std::vector<std::int64_t> segment_counts;
    /// Segments with exactly zero variance, as (scale, 1-based segment index).
    /// They contribute zero for q > 0 and are a hard error for q < 0.
    std::vector<std::pair<int, int>> zero_variance_segments;
};

/// F_q(s) = [ mean_v (F2(s,v))^(q/2) ]^(1/q), evaluated in log space so large
/// |q| cannot overflow. Summation order is fixed (ascending segment index),
/// so results do not depend on the thread count. Throws NumericalError when a
/// zero-variance segment meets q < 0, or when all segments of a scale are
/// degenerate.
FluctuationSurface fluctuation_function(std::span<const double> profile,
                                        const MfdfaConfig& config);

struct HurstFit {
    double h = 0.0;             // slope of ln F_q(s) on ln s
    double residual_rms = 0.0;  // RMS of the log-log regression residuals
};

/// Least-squares slope per q over all scales. Requires >= 4 scales and finite
/// fluctuation values.
std::vector<HurstFit> generalized_hurst(const FluctuationSurface& surface);

/// tau(q) = q*h(q) - 1.
std::vector<double> scaling_function(std::span<const double> q_grid,
                                     std::span<const HurstFit> hurst);

struct LegendrePoint {
    double alpha = 0.0;
    double f = 0.0;
};

/// alpha = tau'(q) by three-point finite differences on the (possibly
/// non-uniform) q grid, one-sided at the endpoints; f = q*alpha - tau.
/// Requires >= 3 grid points.
std::vector<LegendrePoint> legendre_spectrum(std::span<const double> q_grid,
                                             std::span<const double> tau);

/// Parametric singularity spectrum: per grid point q, the generalized Hurst
/// exponent h, scaling function tau, Legendre pair (alpha, f) and the log-log
/// fit residual.
struct MultifractalSpectrum {
    std::vector<double> q;
    std::vector<double> h;
    std::vector<double> tau;
    std::vector<double> alpha;
    std::vector<double> f;
    std::vector<double> fit_residual;

    double width() const;  // max alpha - min alpha

    friend bool operator==(const MultifractalSpectrum&, const MultifractalSpectrum&) = default;
};

/// Outcome of the full pipeline: either a spectrum or an insufficient-data
/// verdict (e.g. a subtopic series that is too zero-heavy to estimate).
struct SpectrumResult {
    std::optional<MultifractalSpectrum> spectrum;
    ValidityVerdict verdict;
    std::vector<int> scales_used;
    std::size_t degenerate_segments = 0;

    bool ok() const { return verdict.ok; }
};

/// profile -> fluctuation_function -> generalized_hurst -> scaling_function
/// -> legendre_spectrum. Identical input and config give bit-identical
/// spectra regardless of thread count.
SpectrumResult spectrum(std::span<const double> series, const MfdfaConfig& config);
SpectrumResult spectrum(const DailySeries& series, const MfdfaConfig& config);

}  // namespace mfstream
