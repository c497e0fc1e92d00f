#include "mfstream/mfdfa.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <thread>

#include "mfstream/errors.hpp"

namespace mfstream {

namespace {

constexpr double kZeroQTolerance = 1e-9;

void validate_base(const MfdfaConfig& config) {
    if (config.q_grid.empty()) {
        throw InputError("empty q grid");
    }
    for (std::size_t i = 0; i < config.q_grid.size(); ++i) {
        if (std::abs(config.q_grid[i]) < kZeroQTolerance) {
            throw InputError("q grid must exclude 0");
        }
        if (i > 0 && config.q_grid[i] <= config.q_grid[i - 1]) {
            throw InputError("q grid must be strictly increasing");
        }
    }
    if (config.detrend_order < 1 || config.detrend_order > 3) {
        throw InputError("detrend order must be 1, 2 or 3");
    }
    if (config.min_length < 2) {
        throw InputError("min_length must be at least 2");
    }
    if (config.max_zero_fraction < 0.0 || config.max_zero_fraction > 1.0) {
        throw InputError("max_zero_fraction must lie in [0, 1]");
    }
    if (config.threads < 1) {
        throw InputError("thread count must be positive");
    }
}

void validate_scales(const std::vector<int>& scales, std::size_t n, int detrend_order) {
    if (scales.size() < 4) {
        throw InputError("need at least 4 scales for the log-log regression");
    }
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (scales[i] < detrend_order + 2) {
            throw InputError("scale " + std::to_string(scales[i]) +
                             " too small for detrend order " + std::to_string(detrend_order));
        }
        if (i > 0 && scales[i] <= scales[i - 1]) {
            throw InputError("scales must be strictly increasing");
        }
    }
    if (static_cast<std::size_t>(scales.back()) * 2 > n) {
        throw InputError("largest scale " + std::to_string(scales.back()) +
                         " exceeds half the series length " + std::to_string(n));
    }
}

// Least-squares polynomial detrending with the abscissa mapped onto [-1, 1];
// the Gram matrix depends only on (scale, order), so it is factored once per
// scale and reused for every segment.
class SegmentDetrender {
public:
    SegmentDetrender(int scale, int order) : scale_(scale), order_(order) {
        abscissa_.resize(static_cast<std::size_t>(scale));
        const double half = (scale - 1) / 2.0;
        for (int i = 0; i < scale; ++i) {
            abscissa_[static_cast<std::size_t>(i)] = scale > 1 ? (i - half) / half : 0.0;
        }

        const int dim = order + 1;
        std::array<double, 7> power_sums{};  // sum of u^p for p = 0..2m
        for (double u : abscissa_) {
            double p = 1.0;
            for (int e = 0; e <= 2 * order; ++e) {
                power_sums[static_cast<std::size_t>(e)] += p;
                p *= u;
            }
        }
        std::array<std::array<double, 4>, 4> gram{};
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) {
                gram[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                    power_sums[static_cast<std::size_t>(r + c)];
            }
        }
        // Cholesky: gram = L L^T. SPD because the abscissa points are distinct
        // and dim <= scale.
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c <= r; ++c) {
                double sum = gram[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
                for (int k = 0; k < c; ++k) {
                    sum -= chol_[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] *
                           chol_[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
                }
                if (r == c) {
                    if (sum <= 0.0) {
                        throw NumericalError("singular detrending system at scale " +
                                             std::to_string(scale));
                    }
                    chol_[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)] =
                        std::sqrt(sum);
                } else {
                    chol_[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                        sum / chol_[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
                }
            }
        }
    }

    // Mean squared residual of the order-m fit over one segment.
    double mean_squared_residual(std::span<const double> segment) const {
        const int dim = order_ + 1;
        std::array<double, 4> rhs{};
        for (int i = 0; i < scale_; ++i) {
            const double u = abscissa_[static_cast<std::size_t>(i)];
            const double y = segment[static_cast<std::size_t>(i)];
            double p = 1.0;
            for (int j = 0; j < dim; ++j) {
                rhs[static_cast<std::size_t>(j)] += p * y;
                p *= u;
            }
        }
        // Forward then backward substitution.
        std::array<double, 4> coef{};
        for (int r = 0; r < dim; ++r) {
            double sum = rhs[static_cast<std::size_t>(r)];
            for (int k = 0; k < r; ++k) {
                sum -= chol_[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] *
                       coef[static_cast<std::size_t>(k)];
            }
            coef[static_cast<std::size_t>(r)] =
                sum / chol_[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
        }
        for (int r = dim - 1; r >= 0; --r) {
            double sum = coef[static_cast<std::size_t>(r)];
            for (int k = r + 1; k < dim; ++k) {
                sum -= chol_[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] *
                       coef[static_cast<std::size_t>(k)];
            }
            coef[static_cast<std::size_t>(r)] =
                sum / chol_[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
        }

        double sum_sq = 0.0;
        for (int i = 0; i < scale_; ++i) {
            const double u = abscissa_[static_cast<std::size_t>(i)];
            double fit = 0.0;
            double p = 1.0;
            for (int j = 0; j < dim; ++j) {
                fit += coef[static_cast<std::size_t>(j)] * p;
                p *= u;
            }
            const double r = segment[static_cast<std::size_t>(i)] - fit;
            sum_sq += r * r;
        }
        return sum_sq / static_cast<double>(scale_);
    }

private:
    int scale_;
    int order_;
    std::vector<double> abscissa_;
    std::array<std::array<double, 4>, 4> chol_{};
};

struct ScaleColumn {
    std::vector<double> fq;  // one value per q
    std::int64_t segment_count = 0;
    std::vector<int> zero_segments;  // 1-based segment indices with zero variance
};

ScaleColumn compute_scale_column(std::span<const double> profile, int scale,
                                 const MfdfaConfig& config) {
    const auto variances = segment_variances(profile, scale, config.detrend_order);

    ScaleColumn column;
    column.segment_count = static_cast<std::int64_t>(variances.size());

    std::vector<double> log_variances;
    log_variances.reserve(variances.size());
    for (std::size_t v = 0; v < variances.size(); ++v) {
        if (variances[v] == 0.0) {
            column.zero_segments.push_back(static_cast<int>(v + 1));
        } else {
            log_variances.push_back(std::log(variances[v]));
        }
    }

    column.fq.resize(config.q_grid.size());
    const double total = static_cast<double>(variances.size());
    for (std::size_t qi = 0; qi < config.q_grid.size(); ++qi) {
        const double q = config.q_grid[qi];
        if (q < 0.0 && !column.zero_segments.empty()) {
            char buf[128];
            std::snprintf(buf, sizeof(buf),
                          "degenerate segment: zero variance at scale %d, segment %d (q = %g)",
                          scale, column.zero_segments.front(), q);
            throw NumericalError(buf);
        }
        if (log_variances.empty()) {
            throw NumericalError("zero fluctuation at scale " + std::to_string(scale) +
                                 ": every segment is degenerate");
        }
        // F_q(s) = [ mean_v (F2)^(q/2) ]^(1/q), via log-sum-exp; zero-variance
        // segments contribute nothing to the sum but stay in the mean's count.
        const double half_q = q / 2.0;
        double peak = -std::numeric_limits<double>::infinity();
        for (double lv : log_variances) {
            peak = std::max(peak, half_q * lv);
        }
        double sum = 0.0;
        for (double lv : log_variances) {
            sum += std::exp(half_q * lv - peak);
        }
        column.fq[qi] = std::exp((peak + std::log(sum / total)) / q);
    }
    return column;
}

double slope_residual_rms(std::span<const double> x, std::span<const double> y, double& slope) {
    const std::size_t n = x.size();
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mean_x;
        sxx += dx * dx;
        sxy += dx * (y[i] - mean_y);
    }
    slope = sxy / sxx;
    const double intercept = mean_y - slope * mean_x;

    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (intercept + slope * x[i]);
        sum_sq += r * r;
    }
    return std::sqrt(sum_sq / static_cast<double>(n));
}

}  // namespace

std::vector<double> MfdfaConfig::default_q_grid() {
    std::vector<double> grid;
    grid.reserve(20);
    for (int i = 0; i <= 20; ++i) {
        if (i == 10) {
            continue;  // q = 0 excluded
        }
        grid.push_back(-5.0 + 0.5 * i);
    }
    return grid;
}

std::vector<int> default_scales(std::size_t n, int detrend_order) {
    const int lo = std::max(10, detrend_order + 2);
    const int hi = static_cast<int>(n / 4);
    if (hi < lo) {
        throw InputError("series of length " + std::to_string(n) +
                         " is too short for the default scale grid");
    }
    // Half-octave spacing anchored at powers of two (s = round(2^(j/2))),
    // deduplicated after rounding. Dyadic anchoring keeps segment tilings
    // commensurate across the grid; arbitrary-anchor roundings show an
    // alignment sawtooth in the log-log fit on dyadic test signals.
    std::vector<int> scales;
    for (int j = static_cast<int>(std::ceil(2.0 * std::log2(static_cast<double>(lo))));; ++j) {
        const int s = static_cast<int>(std::lround(std::pow(2.0, j / 2.0)));
        if (s < lo) {
            continue;
        }
        if (s > hi) {
            break;
        }
        if (scales.empty() || s > scales.back()) {
            scales.push_back(s);
        }
    }
    if (scales.size() < 4) {
        throw InputError("series of length " + std::to_string(n) +
                         " yields fewer than 4 distinct scales");
    }
    return scales;
}

MfdfaConfig resolve_config(const MfdfaConfig& config, std::size_t n) {
    validate_base(config);
    MfdfaConfig resolved = config;
    if (resolved.scales.empty()) {
        resolved.scales = default_scales(n, resolved.detrend_order);
    }
    validate_scales(resolved.scales, n, resolved.detrend_order);
    return resolved;
}

ValidityVerdict validity_check(std::span<const double> series, const MfdfaConfig& config) {
    if (series.size() < config.min_length) {
        return {false, "series too short: " + std::to_string(series.size()) + " < " +
                           std::to_string(config.min_length) + " days"};
    }
    std::size_t zeros = 0;
    for (double v : series) {
        if (v == 0.0) {
            ++zeros;
        }
    }
    const double zero_fraction = static_cast<double>(zeros) / static_cast<double>(series.size());
    if (zero_fraction > config.max_zero_fraction) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "too many zeros to estimate the spectrum: fraction %.3f > %.3f",
                      zero_fraction, config.max_zero_fraction);
        return {false, buf};
    }
    const bool constant = std::all_of(series.begin(), series.end(),
                                      [&](double v) { return v == series.front(); });
    if (constant) {
        return {false, "constant series"};
    }
    return {true, ""};
}

ValidityVerdict validity_check(const DailySeries& series, const MfdfaConfig& config) {
    return validity_check(std::span<const double>(series.values), config);
}

std::vector<double> profile(std::span<const double> series) {
    if (series.size() < 2) {
        throw InputError("series too short to aggregate: need at least 2 values");
    }
    double sum = 0.0;
    for (double v : series) {
        sum += v;
    }
    const double mean = sum / static_cast<double>(series.size());

    std::vector<double> result(series.size());
    double cumulative = 0.0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        cumulative += series[t] - mean;
        result[t] = cumulative;
    }
    return result;
}

std::vector<double> segment_variances(std::span<const double> profile, int scale,
                                      int detrend_order) {
    const std::size_t n = profile.size();
    if (scale < detrend_order + 2) {
        throw InputError("scale " + std::to_string(scale) + " too small for detrend order " +
                         std::to_string(detrend_order));
    }
    if (static_cast<std::size_t>(scale) > n) {
        throw InputError("scale " + std::to_string(scale) + " exceeds profile length " +
                         std::to_string(n));
    }

    const std::size_t s = static_cast<std::size_t>(scale);
    const std::size_t n_segments = n / s;
    const SegmentDetrender detrender(scale, detrend_order);

    std::vector<double> variances(2 * n_segments);
    for (std::size_t v = 0; v < n_segments; ++v) {
        variances[v] = detrender.mean_squared_residual(profile.subspan(v * s, s));
    }
    // Backward pass: the same tiling anchored at the end of the domain.
    for (std::size_t j = 1; j <= n_segments; ++j) {
        variances[n_segments + j - 1] =
            detrender.mean_squared_residual(profile.subspan(n - j * s, s));
    }
    return variances;
}

FluctuationSurface fluctuation_function(std::span<const double> profile,
                                        const MfdfaConfig& config) {
    const MfdfaConfig resolved = resolve_config(config, profile.size());
    const std::size_t n_scales = resolved.scales.size();

    std::vector<ScaleColumn> columns(n_scales);
    std::vector<std::exception_ptr> errors(n_scales);

    const unsigned n_threads =
        std::min<unsigned>(static_cast<unsigned>(resolved.threads), n_scales);
    auto worker = [&](unsigned tid) {
        for (std::size_t si = tid; si < n_scales; si += n_threads) {
            try {
                columns[si] = compute_scale_column(profile, resolved.scales[si], resolved);
            } catch (...) {
                errors[si] = std::current_exception();
            }
        }
    };
    if (n_threads <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned tid = 0; tid < n_threads; ++tid) {
            pool.emplace_back(worker, tid);
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }
    // Deterministic error selection: the smallest failing scale wins, whatever
    // the thread count was.
    for (std::size_t si = 0; si < n_scales; ++si) {
        if (errors[si]) {
            std::rethrow_exception(errors[si]);
        }
    }

    FluctuationSurface surface;
    surface.q_grid = resolved.q_grid;
    surface.scales = resolved.scales;
    surface.fq.assign(resolved.q_grid.size(), std::vector<double>(n_scales));
    surface.segment_counts.resize(n_scales);
    for (std::size_t si = 0; si < n_scales; ++si) {
        surface.segment_counts[si] = columns[si].segment_count;
        for (std::size_t qi = 0; qi < resolved.q_grid.size(); ++qi) {
            surface.fq[qi][si] = columns[si].fq[qi];
        }
        for (int v : columns[si].zero_segments) {
            surface.zero_variance_segments.emplace_back(resolved.scales[si], v);
        }
    }
    return surface;
}

std::vector<HurstFit> generalized_hurst(const FluctuationSurface& surface) {
    if (surface.scales.size() < 4) {
        throw InputError("need at least 4 scales to fit the generalized Hurst exponent");
    }
    std::vector<double> log_scales(surface.scales.size());
    for (std::size_t si = 0; si < surface.scales.size(); ++si) {
        log_scales[si] = std::log(static_cast<double>(surface.scales[si]));
    }

    std::vector<HurstFit> fits(surface.q_grid.size());
    std::vector<double> log_f(surface.scales.size());
    for (std::size_t qi = 0; qi < surface.q_grid.size(); ++qi) {
        for (std::size_t si = 0; si < surface.scales.size(); ++si) {
            const double f = surface.fq[qi][si];
            if (!std::isfinite(f) || f <= 0.0) {
                throw InputError("non-finite fluctuation value at q index " + std::to_string(qi));
            }
            log_f[si] = std::log(f);
        }
        fits[qi].residual_rms = slope_residual_rms(log_scales, log_f, fits[qi].h);
    }
    return fits;
}

std::vector<double> scaling_function(std::span<const double> q_grid,
                                     std::span<const HurstFit> hurst) {
    if (q_grid.size() != hurst.size()) {
        throw InputError("q grid and Hurst exponents differ in length");
    }
    std::vector<double> tau(q_grid.size());
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
        tau[i] = q_grid[i] * hurst[i].h - 1.0;
    }
    return tau;
}

std::vector<LegendrePoint> legendre_spectrum(std::span<const double> q_grid,
                                             std::span<const double> tau) {
    const std::size_t n = q_grid.size();
    if (n != tau.size()) {
        throw InputError("q grid and tau differ in length");
    }
    if (n < 3) {
        throw InputError("need at least 3 q points for the Legendre transform");
    }

    std::vector<LegendrePoint> points(n);
    for (std::size_t k = 0; k < n; ++k) {
        double alpha;
        if (k == 0) {
            alpha = (tau[1] - tau[0]) / (q_grid[1] - q_grid[0]);
        } else if (k == n - 1) {
            alpha = (tau[n - 1] - tau[n - 2]) / (q_grid[n - 1] - q_grid[n - 2]);
        } else {
            // Three-point derivative on a possibly non-uniform grid; exact for
            // quadratics and reduces to the central difference on uniform grids.
            const double h1 = q_grid[k] - q_grid[k - 1];
            const double h2 = q_grid[k + 1] - q_grid[k];
            alpha = (h1 * h1 * tau[k + 1] + (h2 * h2 - h1 * h1) * tau[k] - h2 * h2 * tau[k - 1]) /
                    (h1 * h2 * (h1 + h2));
        }
        points[k].alpha = alpha;
        points[k].f = q_grid[k] * alpha - tau[k];
    }
    return points;
}

double MultifractalSpectrum::width() const {
    const auto [lo, hi] = std::minmax_element(alpha.begin(), alpha.end());
    return *hi - *lo;
}

SpectrumResult spectrum(std::span<const double> series, const MfdfaConfig& config) {
    validate_base(config);

    SpectrumResult result;
    result.verdict = validity_check(series, config);
    if (!result.verdict.ok) {
        return result;
    }

    const MfdfaConfig resolved = resolve_config(config, series.size());
    const auto prof = profile(series);
    const auto surface = fluctuation_function(prof, resolved);
    const auto fits = generalized_hurst(surface);
    const auto tau = scaling_function(resolved.q_grid, fits);
    const auto legendre = legendre_spectrum(resolved.q_grid, tau);

    MultifractalSpectrum spec;
    spec.q = resolved.q_grid;
    spec.tau = tau;
    spec.h.resize(fits.size());
    spec.fit_residual.resize(fits.size());
    spec.alpha.resize(legendre.size());
    spec.f.resize(legendre.size());
    for (std::size_t i = 0; i < fits.size(); ++i) {
        spec.h[i] = fits[i].h;
        spec.fit_residual[i] = fits[i].residual_rms;
        spec.alpha[i] = legendre[i].alpha;
        spec.f[i] = legendre[i].f;
    }

    result.spectrum = std::move(spec);
    result.scales_used = surface.scales;
    result.degenerate_segments = surface.zero_variance_segments.size();
    return result;
}

SpectrumResult spectrum(const DailySeries& series, const MfdfaConfig& config) {
    return spectrum(std::span<const double>(series.values), config);
}

}  // namespace mfstream
