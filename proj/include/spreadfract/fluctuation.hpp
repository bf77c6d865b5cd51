#ifndef SPREADFRACT_FLUCTUATION_HPP
#define SPREADFRACT_FLUCTUATION_HPP

// Detrended fluctuation analysis, single and multifractal.
//
// The series is integrated into a profile B, cut into non-overlapping windows
// of size t, and each window is detrended by a least-squares polynomial. The
// per-window mean squared residuals f_k(t)^2 are computed once per t and then
// reduced for every moment order q:
//
//   F_q(t) = { (1/N_t) sum_k [f_k(t)^2]^(q/2) }^(1/q)     q != 0
//   F_0(t) = exp{ (1/(2 N_t)) sum_k ln f_k(t)^2 }
//
// and h(q) is the slope of ln F_q(t) against ln t. q = 2 is plain DFA and
// goes through the same reduction as every other q.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "detail/parallel.hpp"
#include "detail/text.hpp"
#include "error.hpp"
#include "series.hpp"

namespace spreadfract {

struct Profile {
    std::vector<double> values;
    double source_mean = 0.0;
    double source_variance = 0.0;

    std::size_t size() const noexcept { return values.size(); }
};

/// B(t') = sum_{t''<=t'} (A(t'') - A_ave).
inline Profile build_profile(std::span<const double> series, std::size_t min_length = 8)
{
    if (series.size() < std::max<std::size_t>(min_length, 1))
        fail(ErrorKind::insufficient_data, "profile needs at least " + std::to_string(min_length)
                                               + " points, got " + std::to_string(series.size()));
    const auto n = static_cast<double>(series.size());
    double mean = 0.0;
    for (double v : series)
        mean += v;
    mean /= n;

    Profile p;
    p.source_mean = mean;
    p.values.resize(series.size());
    double running = 0.0, squares = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double d = series[i] - mean;
        running += d;
        squares += d * d;
        p.values[i] = running;
    }
    p.source_variance = squares / n;
    return p;
}

inline Profile build_profile(const SignalSeries& signal, std::size_t min_length = 8)
{
    return build_profile(std::span<const double>(signal.values), min_length);
}

// ---------------------------------------------------------------------------
// Window grid

enum class GridSpacing { logarithmic, explicit_sizes };

struct WindowGrid {
    std::vector<std::size_t> sizes;
    GridSpacing spacing = GridSpacing::logarithmic;

    /// Checks strict increase, size >= detrend_order + 2 and size <= length / 4.
    void validate(std::size_t length, int detrend_order) const
    {
        if (sizes.empty())
            fail(ErrorKind::config, "window grid is empty");
        const auto smallest = static_cast<std::size_t>(detrend_order + 2);
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            if (i > 0 && sizes[i] <= sizes[i - 1])
                fail(ErrorKind::config, "window sizes must be strictly increasing");
            if (sizes[i] < smallest)
                fail(ErrorKind::config, "window size " + std::to_string(sizes[i])
                                            + " is below detrend order + 2");
        }
        if (sizes.back() > length / 4)
            fail(ErrorKind::insufficient_data,
                 "largest window " + std::to_string(sizes.back()) + " exceeds a quarter of the series ("
                     + std::to_string(length) + " points)");
    }

    /// `count` sizes spaced evenly in log from max(16, order + 2) to length / 4,
    /// rounded and de-duplicated.
    static WindowGrid logarithmic(std::size_t length, int detrend_order = 1, std::size_t count = 20)
    {
        const auto lo = std::max<std::size_t>(16, static_cast<std::size_t>(detrend_order + 2));
        const std::size_t hi = length / 4;
        if (hi < lo)
            fail(ErrorKind::insufficient_data, "series of " + std::to_string(length)
                                                   + " points is too short for a window grid");
        return logarithmic_range(lo, hi, count);
    }

    static WindowGrid logarithmic_range(std::size_t lo, std::size_t hi, std::size_t count)
    {
        if (lo < 1 || hi < lo || count < 1)
            fail(ErrorKind::config, "bad logarithmic window range");
        WindowGrid grid;
        const double a = std::log(static_cast<double>(lo));
        const double b = std::log(static_cast<double>(hi));
        for (std::size_t i = 0; i < count; ++i) {
            const double x = count == 1 ? a : a + (b - a) * static_cast<double>(i)
                                                      / static_cast<double>(count - 1);
            auto t = static_cast<std::size_t>(std::llround(std::exp(x)));
            t = std::clamp(t, lo, hi);
            if (grid.sizes.empty() || t > grid.sizes.back())
                grid.sizes.push_back(t);
        }
        return grid;
    }

    static WindowGrid from_sizes(std::vector<std::size_t> sizes)
    {
        WindowGrid grid;
        grid.sizes = std::move(sizes);
        grid.spacing = GridSpacing::explicit_sizes;
        return grid;
    }
};

// ---------------------------------------------------------------------------
// Window residuals

struct DetrendOptions {
    int detrend_order = 1;
    /// Add windows cut from the series end, doubling N_t.
    bool bidirectional = false;
};

namespace detail {

/// Orthonormal basis of polynomials of degree <= order sampled on t points.
inline std::vector<std::vector<double>> polynomial_basis(std::size_t t, int order)
{
    std::vector<std::vector<double>> basis;
    const double centre = 0.5 * static_cast<double>(t - 1);
    const double scale = t > 1 ? centre : 1.0;
    for (int degree = 0; degree <= order; ++degree) {
        std::vector<double> column(t);
        for (std::size_t i = 0; i < t; ++i)
            column[i] = std::pow((static_cast<double>(i) - centre) / scale, degree);
        // Modified Gram-Schmidt, applied twice for orthogonality to working precision.
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : basis) {
                double dot = 0.0;
                for (std::size_t i = 0; i < t; ++i)
                    dot += q[i] * column[i];
                for (std::size_t i = 0; i < t; ++i)
                    column[i] -= dot * q[i];
            }
        }
        double norm = 0.0;
        for (double v : column)
            norm += v * v;
        norm = std::sqrt(norm);
        if (!(norm > 0.0))
            fail(ErrorKind::config, "window too small for the detrending order");
        for (double& v : column)
            v /= norm;
        basis.push_back(std::move(column));
    }
    return basis;
}

inline double window_residual(std::span<const double> window,
                              const std::vector<std::vector<double>>& basis,
                              std::vector<double>& scratch)
{
    scratch.assign(window.begin(), window.end());
    for (const auto& q : basis) {
        double dot = 0.0;
        for (std::size_t i = 0; i < scratch.size(); ++i)
            dot += q[i] * scratch[i];
        for (std::size_t i = 0; i < scratch.size(); ++i)
            scratch[i] -= dot * q[i];
    }
    double sum = 0.0;
    for (double r : scratch)
        sum += r * r;
    return sum / static_cast<double>(scratch.size());
}

} // namespace detail

/// f_k(t)^2 = (1/t) sum (B - B_t)^2 for each of the floor(T/t) windows taken
/// from the series start; the trailing remainder is discarded. With
/// bidirectional set, the same number of windows taken from the end follow.
inline std::vector<double> window_fluctuations(const Profile& profile, std::size_t t,
                                               const DetrendOptions& options = {})
{
    if (options.detrend_order < 1 || options.detrend_order > 3)
        fail(ErrorKind::config, "detrend order must be 1, 2 or 3");
    if (t > profile.size())
        fail(ErrorKind::config, "window size " + std::to_string(t) + " exceeds the series length "
                                    + std::to_string(profile.size()));
    if (t < static_cast<std::size_t>(options.detrend_order + 1))
        fail(ErrorKind::config, "window size " + std::to_string(t)
                                    + " is too small for the detrending order");

    const auto basis = detail::polynomial_basis(t, options.detrend_order);
    const std::span<const double> b(profile.values);
    const std::size_t windows = profile.size() / t;
    std::vector<double> f2;
    f2.reserve(options.bidirectional ? 2 * windows : windows);
    std::vector<double> scratch;
    for (std::size_t k = 0; k < windows; ++k)
        f2.push_back(detail::window_residual(b.subspan(k * t, t), basis, scratch));
    if (options.bidirectional) {
        const std::size_t n = profile.size();
        for (std::size_t k = 1; k <= windows; ++k)
            f2.push_back(detail::window_residual(b.subspan(n - k * t, t), basis, scratch));
    }
    return f2;
}

/// f_k(t)^2 for every size of the grid, computed in parallel over sizes.
struct ResidualTable {
    std::vector<std::size_t> sizes;
    std::vector<std::vector<double>> f2;
    double floor_value = 0.0; // replaces zero residuals under q <= 0
};

/// Residual floor relative to the series variance.
inline constexpr double residual_floor_ratio = 1e-15;
/// Share of floored windows above which a (q, t) point is left out of fits.
inline constexpr double unreliable_floor_share = 0.01;

inline ResidualTable residual_table(const Profile& profile, const WindowGrid& grid,
                                    const DetrendOptions& options = {}, unsigned threads = 0)
{
    grid.validate(profile.size(), options.detrend_order);
    ResidualTable table;
    table.sizes = grid.sizes;
    table.f2.resize(grid.sizes.size());
    table.floor_value = residual_floor_ratio * profile.source_variance;
    detail::parallel_for(grid.sizes.size(), threads, [&](std::size_t i) {
        table.f2[i] = window_fluctuations(profile, grid.sizes[i], options);
    });
    return table;
}

// ---------------------------------------------------------------------------
// Fluctuation functions

struct FluctuationCurve {
    double q = 2.0;
    std::vector<std::size_t> t;
    std::vector<double> F;
    std::vector<std::size_t> windows;  // N_t
    std::vector<std::size_t> floored;  // windows whose residual was floored
    std::vector<bool> reliable;

    std::size_t size() const noexcept { return t.size(); }
};

/// Reduces one row of residuals to F_q(t). Returns the number of floored windows.
inline double fluctuation_moment(std::span<const double> f2, double q, double floor_value,
                                 std::size_t& floored)
{
    floored = 0;
    const auto n = static_cast<double>(f2.size());
    auto value = [&](double r) {
        if (q <= 0.0 && r < floor_value) {
            ++floored;
            return floor_value;
        }
        return r;
    };
    if (q == 2.0) {
        double sum = 0.0;
        for (double r : f2)
            sum += r;
        return std::sqrt(sum / n);
    }
    if (q == 0.0) {
        double sum = 0.0;
        for (double r : f2)
            sum += std::log(value(r));
        return std::exp(0.5 * sum / n);
    }
    double sum = 0.0;
    for (double r : f2)
        sum += std::pow(value(r), 0.5 * q);
    return std::pow(sum / n, 1.0 / q);
}

inline FluctuationCurve fluctuation_curve(const ResidualTable& table, double q)
{
    if (!std::isfinite(q))
        fail(ErrorKind::config, "moment order q must be finite");
    FluctuationCurve curve;
    curve.q = q;
    for (std::size_t i = 0; i < table.sizes.size(); ++i) {
        std::size_t floored = 0;
        const double F = fluctuation_moment(table.f2[i], q, table.floor_value, floored);
        const std::size_t windows = table.f2[i].size();
        curve.t.push_back(table.sizes[i]);
        curve.F.push_back(F);
        curve.windows.push_back(windows);
        curve.floored.push_back(floored);
        curve.reliable.push_back(static_cast<double>(floored)
                                     <= unreliable_floor_share * static_cast<double>(windows)
                                 && std::isfinite(F) && F > 0.0);
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Power-law fits

struct Crossover {
    double t_break = 0.0;
    double exponent_left = 0.0;
    double exponent_right = 0.0;
    double intercept_left = 0.0;
    double intercept_right = 0.0;
    std::size_t left_points = 0;
    std::size_t right_points = 0;
    /// RMS of the two-segment fit over all points.
    double residual = 0.0;
    /// (single RMS - two-segment RMS) / single RMS; 0 when the single fit is exact.
    double improvement = 0.0;
    /// improvement >= 5% and the slopes differ by more than 0.02.
    bool detected = false;
};

struct PowerLawFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
    double residual = 0.0; // RMS of ln F about the fitted line
    std::size_t points = 0;
    std::size_t excluded = 0; // non-positive or unreliable points inside the range
    std::optional<Crossover> crossover;
};

namespace detail {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double sse = 0.0;
};

inline LineFit least_squares(std::span<const double> x, std::span<const double> y)
{
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        fit.sse += r * r;
    }
    return fit;
}

struct LogPoints {
    std::vector<double> log_t;
    std::vector<double> log_F;
    std::vector<double> t;
    std::size_t excluded = 0;
};

inline LogPoints usable_points(const FluctuationCurve& curve,
                               std::optional<std::pair<double, double>> range)
{
    LogPoints pts;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const auto t = static_cast<double>(curve.t[i]);
        if (range && (t < range->first || t > range->second))
            continue;
        const bool reliable = curve.reliable.empty() || curve.reliable[i];
        if (!(curve.F[i] > 0.0) || !std::isfinite(curve.F[i]) || !reliable) {
            ++pts.excluded;
            continue;
        }
        pts.t.push_back(t);
        pts.log_t.push_back(std::log(t));
        pts.log_F.push_back(std::log(curve.F[i]));
    }
    return pts;
}

} // namespace detail

/// Ordinary least squares of ln F_q(t) on ln t over [t_min, t_max].
/// Non-positive and unreliable points are skipped and counted.
inline PowerLawFit fit_power_law(const FluctuationCurve& curve,
                                 std::optional<std::pair<double, double>> range = std::nullopt)
{
    const auto pts = detail::usable_points(curve, range);
    if (pts.t.size() < 3)
        fail(ErrorKind::insufficient_data,
             "power-law fit needs at least 3 usable points, have " + std::to_string(pts.t.size()));
    const auto line = detail::least_squares(pts.log_t, pts.log_F);
    PowerLawFit fit;
    fit.exponent = line.slope;
    fit.intercept = line.intercept;
    fit.t_min = pts.t.front();
    fit.t_max = pts.t.back();
    fit.residual = std::sqrt(line.sse / static_cast<double>(pts.t.size()));
    fit.points = pts.t.size();
    fit.excluded = pts.excluded;
    return fit;
}

inline constexpr std::size_t crossover_min_segment = 4;

/// Single fit plus the best two-segment fit over every interior breakpoint
/// with at least four points per side. The break is where the two fitted
/// lines meet, clamped to the gap between the segments.
inline PowerLawFit detect_crossover(const FluctuationCurve& curve,
                                    std::optional<std::pair<double, double>> range = std::nullopt)
{
    PowerLawFit fit = fit_power_law(curve, range);
    const auto pts = detail::usable_points(curve, range);
    const std::size_t n = pts.t.size();
    if (n < 2 * crossover_min_segment)
        return fit;

    const std::span<const double> x(pts.log_t), y(pts.log_F);
    std::optional<std::size_t> best_k;
    detail::LineFit best_left, best_right;
    double best_sse = std::numeric_limits<double>::infinity();
    for (std::size_t k = crossover_min_segment; k + crossover_min_segment <= n; ++k) {
        const auto left = detail::least_squares(x.first(k), y.first(k));
        const auto right = detail::least_squares(x.subspan(k), y.subspan(k));
        const double sse = left.sse + right.sse;
        if (sse < best_sse) {
            best_sse = sse;
            best_k = k;
            best_left = left;
            best_right = right;
        }
    }

    Crossover c;
    const std::size_t k = *best_k;
    c.exponent_left = best_left.slope;
    c.exponent_right = best_right.slope;
    c.intercept_left = best_left.intercept;
    c.intercept_right = best_right.intercept;
    c.left_points = k;
    c.right_points = n - k;
    c.residual = std::sqrt(best_sse / static_cast<double>(n));

    const double gap_lo = x[k - 1], gap_hi = x[k];
    double log_break = 0.5 * (gap_lo + gap_hi);
    const double dslope = best_left.slope - best_right.slope;
    if (dslope != 0.0) {
        const double meet = (best_right.intercept - best_left.intercept) / dslope;
        if (std::isfinite(meet))
            log_break = std::clamp(meet, gap_lo, gap_hi);
    }
    c.t_break = std::exp(log_break);

    c.improvement = fit.residual > 1e-12 ? (fit.residual - c.residual) / fit.residual : 0.0;
    c.detected = c.improvement >= 0.05 && std::fabs(c.exponent_right - c.exponent_left) > 0.02;
    fit.crossover = c;
    return fit;
}

// ---------------------------------------------------------------------------
// DFA and MF-DFA

enum class MemoryClass { anti_correlated, uncorrelated, long_range_correlated, one_over_f, unstable };

inline const char* to_string(MemoryClass c) noexcept
{
    switch (c) {
    case MemoryClass::anti_correlated: return "anti-correlated";
    case MemoryClass::uncorrelated: return "uncorrelated";
    case MemoryClass::long_range_correlated: return "long-range correlated";
    case MemoryClass::one_over_f: return "1/f noise";
    case MemoryClass::unstable: return "unstable series";
    }
    return "unknown";
}

/// H below 0.5 is anti-correlated, around 0.5 white noise, between 0.5 and 1
/// long-range correlated, around 1 1/f noise, above 1 unstable.
inline MemoryClass classify_exponent(double H, double tolerance = 0.03) noexcept
{
    if (std::fabs(H - 0.5) <= tolerance)
        return MemoryClass::uncorrelated;
    if (std::fabs(H - 1.0) <= tolerance)
        return MemoryClass::one_over_f;
    if (H < 0.5)
        return MemoryClass::anti_correlated;
    if (H < 1.0)
        return MemoryClass::long_range_correlated;
    return MemoryClass::unstable;
}

struct FluctuationOptions {
    DetrendOptions detrend;
    std::optional<std::pair<double, double>> fit_range;
    unsigned threads = 0;
};

struct DfaResult {
    FluctuationCurve curve;
    PowerLawFit fit;
    MemoryClass memory = MemoryClass::uncorrelated;
};

struct MfdfaResult {
    std::vector<FluctuationCurve> curves;
    /// Empty where the fit failed (too few usable points).
    std::vector<std::optional<PowerLawFit>> fits;
    std::vector<std::string> diagnostics;
};

namespace detail {

inline ResidualTable prepare_residuals(std::span<const double> series, const WindowGrid& grid,
                                       const FluctuationOptions& options)
{
    const auto profile = build_profile(series);
    if (!(profile.source_variance > 0.0))
        fail(ErrorKind::degenerate, "constant series: every window residual is zero");
    return residual_table(profile, grid, options.detrend, options.threads);
}

} // namespace detail

inline DfaResult dfa(std::span<const double> series, const WindowGrid& grid,
                     const FluctuationOptions& options = {})
{
    const auto table = detail::prepare_residuals(series, grid, options);
    DfaResult result;
    result.curve = fluctuation_curve(table, 2.0);
    if (result.curve.size() < 3)
        fail(ErrorKind::insufficient_data, "DFA fit needs at least 3 window sizes");
    result.fit = fit_power_law(result.curve, options.fit_range);
    result.memory = classify_exponent(result.fit.exponent);
    return result;
}

inline DfaResult dfa(const SignalSeries& signal, const WindowGrid& grid,
                     const FluctuationOptions& options = {})
{
    return dfa(std::span<const double>(signal.values), grid, options);
}

inline MfdfaResult mfdfa(std::span<const double> series, const WindowGrid& grid,
                         std::span<const double> q_grid, const FluctuationOptions& options = {})
{
    if (q_grid.empty())
        fail(ErrorKind::config, "q grid is empty");
    const auto table = detail::prepare_residuals(series, grid, options);
    MfdfaResult result;
    for (double q : q_grid) {
        auto curve = fluctuation_curve(table, q);
        std::size_t floored = 0, unreliable = 0;
        for (std::size_t i = 0; i < curve.size(); ++i) {
            floored += curve.floored[i];
            unreliable += curve.reliable[i] ? 0 : 1;
        }
        if (floored > 0)
            result.diagnostics.push_back("q=" + detail::format_double(q) + ": "
                                         + std::to_string(floored) + " windows floored, "
                                         + std::to_string(unreliable) + " window sizes unreliable");
        try {
            result.fits.push_back(fit_power_law(curve, options.fit_range));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::insufficient_data)
                throw;
            result.fits.push_back(std::nullopt);
            result.diagnostics.push_back("q=" + detail::format_double(q) + ": " + e.what());
        }
        result.curves.push_back(std::move(curve));
    }
    return result;
}

inline MfdfaResult mfdfa(const SignalSeries& signal, const WindowGrid& grid,
                         std::span<const double> q_grid, const FluctuationOptions& options = {})
{
    return mfdfa(std::span<const double>(signal.values), grid, q_grid, options);
}

/// `q,t,F`, one row per (q, t).
inline void write_fluctuation_csv(std::ostream& out, std::span<const FluctuationCurve> curves)
{
    out << "q,t,F\n";
    for (const auto& c : curves) {
        for (std::size_t i = 0; i < c.size(); ++i)
            out << detail::format_double(c.q) << ',' << c.t[i] << ','
                << detail::format_double(c.F[i]) << '\n';
    }
}

} // namespace spreadfract

#endif // SPREADFRACT_FLUCTUATION_HPP
