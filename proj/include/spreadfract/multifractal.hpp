#ifndef SPREADFRACT_MULTIFRACTAL_HPP
#define SPREADFRACT_MULTIFRACTAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "detail/text.hpp"
#include "error.hpp"
#include "fluctuation.hpp"

namespace spreadfract {

/// 25 evenly spaced orders on [-6, 6]; contains 0 and 2.
inline std::vector<double> default_q_grid()
{
    std::vector<double> q(25);
    for (std::size_t i = 0; i < q.size(); ++i)
        q[i] = -6.0 + 0.5 * static_cast<double>(i);
    return q;
}

struct ScalingExponents {
    std::vector<double> q;
    std::vector<double> h;
    std::vector<double> tau;
    std::vector<double> dropped_q; // orders whose fit was missing or non-finite
};

/// tau(q) = q h(q) - D_f for every order with a valid fit.
inline ScalingExponents scaling_exponents(std::span<const double> q_grid,
                                          std::span<const std::optional<PowerLawFit>> fits,
                                          double fractal_dimension = 1.0)
{
    if (q_grid.size() != fits.size())
        fail(ErrorKind::config, "q grid and fit list differ in length");
    ScalingExponents out;
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
        if (!fits[i] || !std::isfinite(fits[i]->exponent)) {
            out.dropped_q.push_back(q_grid[i]);
            continue;
        }
        const double h = fits[i]->exponent;
        out.q.push_back(q_grid[i]);
        out.h.push_back(h);
        out.tau.push_back(q_grid[i] * h - fractal_dimension);
    }
    return out;
}

struct SingularitySpectrum {
    std::vector<double> alpha;
    std::vector<double> f_alpha;
};

namespace detail {

/// Second-order finite-difference derivative on a non-uniform grid:
/// three-point central stencil inside, three-point one-sided at the ends.
inline std::vector<double> derivative(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    std::vector<double> d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
        d[i] = -h2 / (h1 * (h1 + h2)) * y[i - 1] + (h2 - h1) / (h1 * h2) * y[i]
               + h1 / (h2 * (h1 + h2)) * y[i + 1];
    }
    {
        const double h1 = x[1] - x[0], h2 = x[2] - x[1];
        d[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1]
               - h1 / (h2 * (h1 + h2)) * y[2];
    }
    {
        const double h1 = x[n - 2] - x[n - 3], h2 = x[n - 1] - x[n - 2];
        d[n - 1] = h2 / (h1 * (h1 + h2)) * y[n - 3] - (h1 + h2) / (h1 * h2) * y[n - 2]
                   + (h1 + 2 * h2) / (h2 * (h1 + h2)) * y[n - 1];
    }
    return d;
}

} // namespace detail

/// alpha = d tau / dq, f(alpha) = q alpha - tau(q), evaluated at the grid orders.
inline SingularitySpectrum legendre_spectrum(std::span<const double> q, std::span<const double> tau)
{
    if (q.size() != tau.size())
        fail(ErrorKind::config, "q and tau differ in length");
    if (q.size() < 5)
        fail(ErrorKind::insufficient_data, "singularity spectrum needs at least 5 orders, have "
                                               + std::to_string(q.size()));
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (!std::isfinite(q[i]) || !std::isfinite(tau[i]))
            fail(ErrorKind::degenerate, "non-finite q or tau");
        if (i > 0 && !(q[i] > q[i - 1]))
            fail(ErrorKind::config, "q grid must be strictly increasing");
    }
    SingularitySpectrum s;
    s.alpha = detail::derivative(q, tau);
    s.f_alpha.resize(q.size());
    for (std::size_t i = 0; i < q.size(); ++i)
        s.f_alpha[i] = q[i] * s.alpha[i] - tau[i];
    return s;
}

/// Leading truncation error of the central stencil at each interior order,
/// h1 h2 |tau'''| / 6 with tau''' from the local third divided difference.
/// End points carry NaN.
inline std::vector<double> derivative_truncation_error(std::span<const double> q,
                                                       std::span<const double> tau)
{
    const std::size_t n = q.size();
    std::vector<double> err(n, std::numeric_limits<double>::quiet_NaN());
    if (n < 4)
        return err;
    auto divided3 = [&](std::size_t i) { // third divided difference on q[i..i+3]
        auto d1 = [&](std::size_t a) { return (tau[a + 1] - tau[a]) / (q[a + 1] - q[a]); };
        auto d2 = [&](std::size_t a) { return (d1(a + 1) - d1(a)) / (q[a + 2] - q[a]); };
        return (d2(i + 1) - d2(i)) / (q[i + 3] - q[i]);
    };
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const std::size_t start = std::min(i - 1, n - 4);
        const double third = 6.0 * divided3(start); // tau''' estimate
        const double h1 = q[i] - q[i - 1], h2 = q[i + 1] - q[i];
        err[i] = h1 * h2 * std::fabs(third) / 6.0;
    }
    return err;
}

struct MultifractalWidth {
    double delta_h = 0.0;     // h(q_min) - h(q_max)
    double h_range = 0.0;     // max h - min h, diagnostic
    double delta_alpha = 0.0; // max alpha - min alpha
};

inline MultifractalWidth multifractal_width(std::span<const double> h,
                                            std::span<const double> alpha)
{
    if (h.empty() || alpha.empty())
        fail(ErrorKind::insufficient_data, "width needs non-empty h and alpha");
    MultifractalWidth w;
    w.delta_h = h.front() - h.back();
    const auto [hmin, hmax] = std::minmax_element(h.begin(), h.end());
    w.h_range = *hmax - *hmin;
    const auto [amin, amax] = std::minmax_element(alpha.begin(), alpha.end());
    w.delta_alpha = *amax - *amin;
    return w;
}

struct MultifractalSummary {
    std::vector<double> q;
    std::vector<double> h;
    std::vector<double> tau;
    std::vector<double> alpha;
    std::vector<double> f_alpha;
    double delta_h = 0.0;
    double h_range = 0.0;
    double delta_alpha = 0.0;
    double fractal_dimension = 1.0;
    bool concave = true;
    bool monotone = true;
    std::vector<std::string> warnings;
};

inline constexpr double concavity_tolerance = 1e-6;

/// Full descriptor set from per-order fits. Shape violations of tau and f
/// are reported as warnings; the data are never reshaped.
inline MultifractalSummary summarize_multifractal(std::span<const double> q_grid,
                                                  std::span<const std::optional<PowerLawFit>> fits,
                                                  double fractal_dimension = 1.0)
{
    const auto exps = scaling_exponents(q_grid, fits, fractal_dimension);
    MultifractalSummary s;
    s.fractal_dimension = fractal_dimension;
    for (double q : exps.dropped_q)
        s.warnings.push_back("q=" + detail::format_double(q) + " dropped: no valid fit");
    if (std::find(exps.q.begin(), exps.q.end(), 2.0) == exps.q.end())
        s.warnings.push_back("q grid lacks q=2, the DFA cross-check point");

    const auto spectrum = legendre_spectrum(exps.q, exps.tau);
    const auto width = multifractal_width(exps.h, spectrum.alpha);
    s.q = exps.q;
    s.h = exps.h;
    s.tau = exps.tau;
    s.alpha = spectrum.alpha;
    s.f_alpha = spectrum.f_alpha;
    s.delta_h = width.delta_h;
    s.h_range = width.h_range;
    s.delta_alpha = width.delta_alpha;

    for (std::size_t i = 1; i < s.q.size(); ++i) {
        if (s.tau[i] < s.tau[i - 1] - concavity_tolerance)
            s.monotone = false;
    }
    for (std::size_t i = 1; i + 1 < s.q.size(); ++i) {
        const double left = (s.tau[i] - s.tau[i - 1]) / (s.q[i] - s.q[i - 1]);
        const double right = (s.tau[i + 1] - s.tau[i]) / (s.q[i + 1] - s.q[i]);
        if (right - left > concavity_tolerance)
            s.concave = false;
    }
    if (!s.monotone)
        s.warnings.push_back("tau(q) decreases somewhere on the grid");
    if (!s.concave)
        s.warnings.push_back("non-concave tau(q); spectrum left as computed");
    const double fmax = *std::max_element(s.f_alpha.begin(), s.f_alpha.end());
    if (fmax > fractal_dimension + 1e-6)
        s.warnings.push_back("f(alpha) exceeds D_f (max " + detail::format_double(fmax) + ")");
    if (s.delta_h < -0.02)
        s.warnings.push_back("h(q) increases with q (delta_h " + detail::format_double(s.delta_h)
                             + ")");
    return s;
}

/// `q,h,tau`
inline void write_scaling_csv(std::ostream& out, const MultifractalSummary& s)
{
    out << "q,h,tau\n";
    for (std::size_t i = 0; i < s.q.size(); ++i)
        out << detail::format_double(s.q[i]) << ',' << detail::format_double(s.h[i]) << ','
            << detail::format_double(s.tau[i]) << '\n';
}

/// `alpha,f_alpha`
inline void write_spectrum_csv(std::ostream& out, const MultifractalSummary& s)
{
    out << "alpha,f_alpha\n";
    for (std::size_t i = 0; i < s.alpha.size(); ++i)
        out << detail::format_double(s.alpha[i]) << ',' << detail::format_double(s.f_alpha[i])
            << '\n';
}

} // namespace spreadfract

#endif // SPREADFRACT_MULTIFRACTAL_HPP
