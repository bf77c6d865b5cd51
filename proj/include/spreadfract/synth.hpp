#ifndef SPREADFRACT_SYNTH_HPP
#define SPREADFRACT_SYNTH_HPP

// Synthetic series with known scaling, used as estimator oracles.
//
// Randomness comes from std::mt19937_64, whose output sequence is fixed by
// the C++ standard. Normal deviates use Box-Muller on 53-bit uniforms and
// bounded integers use rejection sampling, so a seed yields the same series
// on every conforming platform with the same libm.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "error.hpp"
#include "fluctuation.hpp"
#include "series.hpp"

namespace spreadfract {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    double normal()
    {
        if (spare_) {
            const double z = *spare_;
            spare_.reset();
            return z;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(angle);
        return r * std::cos(angle);
    }

    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound)
    {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t x = engine_();
            if (x >= threshold)
                return x % bound;
        }
    }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

enum class GeneratorKind { white_noise, fgn, binomial_cascade, piecewise_power_law, shuffle_surrogate };

inline const char* to_string(GeneratorKind kind) noexcept
{
    switch (kind) {
    case GeneratorKind::white_noise: return "white_noise";
    case GeneratorKind::fgn: return "fgn";
    case GeneratorKind::binomial_cascade: return "binomial_cascade";
    case GeneratorKind::piecewise_power_law: return "piecewise_power_law";
    case GeneratorKind::shuffle_surrogate: return "shuffle_surrogate";
    }
    return "white_noise";
}

inline std::optional<GeneratorKind> parse_generator_kind(std::string_view s) noexcept
{
    for (auto kind : {GeneratorKind::white_noise, GeneratorKind::fgn,
                      GeneratorKind::binomial_cascade, GeneratorKind::piecewise_power_law,
                      GeneratorKind::shuffle_surrogate}) {
        if (s == to_string(kind))
            return kind;
    }
    return std::nullopt;
}

/// Parameters by kind (defaults in brackets):
///   fgn                 H [0.5]
///   binomial_cascade    p [0.7], randomize [0] (draw which half receives p)
///   piecewise_power_law H_left [0.5], H_right [0.99], t_break [64]
///   shuffle_surrogate   H [0.8] of the fGn that is shuffled
struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::white_noise;
    std::size_t length = 1 << 16;
    std::uint64_t seed = 1;
    std::map<std::string, double> params;

    double param(const std::string& name, double fallback) const
    {
        const auto it = params.find(name);
        return it == params.end() ? fallback : it->second;
    }

    void validate() const
    {
        if (length < 256)
            fail(ErrorKind::config, "generated series need at least 256 points");
        auto check_hurst = [](double H, const char* name) {
            if (!(H > 0.0 && H < 1.0))
                fail(ErrorKind::config, std::string(name) + " must lie in (0, 1)");
        };
        switch (kind) {
        case GeneratorKind::white_noise: break;
        case GeneratorKind::fgn: check_hurst(param("H", 0.5), "H"); break;
        case GeneratorKind::shuffle_surrogate: check_hurst(param("H", 0.8), "H"); break;
        case GeneratorKind::piecewise_power_law:
            check_hurst(param("H_left", 0.5), "H_left");
            check_hurst(param("H_right", 0.99), "H_right");
            if (!(param("t_break", 64) > 1.0))
                fail(ErrorKind::config, "t_break must exceed 1");
            break;
        case GeneratorKind::binomial_cascade: {
            const double p = param("p", 0.7);
            if (!(p > 0.5 && p < 1.0))
                fail(ErrorKind::config, "cascade weight p must lie in (0.5, 1)");
            if ((length & (length - 1)) != 0)
                fail(ErrorKind::config, "cascade length must be a power of two");
            break;
        }
        }
    }
};

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<double> x(n);
    for (double& v : x)
        v = rng.normal();
    return x;
}

/// gamma(k) = (|k+1|^2H - 2|k|^2H + |k-1|^2H) / 2, unit variance.
inline double fgn_autocovariance(double hurst, double k)
{
    const double e = 2.0 * hurst;
    k = std::fabs(k);
    return 0.5 * (std::pow(k + 1.0, e) - 2.0 * std::pow(k, e) + std::pow(std::fabs(k - 1.0), e));
}

namespace detail {

struct FftwPlanDeleter {
    void operator()(fftw_plan_s* p) const noexcept { fftw_destroy_plan(p); }
};
struct FftwFree {
    void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

/// In-place forward DFT of length n.
inline void forward_dft(std::vector<std::complex<double>>& data)
{
    const int n = static_cast<int>(data.size());
    std::unique_ptr<fftw_complex, FftwFree> buf(fftw_alloc_complex(data.size()));
    std::unique_ptr<fftw_plan_s, FftwPlanDeleter> plan(
        fftw_plan_dft_1d(n, buf.get(), buf.get(), FFTW_FORWARD, FFTW_ESTIMATE));
    for (std::size_t i = 0; i < data.size(); ++i) {
        buf.get()[i][0] = data[i].real();
        buf.get()[i][1] = data[i].imag();
    }
    fftw_execute(plan.get());
    for (std::size_t i = 0; i < data.size(); ++i)
        data[i] = {buf.get()[i][0], buf.get()[i][1]};
}

} // namespace detail

/// Fractional Gaussian noise by circulant embedding (Davies-Harte). The
/// covariance of the output equals gamma(k) exactly; only the Gaussian draws
/// are random.
inline std::vector<double> fractional_gaussian_noise(std::size_t n, double hurst, std::uint64_t seed)
{
    if (!(hurst > 0.0 && hurst < 1.0))
        fail(ErrorKind::config, "fGn requires H in (0, 1)");
    if (n < 2)
        fail(ErrorKind::config, "fGn length must be at least 2");
    const std::size_t m = 2 * n;

    std::vector<std::complex<double>> eig(m);
    for (std::size_t j = 0; j <= n; ++j)
        eig[j] = fgn_autocovariance(hurst, static_cast<double>(j));
    for (std::size_t j = 1; j < n; ++j)
        eig[m - j] = eig[j];
    detail::forward_dft(eig);
    for (auto& e : eig) {
        if (e.real() < -1e-8)
            fail(ErrorKind::invariant, "circulant embedding has a negative eigenvalue");
        e = std::max(e.real(), 0.0);
    }

    Rng rng(seed);
    const auto dm = static_cast<double>(m);
    std::vector<std::complex<double>> w(m);
    w[0] = std::sqrt(eig[0].real() / dm) * rng.normal();
    w[n] = std::sqrt(eig[n].real() / dm) * rng.normal();
    for (std::size_t j = 1; j < n; ++j) {
        const double scale = std::sqrt(eig[j].real() / (2.0 * dm));
        const double re = rng.normal(), im = rng.normal();
        w[j] = {scale * re, scale * im};
        w[m - j] = std::conj(w[j]);
    }
    detail::forward_dft(w);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = w[i].real();
    return x;
}

/// Dyadic multiplicative measure at the finest scale: every split hands
/// weight p to the left half and 1 - p to the right. With `randomize` the
/// side receiving p is drawn per split instead; the multiset of values, and
/// with it every partition sum, is the same either way. Values sum to 1.
inline std::vector<double> binomial_cascade(std::size_t n, double p, std::uint64_t seed = 0,
                                            bool randomize = false)
{
    if (n < 1 || (n & (n - 1)) != 0)
        fail(ErrorKind::config, "cascade length must be a power of two");
    Rng rng(seed);
    std::vector<double> mass{1.0};
    while (mass.size() < n) {
        std::vector<double> next(mass.size() * 2);
        for (std::size_t i = 0; i < mass.size(); ++i) {
            const bool flip = randomize && rng.below(2) == 1;
            next[2 * i] = mass[i] * (flip ? 1.0 - p : p);
            next[2 * i + 1] = mass[i] * (flip ? p : 1.0 - p);
        }
        mass = std::move(next);
    }
    return mass;
}

/// Uniform random permutation (Fisher-Yates).
inline std::vector<double> shuffled(std::span<const double> values, std::uint64_t seed)
{
    std::vector<double> out(values.begin(), values.end());
    Rng rng(seed);
    for (std::size_t i = out.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(out[i - 1], out[j]);
    }
    return out;
}

inline SignalSeries shuffle_surrogate(const SignalSeries& signal, std::uint64_t seed)
{
    SignalSeries out = signal;
    out.values = shuffled(signal.values, seed);
    return out;
}

/// Expected squared DFA fluctuation E[f^2(t)] of unit-variance fGn: the
/// profile inside a window is fBm with covariance
/// (i^2H + j^2H - |i-j|^2H) / 2, and detrending projects out the polynomial
/// span, so E[f^2] = (tr S - sum_k q_k' S q_k) / t.
inline double expected_dfa_variance(double hurst, std::size_t t, int detrend_order = 1)
{
    const auto basis = detail::polynomial_basis(t, detrend_order);
    const double e = 2.0 * hurst;
    std::vector<double> cov(t * t);
    for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = 0; j < t; ++j) {
            const auto a = static_cast<double>(i + 1), b = static_cast<double>(j + 1);
            cov[i * t + j] = 0.5 * (std::pow(a, e) + std::pow(b, e) - std::pow(std::fabs(a - b), e));
        }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < t; ++i)
        total += cov[i * t + i];
    for (const auto& q : basis) {
        for (std::size_t i = 0; i < t; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < t; ++j)
                row += cov[i * t + j] * q[j];
            total -= q[i] * row;
        }
    }
    return total / static_cast<double>(t);
}

/// Independent fGn(H_left) plus an fGn(H_right) scaled so that their expected
/// DFA fluctuation functions are equal at t_break: a long-memory series whose
/// DFA curve bends towards H_right beyond the break.
inline std::vector<double> crossover_composite(std::size_t n, double h_left, double h_right,
                                               double t_break, std::uint64_t seed)
{
    auto x = fractional_gaussian_noise(n, h_left, seed);
    const auto y = fractional_gaussian_noise(n, h_right, seed ^ 0x9e3779b97f4a7c15ULL);
    const auto tb = static_cast<std::size_t>(std::llround(std::max(t_break, 3.0)));
    const double amplitude =
        std::sqrt(expected_dfa_variance(h_left, tb) / expected_dfa_variance(h_right, tb));
    for (std::size_t i = 0; i < n; ++i)
        x[i] += amplitude * y[i];
    return x;
}

inline SignalSeries generate(const GeneratorSpec& spec)
{
    spec.validate();
    std::vector<double> values;
    switch (spec.kind) {
    case GeneratorKind::white_noise: values = white_noise(spec.length, spec.seed); break;
    case GeneratorKind::fgn:
        values = fractional_gaussian_noise(spec.length, spec.param("H", 0.5), spec.seed);
        break;
    case GeneratorKind::binomial_cascade:
        values = binomial_cascade(spec.length, spec.param("p", 0.7), spec.seed,
                                  spec.param("randomize", 0.0) != 0.0);
        break;
    case GeneratorKind::piecewise_power_law:
        values = crossover_composite(spec.length, spec.param("H_left", 0.5),
                                     spec.param("H_right", 0.99), spec.param("t_break", 64.0),
                                     spec.seed);
        break;
    case GeneratorKind::shuffle_surrogate:
        values = shuffled(fractional_gaussian_noise(spec.length, spec.param("H", 0.8), spec.seed),
                          spec.seed + 1);
        break;
    }
    return SignalSeries::contiguous(std::move(values));
}

/// Exact two-regime curve: F = A t^left up to t_break, continued with slope
/// `right` beyond it.
inline FluctuationCurve piecewise_power_law_curve(std::span<const std::size_t> sizes,
                                                  double left, double right, double t_break,
                                                  double amplitude = 1.0)
{
    FluctuationCurve curve;
    for (std::size_t t : sizes) {
        const auto x = static_cast<double>(t);
        const double F = x <= t_break
                             ? amplitude * std::pow(x, left)
                             : amplitude * std::pow(t_break, left) * std::pow(x / t_break, right);
        curve.t.push_back(t);
        curve.F.push_back(F);
        curve.windows.push_back(0);
        curve.floored.push_back(0);
        curve.reliable.push_back(true);
    }
    return curve;
}

} // namespace spreadfract

#endif // SPREADFRACT_SYNTH_HPP
