#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spreadfract/multifractal.hpp"
#include "spreadfract/synth.hpp"

using namespace spreadfract;

namespace {

std::vector<std::optional<PowerLawFit>> fits_from(const std::vector<double>& h)
{
    std::vector<std::optional<PowerLawFit>> fits;
    for (double v : h) {
        PowerLawFit f;
        f.exponent = v;
        fits.emplace_back(f);
    }
    return fits;
}

MultifractalSummary analyse(const std::vector<double>& x, const std::vector<double>& q)
{
    const auto m = mfdfa(x, WindowGrid::logarithmic(x.size()), q);
    return summarize_multifractal(q, m.fits);
}

double cascade_tau(double q, double p) { return -std::log2(std::pow(p, q) + std::pow(1 - p, q)); }

} // namespace

TEST(ScalingExponents, Examples)
{
    const std::vector<double> q{-1, 0, 2};
    const auto e = scaling_exponents(q, fits_from({0.5, 0.5, 0.5}));
    EXPECT_EQ(e.tau, (std::vector<double>{-1.5, -1.0, 0.0}));
    const auto f = scaling_exponents(q, fits_from({0.8, 0.7, 0.6}), 1.0);
    EXPECT_NEAR(f.tau[0], -1.8, 1e-15);
    EXPECT_NEAR(f.tau[2], 0.2, 1e-15);
}

TEST(ScalingExponents, DropsMissingFits)
{
    auto fits = fits_from({0.5, 0.5, 0.5});
    fits[1].reset();
    const auto e = scaling_exponents(std::vector<double>{1, 2, 3}, fits);
    EXPECT_EQ(e.q, (std::vector<double>{1, 3}));
    EXPECT_EQ(e.dropped_q, std::vector<double>{2});
    EXPECT_THROW(scaling_exponents(std::vector<double>{1, 2}, fits), Error);
}

TEST(DefaultQGrid, Contents)
{
    const auto q = default_q_grid();
    EXPECT_EQ(q.size(), 25u);
    EXPECT_EQ(q.front(), -6.0);
    EXPECT_EQ(q.back(), 6.0);
    EXPECT_NE(std::find(q.begin(), q.end(), 0.0), q.end());
    EXPECT_NE(std::find(q.begin(), q.end(), 2.0), q.end());
}

TEST(LegendreSpectrum, LinearTauCollapses)
{
    const auto q = default_q_grid();
    std::vector<double> tau;
    for (double v : q)
        tau.push_back(0.5 * v - 1.0);
    const auto s = legendre_spectrum(q, tau);
    for (std::size_t i = 0; i < q.size(); ++i) {
        EXPECT_NEAR(s.alpha[i], 0.5, 1e-12);
        EXPECT_NEAR(s.f_alpha[i], 1.0, 1e-12);
    }
    const auto w = multifractal_width(std::vector<double>(q.size(), 0.5), s.alpha);
    EXPECT_NEAR(w.delta_alpha, 0.0, 1e-12);
    EXPECT_EQ(w.delta_h, 0.0);
}

TEST(LegendreSpectrum, QuadraticTauIsExact)
{
    // tau = q/2 - q^2/100 - 1, alpha = 1/2 - q/50, f = 1 - q^2/100
    std::vector<double> q{-5, -3.5, -1, 0, 0.5, 2, 4.25, 6};
    std::vector<double> tau;
    for (double v : q)
        tau.push_back(v / 2 - v * v / 100 - 1);
    const auto s = legendre_spectrum(q, tau);
    for (std::size_t i = 0; i < q.size(); ++i) {
        EXPECT_NEAR(s.alpha[i], 0.5 - q[i] / 50, 1e-12) << q[i];
        EXPECT_NEAR(s.f_alpha[i], 1 - q[i] * q[i] / 100, 1e-12) << q[i];
    }
    EXPECT_NEAR(s.f_alpha[3], 1.0, 1e-12);
}

TEST(LegendreSpectrum, Validation)
{
    EXPECT_THROW(legendre_spectrum(std::vector<double>{0, 1, 2, 3}, std::vector<double>{0, 1, 2, 3}),
                 Error);
    EXPECT_THROW(legendre_spectrum(std::vector<double>{0, 1, 1, 3, 4},
                                   std::vector<double>{0, 1, 2, 3, 4}),
                 Error);
    EXPECT_THROW(legendre_spectrum(std::vector<double>{0, 1, 2, 3}, std::vector<double>{0, 1, 2}),
                 Error);
}

TEST(LegendreSpectrum, CascadeOracle)
{
    const double p = 0.7;
    const auto q = default_q_grid();
    std::vector<double> tau;
    for (double v : q)
        tau.push_back(cascade_tau(v, p));
    const auto s = legendre_spectrum(q, tau);
    // alpha runs between the analytic endpoints -log2(p) and -log2(1-p)
    EXPECT_GT(s.alpha.front(), s.alpha.back());
    EXPECT_LT(s.alpha.front(), -std::log2(1 - p) + 1e-6);
    EXPECT_GT(s.alpha.back(), -std::log2(p) - 1e-6);
    EXPECT_NEAR(s.f_alpha[12], 1.0, 1e-12); // q = 0
}

TEST(LegendreSpectrum, ConsistencyWithinTruncationError)
{
    const auto q = default_q_grid();
    std::vector<double> tau;
    for (double v : q)
        tau.push_back(cascade_tau(v, 0.7));
    const auto s = legendre_spectrum(q, tau);
    const auto err = derivative_truncation_error(q, tau);
    for (std::size_t i = 1; i + 1 < q.size(); ++i) {
        const double exact = -(std::pow(0.7, q[i]) * std::log2(0.7)
                               + std::pow(0.3, q[i]) * std::log2(0.3))
                             / (std::pow(0.7, q[i]) + std::pow(0.3, q[i]));
        EXPECT_LE(std::fabs(s.alpha[i] - exact), 2.0 * err[i] + 1e-12) << q[i];
    }
}

TEST(Summary, CascadeDescriptors)
{
    const double p = 0.7;
    const auto q = default_q_grid();
    const auto s = analyse(binomial_cascade(1 << 14, p), q);
    ASSERT_EQ(s.q.size(), q.size());
    EXPECT_GE(s.delta_h, 0.5);
    EXPECT_GE(s.delta_alpha, 0.8);
    EXPECT_NEAR(s.f_alpha[12], s.fractal_dimension, 1e-9);
    for (std::size_t i = 0; i < s.q.size(); ++i) {
        if (std::fabs(s.q[i]) <= 2.0) {
            EXPECT_NEAR(s.tau[i], cascade_tau(s.q[i], p), 0.1) << s.q[i];
        }
    }
    for (std::size_t i = 1; i + 1 < s.q.size(); ++i)
        EXPECT_NEAR(s.q[i] * s.alpha[i] - s.f_alpha[i], s.tau[i], 1e-12);
}

TEST(Summary, WhiteNoiseIsMonofractal)
{
    const auto s = analyse(white_noise(1 << 16, 5), default_q_grid());
    EXPECT_LE(std::fabs(s.delta_h), 0.1);
    EXPECT_LE(s.delta_alpha, 0.15);
}

TEST(Summary, WidthStableUnderGridRefinement)
{
    const auto x = binomial_cascade(1 << 14, 0.7);
    std::vector<double> fine;
    for (int i = 0; i <= 48; ++i)
        fine.push_back(-6.0 + 0.25 * i);
    const auto coarse = analyse(x, default_q_grid());
    const auto refined = analyse(x, fine);
    EXPECT_NEAR(coarse.delta_h, refined.delta_h, 1e-12);
    EXPECT_NEAR(coarse.delta_alpha, refined.delta_alpha, 0.05);
}

TEST(Summary, MissingSecondMomentWarns)
{
    const std::vector<double> q{-3, -1, 1, 3, 5};
    const auto s = summarize_multifractal(q, fits_from({0.6, 0.55, 0.5, 0.45, 0.4}));
    EXPECT_TRUE(std::any_of(s.warnings.begin(), s.warnings.end(),
                            [](const std::string& w) { return w.find("q=2") != std::string::npos; }));
}

TEST(Summary, NonConcaveTauWarns)
{
    const std::vector<double> q{-2, -1, 0, 1, 2, 3};
    // h rising with q makes tau convex
    const auto s = summarize_multifractal(q, fits_from({0.2, 0.3, 0.5, 0.7, 0.9, 1.1}));
    EXPECT_FALSE(s.concave);
    EXPECT_FALSE(s.warnings.empty());
}

TEST(Summary, TooFewOrders)
{
    const std::vector<double> q{-1, 0, 1, 2};
    EXPECT_THROW(summarize_multifractal(q, fits_from({0.5, 0.5, 0.5, 0.5})), Error);
}

TEST(SummaryCsv, Layout)
{
    const std::vector<double> q{-2, -1, 0, 1, 2};
    const auto s = summarize_multifractal(q, fits_from({0.5, 0.5, 0.5, 0.5, 0.5}));
    std::ostringstream scaling, spectrum;
    write_scaling_csv(scaling, s);
    write_spectrum_csv(spectrum, s);
    EXPECT_EQ(scaling.str().substr(0, 14), "q,h,tau\n-2,0.5");
    EXPECT_EQ(spectrum.str().substr(0, 14), "alpha,f_alpha\n");
}
