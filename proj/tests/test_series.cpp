#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spreadfract/series.hpp"
#include "spreadfract/synth.hpp"

using namespace spreadfract;

namespace {

SpreadSeries spreads_of(std::vector<double> values, int slots = 240)
{
    SpreadSeries s;
    s.slots_per_day = slots;
    for (std::size_t i = 0; i < values.size(); ++i) {
        s.day_index.push_back(static_cast<int>(i) / slots);
        s.minute_of_day.push_back(static_cast<int>(i) % slots);
    }
    s.values = std::move(values);
    s.day_count = s.values.empty() ? 0 : s.day_index.back() + 1;
    return s;
}

SignalSeries signal_of(std::vector<double> values, SignalKind kind, int slots)
{
    return SignalSeries::contiguous(std::move(values), kind, slots);
}

/// Log-normal spreads over `days` full days.
SpreadSeries random_spreads(int days, int slots, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<double> v(static_cast<std::size_t>(days * slots));
    for (double& x : v)
        x = 0.02 * std::exp(0.3 * rng.normal());
    return spreads_of(std::move(v), slots);
}

} // namespace

TEST(SpreadReturn, Examples)
{
    EXPECT_EQ(spread_return(spreads_of({1.0, 1.0})).values, std::vector<double>{0.0});
    EXPECT_DOUBLE_EQ(spread_return(spreads_of({1.0, std::numbers::e})).values.at(0), 1.0);

    const auto r = spread_return(spreads_of({0.02, 0.03, 0.02}));
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r.kind, SignalKind::raw_return);
    EXPECT_NEAR(r.values[0], std::log(1.5), 1e-15);
    EXPECT_NEAR(r.values[1], std::log(2.0 / 3.0), 1e-15);
    EXPECT_NEAR(r.values[0] + r.values[1], 0.0, 1e-15);
    EXPECT_EQ(r.minute_of_day, (std::vector<int>{1, 2}));
}

TEST(SpreadReturn, TooShort)
{
    try {
        spread_return(spreads_of({0.02}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::insufficient_data);
    }
}

TEST(SpreadReturn, GapsAndDaysBreakTheSeries)
{
    SpreadSeries s;
    s.slots_per_day = 4;
    s.values = {1.0, 2.0, 4.0, 8.0, 16.0};
    s.day_index = {0, 0, 0, 1, 1};
    s.minute_of_day = {0, 1, 3, 0, 1};
    const auto plain = spread_return(s);
    EXPECT_EQ(plain.values.size(), 2u); // (0,1) and (day1: 0,1)
    EXPECT_EQ(plain.day_index, (std::vector<int>{0, 1}));

    GapOptions bridge;
    bridge.bridge_gaps = true;
    const auto bridged = spread_return(s, bridge);
    EXPECT_EQ(bridged.values.size(), 3u); // gap at minute 2 bridged, day boundary kept
    EXPECT_NEAR(bridged.values[1], std::log(2.0), 1e-15);
}

TEST(SpreadReturn, TelescopesWithinADay)
{
    const auto s = random_spreads(3, 240, 11);
    const auto r = spread_return(s);
    for (int day = 0; day < 3; ++day) {
        double sum = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (r.day_index[i] == day)
                sum += r.values[i];
        }
        const double first = s.values[static_cast<std::size_t>(day * 240)];
        const double last = s.values[static_cast<std::size_t>(day * 240 + 239)];
        const double expected = std::log(last / first);
        EXPECT_NEAR(sum, expected, 1e-10 * std::max(1.0, std::fabs(expected)));
    }
}

TEST(SpreadVolatility, Examples)
{
    const auto v = spread_volatility(signal_of({-0.5, 0.5}, SignalKind::raw_return, 240));
    EXPECT_EQ(v.values, (std::vector<double>{0.5, 0.5}));
    EXPECT_EQ(v.kind, SignalKind::raw_volatility);
    EXPECT_EQ(spread_volatility(signal_of({0.0}, SignalKind::raw_return, 240)).values,
              std::vector<double>{0.0});

    const auto w = spread_volatility(
        signal_of({std::log(1.5), std::log(2.0 / 3.0)}, SignalKind::raw_return, 240));
    EXPECT_NEAR(w.values[0], std::log(1.5), 1e-15);
    EXPECT_NEAR(w.values[1], std::log(1.5), 1e-15);
}

TEST(SpreadVolatility, WrongKind)
{
    try {
        spread_volatility(signal_of({0.1}, SignalKind::raw_volatility, 240));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::type_misuse);
    }
}

TEST(SpreadVolatility, NonNegativeAndZeroExactlyWhereReturnIsZero)
{
    auto s = random_spreads(2, 240, 5);
    s.values[10] = s.values[9];
    const auto r = spread_return(s);
    const auto v = spread_volatility(r);
    for (std::size_t i = 0; i < v.size(); ++i) {
        EXPECT_GE(v.values[i], 0.0);
        EXPECT_EQ(v.values[i] == 0.0, r.values[i] == 0.0);
    }
}

TEST(ScaleInvariance, ReturnVolatilityAndAcf)
{
    const auto s = random_spreads(4, 240, 9);
    auto scaled = s;
    for (double& v : scaled.values)
        v *= 7.25;
    const auto r1 = spread_return(s), r2 = spread_return(scaled);
    ASSERT_EQ(r1.size(), r2.size());
    for (std::size_t i = 0; i < r1.size(); ++i)
        EXPECT_NEAR(r1.values[i], r2.values[i], 1e-12);
    const auto a1 = autocorrelation(spread_volatility(r1), 50);
    const auto a2 = autocorrelation(spread_volatility(r2), 50);
    for (std::size_t lag = 0; lag <= 50; ++lag)
        EXPECT_NEAR(a1.values[lag], a2.values[lag], 1e-9);
}

TEST(IntradayPattern, Examples)
{
    SignalSeries s;
    s.slots_per_day = 10;
    s.kind = SignalKind::raw_volatility;
    s.values = {2.0, 4.0};
    s.day_index = {0, 1};
    s.minute_of_day = {7, 7};
    const auto p = intraday_pattern(s);
    EXPECT_EQ(p.values[7], 3.0);
    EXPECT_EQ(p.days_counted[7], 2u);
    EXPECT_FALSE(p.defined(0));
    EXPECT_TRUE(std::isnan(p.values[0]));

    const auto one_day = signal_of({1, 2, 3, 4, 5}, SignalKind::raw_volatility, 5);
    EXPECT_EQ(intraday_pattern(one_day).values, (std::vector<double>{1, 2, 3, 4, 5}));
}

TEST(IntradayPattern, ConstantSeriesAdjustsToOne)
{
    const auto s = signal_of(std::vector<double>(30, 0.7), SignalKind::raw_volatility, 10);
    const auto p = intraday_pattern(s);
    for (double v : p.values)
        EXPECT_DOUBLE_EQ(v, 0.7);
    const auto adj = remove_intraday_pattern(s, p);
    EXPECT_EQ(adj.skipped, 0u);
    for (double v : adj.series.values)
        EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(RemoveIntradayPattern, DivisionAndKindPromotion)
{
    SignalSeries s;
    s.slots_per_day = 3;
    s.kind = SignalKind::raw_return;
    s.values = {4.0};
    s.day_index = {0};
    s.minute_of_day = {1};
    IntradayPattern p;
    p.values = {1.0, 2.0, 1.0};
    p.days_counted = {1, 1, 1};
    p.source_kind = SignalKind::raw_return;
    const auto adj = remove_intraday_pattern(s, p);
    EXPECT_EQ(adj.series.values, std::vector<double>{2.0});
    EXPECT_EQ(adj.series.kind, SignalKind::adjusted_return);

    const auto self = signal_of({0.3, -0.2, 0.5, 0.3, -0.2, 0.5}, SignalKind::raw_return, 3);
    for (double v : remove_intraday_pattern(self, intraday_pattern(self)).series.values)
        EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(RemoveIntradayPattern, EpsilonGuardSkipsAndCounts)
{
    // slot 0 averages to exactly zero, slot 1 is well defined
    const auto s = signal_of({0.5, 0.2, -0.5, 0.4}, SignalKind::raw_return, 2);
    const auto p = intraday_pattern(s);
    EXPECT_EQ(p.values[0], 0.0);
    const auto adj = remove_intraday_pattern(s, p);
    EXPECT_EQ(adj.skipped, 2u);
    EXPECT_EQ(adj.skipped_indices, (std::vector<std::size_t>{0, 2}));
    ASSERT_EQ(adj.series.size(), 2u);
    EXPECT_NEAR(adj.series.values[0], 0.2 / 0.3, 1e-15);
}

TEST(RemoveIntradayPattern, ZeroVolatilitySlotIsUndefined)
{
    const auto s = signal_of({0.0, 0.2, 0.0, 0.4}, SignalKind::raw_volatility, 2);
    const auto adj = remove_intraday_pattern(s, intraday_pattern(s));
    EXPECT_EQ(adj.skipped, 2u);
}

TEST(RemoveIntradayPattern, KindMismatch)
{
    const auto r = signal_of({0.1, 0.2}, SignalKind::raw_return, 2);
    const auto v = signal_of({0.1, 0.2}, SignalKind::raw_volatility, 2);
    EXPECT_THROW(remove_intraday_pattern(r, intraday_pattern(v)), Error);
}

// Brute force: dividing each day's volatility by the per-slot mean makes the
// per-slot mean of the adjusted series one; recomputing the pattern on the
// adjusted series returns all ones.
TEST(RemoveIntradayPattern, VolatilityPatternIdempotence)
{
    const auto s = random_spreads(12, 240, 21);
    const auto v = spread_volatility(spread_return(s));
    const auto adj = remove_intraday_pattern(v, intraday_pattern(v));

    std::vector<double> sum(240, 0.0);
    std::vector<int> count(240, 0);
    for (std::size_t i = 0; i < adj.series.size(); ++i) {
        sum[static_cast<std::size_t>(adj.series.minute_of_day[i])] += adj.series.values[i];
        ++count[static_cast<std::size_t>(adj.series.minute_of_day[i])];
    }
    for (std::size_t slot = 1; slot < 240; ++slot)
        EXPECT_NEAR(sum[slot] / count[slot], 1.0, 1e-10) << slot;

    const auto again = intraday_pattern(adj.series);
    for (std::size_t slot = 1; slot < 240; ++slot)
        EXPECT_NEAR(again.values[slot], 1.0, 1e-10);
    EXPECT_FALSE(again.defined(0)); // no return at the first minute of a day
}

TEST(Autocorrelation, LagZeroIsOne)
{
    const auto s = signal_of(white_noise(1000, 4), SignalKind::generic, 240);
    const auto a = autocorrelation(s, 10);
    EXPECT_EQ(a.values[0], 1.0);
    for (double v : a.values)
        EXPECT_LE(std::fabs(v), 1.0);
}

TEST(Autocorrelation, AlternatingSeries)
{
    std::vector<double> x(1000);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = i % 2 == 0 ? 1.0 : -1.0;
    const auto a = autocorrelation(signal_of(x, SignalKind::generic, 240), 2);
    EXPECT_DOUBLE_EQ(a.values[1], -1.0);
    EXPECT_DOUBLE_EQ(a.values[2], 1.0);
}

TEST(Autocorrelation, WhiteNoiseStaysInNullBand)
{
    const std::size_t n = 100000;
    const auto a = autocorrelation(signal_of(white_noise(n, 77), SignalKind::generic, 240), 100);
    const double band = 4.0 / std::sqrt(static_cast<double>(n));
    int inside = 0;
    for (std::size_t lag = 1; lag <= 100; ++lag)
        inside += std::fabs(a.values[lag]) < band ? 1 : 0;
    EXPECT_GE(inside, 95);
}

TEST(Autocorrelation, ConstantSeriesIsDegenerate)
{
    try {
        autocorrelation(signal_of(std::vector<double>(100, 3.0), SignalKind::generic, 240), 5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::degenerate);
    }
}

TEST(Autocorrelation, NeedsMorePointsThanLags)
{
    EXPECT_THROW(autocorrelation(signal_of({1, 2, 3}, SignalKind::generic, 240), 3), Error);
}

TEST(Autocorrelation, ReversalSymmetry)
{
    auto x = fractional_gaussian_noise(4096, 0.7, 3);
    auto y = x;
    std::reverse(y.begin(), y.end());
    const auto a = autocorrelation(signal_of(x, SignalKind::generic, 240), 300);
    const auto b = autocorrelation(signal_of(y, SignalKind::generic, 240), 300);
    for (std::size_t lag = 0; lag <= 300; ++lag)
        EXPECT_NEAR(a.values[lag], b.values[lag], 1e-10);
}

TEST(Autocorrelation, GapsUseTradingTimeLags)
{
    // positions 0, 1, 3: only one pair at lag 1, one at lag 2, one at lag 3
    SignalSeries s;
    s.slots_per_day = 10;
    s.values = {1.0, -1.0, 2.0};
    s.day_index = {0, 0, 0};
    s.minute_of_day = {0, 1, 3};
    const auto a = autocorrelation(s, 2);
    EXPECT_EQ(a.pair_counts, (std::vector<std::size_t>{3, 1, 1}));

    AcfOptions bridged;
    bridged.bridge_gaps = true;
    const auto b = autocorrelation(s, 2, bridged);
    EXPECT_EQ(b.pair_counts, (std::vector<std::size_t>{3, 2, 1}));
}

TEST(Autocorrelation, ThreadCountDoesNotChangeValues)
{
    const auto s = signal_of(white_noise(20000, 8), SignalKind::generic, 240);
    AcfOptions one, four;
    one.threads = 1;
    four.threads = 4;
    EXPECT_EQ(autocorrelation(s, 500, one).values, autocorrelation(s, 500, four).values);
}

TEST(SignalCsv, RoundTrip)
{
    auto s = signal_of(white_noise(700, 2), SignalKind::adjusted_volatility, 240);
    std::ostringstream out;
    write_signal_csv(out, s);
    const auto back = read_signal_csv(out.str());
    EXPECT_EQ(back.values, s.values);
    EXPECT_EQ(back.kind, s.kind);
    EXPECT_EQ(back.day_index, s.day_index);
    EXPECT_EQ(back.minute_of_day, s.minute_of_day);
    EXPECT_THROW(read_signal_csv("day,minute,value\n"), Error);
    EXPECT_THROW(read_signal_csv("day,minute,value,kind\n0,0,1,nonsense\n"), Error);
}

TEST(AcfCsv, SkipsLagsWithoutPairs)
{
    SignalSeries s;
    s.slots_per_day = 10;
    s.values = {1.0, -1.0, 2.0, 0.5};
    s.day_index = {0, 0, 0, 0};
    s.minute_of_day = {0, 1, 2, 9};
    const auto a = autocorrelation(s, 3);
    EXPECT_EQ(a.pair_counts[3], 0u);
    std::ostringstream out;
    write_acf_csv(out, a);
    const auto text = out.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4); // header + lags 0..2
}
