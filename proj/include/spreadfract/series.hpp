#ifndef SPREADFRACT_SERIES_HPP
#define SPREADFRACT_SERIES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "detail/parallel.hpp"
#include "detail/text.hpp"
#include "error.hpp"
#include "ingest.hpp"

namespace spreadfract {

enum class SignalKind { raw_return, raw_volatility, adjusted_return, adjusted_volatility, generic };

inline const char* to_string(SignalKind kind) noexcept
{
    switch (kind) {
    case SignalKind::raw_return: return "raw_return";
    case SignalKind::raw_volatility: return "raw_volatility";
    case SignalKind::adjusted_return: return "adjusted_return";
    case SignalKind::adjusted_volatility: return "adjusted_volatility";
    case SignalKind::generic: return "generic";
    }
    return "generic";
}

inline std::optional<SignalKind> parse_signal_kind(std::string_view s) noexcept
{
    for (auto kind : {SignalKind::raw_return, SignalKind::raw_volatility,
                      SignalKind::adjusted_return, SignalKind::adjusted_volatility,
                      SignalKind::generic}) {
        if (s == to_string(kind))
            return kind;
    }
    return std::nullopt;
}

/// Uniformly sampled real series. Each element keeps the (day, slot) position
/// of the interval it belongs to, so gaps and day boundaries stay visible.
struct SignalSeries {
    std::vector<double> values;
    SignalKind kind = SignalKind::generic;
    std::vector<int> day_index;
    std::vector<int> minute_of_day;
    int slots_per_day = 240;

    std::size_t size() const noexcept { return values.size(); }

    /// Position on the concatenated trading-time axis.
    long long position(std::size_t i) const noexcept
    {
        return static_cast<long long>(day_index[i]) * slots_per_day + minute_of_day[i];
    }

    /// A gap-free series laid out over consecutive trading days.
    static SignalSeries contiguous(std::vector<double> values,
                                   SignalKind kind = SignalKind::generic, int slots_per_day = 240)
    {
        SignalSeries s;
        s.kind = kind;
        s.slots_per_day = slots_per_day;
        s.day_index.resize(values.size());
        s.minute_of_day.resize(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            s.day_index[i] = static_cast<int>(i / static_cast<std::size_t>(slots_per_day));
            s.minute_of_day[i] = static_cast<int>(i % static_cast<std::size_t>(slots_per_day));
        }
        s.values = std::move(values);
        return s;
    }
};

struct GapOptions {
    /// Treat consecutive stored elements as adjacent even when excluded
    /// intervals lie between them. Day boundaries are never bridged for returns.
    bool bridge_gaps = false;
};

/// R~(t') = ln(S(t') / S(t'-1)). A return exists only where the previous
/// interval of the same day is present (or, with bridge_gaps, any earlier
/// interval of the same day).
inline SignalSeries spread_return(const SpreadSeries& spreads, const GapOptions& options = {})
{
    SignalSeries out;
    out.kind = SignalKind::raw_return;
    out.slots_per_day = spreads.slots_per_day;
    for (std::size_t i = 1; i < spreads.size(); ++i) {
        if (spreads.day_index[i] != spreads.day_index[i - 1])
            continue;
        if (!options.bridge_gaps && spreads.minute_of_day[i] != spreads.minute_of_day[i - 1] + 1)
            continue;
        if (!(spreads.values[i] > 0.0) || !(spreads.values[i - 1] > 0.0))
            fail(ErrorKind::invariant, "spread series holds a non-positive value");
        out.values.push_back(std::log(spreads.values[i] / spreads.values[i - 1]));
        out.day_index.push_back(spreads.day_index[i]);
        out.minute_of_day.push_back(spreads.minute_of_day[i]);
    }
    if (out.values.empty())
        fail(ErrorKind::insufficient_data,
             "spread return needs at least two adjacent intervals within one day");
    return out;
}

/// V~(t') = |R~(t')|.
inline SignalSeries spread_volatility(const SignalSeries& returns)
{
    if (returns.kind != SignalKind::raw_return)
        fail(ErrorKind::type_misuse, std::string("spread volatility expects a raw_return series, got ")
                                         + to_string(returns.kind));
    SignalSeries out = returns;
    out.kind = SignalKind::raw_volatility;
    for (double& v : out.values)
        v = std::fabs(v);
    return out;
}

// ---------------------------------------------------------------------------
// Intraday pattern

/// Per-slot average over the days that have a value in that slot.
struct IntradayPattern {
    std::vector<double> values;
    std::vector<std::size_t> days_counted;
    SignalKind source_kind = SignalKind::generic;

    bool defined(std::size_t slot) const noexcept
    {
        return slot < days_counted.size() && days_counted[slot] > 0;
    }
};

inline IntradayPattern intraday_pattern(const SignalSeries& signal)
{
    if (signal.slots_per_day < 1)
        fail(ErrorKind::config, "slots per day must be positive");
    const auto slots = static_cast<std::size_t>(signal.slots_per_day);
    IntradayPattern pattern;
    pattern.source_kind = signal.kind;
    pattern.values.assign(slots, 0.0);
    pattern.days_counted.assign(slots, 0);
    for (std::size_t i = 0; i < signal.size(); ++i) {
        const auto slot = static_cast<std::size_t>(signal.minute_of_day[i]);
        pattern.values[slot] += signal.values[i];
        ++pattern.days_counted[slot];
    }
    for (std::size_t slot = 0; slot < slots; ++slot) {
        if (pattern.days_counted[slot] > 0)
            pattern.values[slot] /= static_cast<double>(pattern.days_counted[slot]);
        else
            pattern.values[slot] = std::numeric_limits<double>::quiet_NaN();
    }
    return pattern;
}

inline IntradayPattern intraday_pattern(const SignalSeries& signal, const SessionCalendar& calendar)
{
    if (calendar.minutes_per_day() % signal.slots_per_day != 0)
        fail(ErrorKind::config, "signal slots per day do not match the calendar");
    return intraday_pattern(signal);
}

struct AdjustedSignal {
    SignalSeries series;
    /// Elements dropped because their slot pattern was undefined or |M| < epsilon.
    std::size_t skipped = 0;
    std::vector<std::size_t> skipped_indices;
};

/// Smallest pattern magnitude accepted as a divisor.
inline constexpr double pattern_epsilon = 1e-12;

/// adjusted(t') = signal(t') / M(t').
inline AdjustedSignal remove_intraday_pattern(const SignalSeries& signal,
                                              const IntradayPattern& pattern)
{
    if (pattern.values.size() != static_cast<std::size_t>(signal.slots_per_day))
        fail(ErrorKind::config, "pattern length differs from the signal's slots per day");
    if (pattern.source_kind != signal.kind)
        fail(ErrorKind::type_misuse, std::string("pattern was built from ")
                                         + to_string(pattern.source_kind) + ", signal is "
                                         + to_string(signal.kind));

    AdjustedSignal out;
    out.series.slots_per_day = signal.slots_per_day;
    switch (signal.kind) {
    case SignalKind::raw_return: out.series.kind = SignalKind::adjusted_return; break;
    case SignalKind::raw_volatility: out.series.kind = SignalKind::adjusted_volatility; break;
    default: out.series.kind = signal.kind; break;
    }
    for (std::size_t i = 0; i < signal.size(); ++i) {
        const auto slot = static_cast<std::size_t>(signal.minute_of_day[i]);
        const double m = pattern.values[slot];
        if (!pattern.defined(slot) || !(std::fabs(m) >= pattern_epsilon)) {
            ++out.skipped;
            out.skipped_indices.push_back(i);
            continue;
        }
        out.series.values.push_back(signal.values[i] / m);
        out.series.day_index.push_back(signal.day_index[i]);
        out.series.minute_of_day.push_back(signal.minute_of_day[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Autocorrelation

struct AutocorrelationCurve {
    std::vector<std::size_t> lags;
    std::vector<double> values;           // NaN where no pair exists at that lag
    std::vector<std::size_t> pair_counts;
    SignalKind series_kind = SignalKind::generic;
    /// Lags whose raw estimate fell outside [-1, 1] and was clamped.
    std::size_t clamped = 0;
};

struct AcfOptions {
    /// Measure lags in element count instead of trading-time minutes.
    bool bridge_gaps = false;
    unsigned threads = 0;
};

/// min(length/4, 10 x slots_per_day)
inline std::size_t default_max_lag(const SignalSeries& signal)
{
    return std::min(signal.size() / 4, static_cast<std::size_t>(10 * signal.slots_per_day));
}

/// A(t) = [<x(t') x(t'+t)> - <x>^2] / sigma^2 with sigma^2 = <x^2> - <x>^2.
/// <x> and sigma^2 run over the whole series; the lagged product averages
/// over every pair that is exactly t apart on the trading-time axis.
inline AutocorrelationCurve autocorrelation(const SignalSeries& signal, std::size_t max_lag,
                                            const AcfOptions& options = {})
{
    const std::size_t n = signal.size();
    if (n <= max_lag)
        fail(ErrorKind::insufficient_data, "autocorrelation needs more points than max_lag ("
                                               + std::to_string(n) + " <= "
                                               + std::to_string(max_lag) + ")");

    double mean = 0.0;
    for (double v : signal.values)
        mean += v;
    mean /= static_cast<double>(n);

    // Lay the centered series on a dense axis; NaN marks a missing interval.
    std::vector<double> axis;
    if (options.bridge_gaps || n == 0) {
        axis.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            axis[i] = signal.values[i] - mean;
    } else {
        const long long first = signal.position(0);
        const long long span = signal.position(n - 1) - first + 1;
        axis.assign(static_cast<std::size_t>(span), std::numeric_limits<double>::quiet_NaN());
        for (std::size_t i = 0; i < n; ++i) {
            const long long pos = signal.position(i) - first;
            if (pos < 0 || (i > 0 && signal.position(i) <= signal.position(i - 1)))
                fail(ErrorKind::ordering, "signal positions must be strictly increasing");
            axis[static_cast<std::size_t>(pos)] = signal.values[i] - mean;
        }
    }

    // <x x_t> - <x>^2 expanded around the mean: <y y_t> + mean (<y> + <y_t>),
    // which keeps the literal definition without the cancellation of x^2 sums.
    auto lagged_moment = [&](std::size_t lag, std::size_t& pairs) {
        double cross = 0.0, head = 0.0, tail = 0.0;
        pairs = 0;
        for (std::size_t i = 0; i + lag < axis.size(); ++i) {
            const double a = axis[i], b = axis[i + lag];
            if (std::isnan(a) || std::isnan(b))
                continue;
            cross += a * b;
            head += a;
            tail += b;
            ++pairs;
        }
        if (pairs == 0)
            return std::numeric_limits<double>::quiet_NaN();
        const double k = static_cast<double>(pairs);
        return cross / k + mean * (head / k + tail / k);
    };

    std::size_t all_pairs = 0;
    const double variance = lagged_moment(0, all_pairs);
    bool constant = true;
    for (double v : signal.values)
        constant = constant && v == signal.values.front();
    if (constant || !(variance > 0.0))
        fail(ErrorKind::degenerate, "autocorrelation undefined for a zero-variance series");

    AutocorrelationCurve curve;
    curve.series_kind = signal.kind;
    curve.lags.resize(max_lag + 1);
    curve.values.resize(max_lag + 1);
    curve.pair_counts.resize(max_lag + 1);
    detail::parallel_for(max_lag + 1, options.threads, [&](std::size_t lag) {
        curve.lags[lag] = lag;
        curve.values[lag] = lagged_moment(lag, curve.pair_counts[lag]) / variance;
    });
    for (double& v : curve.values) {
        if (v > 1.0 || v < -1.0) {
            v = std::clamp(v, -1.0, 1.0);
            ++curve.clamped;
        }
    }
    return curve;
}

// ---------------------------------------------------------------------------
// CSV

/// `day,minute,value,kind`
inline void write_signal_csv(std::ostream& out, const SignalSeries& signal)
{
    out << "day,minute,value,kind\n";
    const char* kind = to_string(signal.kind);
    for (std::size_t i = 0; i < signal.size(); ++i)
        out << signal.day_index[i] << ',' << signal.minute_of_day[i] << ','
            << detail::format_double(signal.values[i]) << ',' << kind << '\n';
}

inline SignalSeries read_signal_csv(std::string_view text, int slots_per_day = 240)
{
    detail::LineCursor cursor(text);
    std::string_view line;
    if (!cursor.next(line)
        || detail::split(line) != std::vector<std::string_view>{"day", "minute", "value", "kind"})
        fail(ErrorKind::format, "signal CSV must start with header 'day,minute,value,kind'");

    SignalSeries out;
    out.slots_per_day = slots_per_day;
    bool first = true;
    while (cursor.next(line)) {
        if (detail::trim(line).empty())
            continue;
        const auto f = detail::split(line);
        const bool arity = f.size() == 4;
        const auto day = arity ? detail::parse_int<int>(f[0]) : std::nullopt;
        const auto minute = arity ? detail::parse_int<int>(f[1]) : std::nullopt;
        const auto value = arity ? detail::parse_double(f[2]) : std::nullopt;
        const auto kind = arity ? parse_signal_kind(f[3]) : std::nullopt;
        if (!day || !minute || !value || !kind || *day < 0 || *minute < 0
            || *minute >= slots_per_day || !std::isfinite(*value))
            fail(ErrorKind::format, detail::line_message(cursor.line_number(), "malformed signal row"));
        if (first)
            out.kind = *kind;
        else if (*kind != out.kind)
            fail(ErrorKind::format, detail::line_message(cursor.line_number(), "mixed signal kinds"));
        first = false;
        out.values.push_back(*value);
        out.day_index.push_back(*day);
        out.minute_of_day.push_back(*minute);
    }
    return out;
}

/// `lag,acf`; lags without any pair are omitted.
inline void write_acf_csv(std::ostream& out, const AutocorrelationCurve& curve)
{
    out << "lag,acf\n";
    for (std::size_t i = 0; i < curve.lags.size(); ++i) {
        if (curve.pair_counts[i] == 0)
            continue;
        out << curve.lags[i] << ',' << detail::format_double(curve.values[i]) << '\n';
    }
}

} // namespace spreadfract

#endif // SPREADFRACT_SERIES_HPP
