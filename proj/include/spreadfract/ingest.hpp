#ifndef SPREADFRACT_INGEST_HPP
#define SPREADFRACT_INGEST_HPP

// Tick quotes in, one rescaled spread per trading minute out.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "detail/text.hpp"
#include "error.hpp"

namespace spreadfract {

/// Calendar date plus second of day. Quotes carry no time zone.
struct Timestamp {
    std::chrono::sys_days date{};
    std::int32_t second_of_day = 0;

    friend bool operator==(const Timestamp&, const Timestamp&) = default;
    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// Parses `YYYY-MM-DD HH:MM:SS` (a `T` separator is also accepted).
inline std::optional<Timestamp> parse_timestamp(std::string_view s)
{
    s = detail::trim(s);
    if (s.size() != 19 || s[4] != '-' || s[7] != '-' || (s[10] != ' ' && s[10] != 'T')
        || s[13] != ':' || s[16] != ':')
        return std::nullopt;
    const auto y = detail::parse_int<int>(s.substr(0, 4));
    const auto mo = detail::parse_int<unsigned>(s.substr(5, 2));
    const auto d = detail::parse_int<unsigned>(s.substr(8, 2));
    const auto h = detail::parse_int<int>(s.substr(11, 2));
    const auto mi = detail::parse_int<int>(s.substr(14, 2));
    const auto se = detail::parse_int<int>(s.substr(17, 2));
    if (!y || !mo || !d || !h || !mi || !se)
        return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{*mo},
                                          std::chrono::day{*d}};
    if (!ymd.ok() || *h > 23 || *mi > 59 || *se > 59)
        return std::nullopt;
    return Timestamp{std::chrono::sys_days{ymd}, *h * 3600 + *mi * 60 + *se};
}

inline std::string format_date(std::chrono::sys_days date)
{
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

/// One quote observation: best ask and best bid at a point in time.
struct TickRecord {
    Timestamp time;
    double ask = 0.0;
    double bid = 0.0;
};

/// a(t') - b(t'). Non-negative for records that passed parse_ticks.
constexpr double instantaneous_spread(const TickRecord& tick) noexcept
{
    return tick.ask - tick.bid;
}

// ---------------------------------------------------------------------------
// Tick CSV parsing

enum class OrderingPolicy { reject, stable_sort };

struct TickFormat {
    char delimiter = ',';
    OrderingPolicy ordering = OrderingPolicy::reject;
    /// Throw on the first malformed or crossed line instead of skipping it.
    bool strict = false;
};

struct Diagnostic {
    std::size_t line = 0; // 0 when not tied to a line
    std::string message;
};

struct TickParseResult {
    std::vector<TickRecord> ticks;
    std::vector<Diagnostic> diagnostics;
    std::size_t rejected = 0;
};

namespace detail {

inline std::string line_message(std::size_t line, const std::string& what)
{
    return "line " + std::to_string(line) + ": " + what;
}

} // namespace detail

/// Reads a delimited stream whose header names `timestamp`, `ask` and `bid`
/// columns (any order, extra columns ignored). Malformed lines, non-positive
/// prices and crossed quotes (bid > ask) are skipped and reported with their
/// line numbers.
inline TickParseResult parse_ticks(std::string_view text, const TickFormat& format = {})
{
    TickParseResult result;
    detail::LineCursor cursor(text);
    std::string_view line;

    bool have_header = false;
    while (cursor.next(line)) {
        if (!detail::trim(line).empty()) {
            have_header = true;
            break;
        }
    }
    if (!have_header) {
        result.diagnostics.push_back({0, "empty tick input"});
        return result;
    }

    const auto header = detail::split(line, format.delimiter);
    std::array<std::optional<std::size_t>, 3> column; // timestamp, ask, bid
    constexpr std::array<std::string_view, 3> names{"timestamp", "ask", "bid"};
    for (std::size_t i = 0; i < header.size(); ++i) {
        for (std::size_t c = 0; c < names.size(); ++c) {
            if (header[i] == names[c])
                column[c] = i;
        }
    }
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (!column[c])
            fail(ErrorKind::format, detail::line_message(cursor.line_number(),
                                                         "header lacks a '" + std::string(names[c])
                                                             + "' column"));
    }
    const std::size_t width = std::max({*column[0], *column[1], *column[2]}) + 1;

    auto reject = [&](std::string what) {
        if (format.strict)
            fail(ErrorKind::format, detail::line_message(cursor.line_number(), what));
        result.diagnostics.push_back({cursor.line_number(), std::move(what)});
        ++result.rejected;
    };

    std::optional<std::size_t> first_disorder;
    while (cursor.next(line)) {
        if (detail::trim(line).empty())
            continue;
        const auto fields = detail::split(line, format.delimiter);
        if (fields.size() < width) {
            reject("expected at least " + std::to_string(width) + " fields");
            continue;
        }
        const auto time = parse_timestamp(fields[*column[0]]);
        const auto ask = detail::parse_double(fields[*column[1]]);
        const auto bid = detail::parse_double(fields[*column[2]]);
        if (!time) {
            reject("malformed timestamp '" + std::string(fields[*column[0]]) + "'");
            continue;
        }
        if (!ask || !bid) {
            reject("malformed price");
            continue;
        }
        if (!(*ask > 0.0) || !(*bid > 0.0)) {
            reject("non-positive price");
            continue;
        }
        if (*bid > *ask) {
            reject("crossed quote: bid " + std::string(fields[*column[2]]) + " > ask "
                   + std::string(fields[*column[1]]));
            continue;
        }
        if (!result.ticks.empty() && *time < result.ticks.back().time && !first_disorder)
            first_disorder = cursor.line_number();
        result.ticks.push_back({*time, *ask, *bid});
    }

    if (first_disorder) {
        if (format.ordering == OrderingPolicy::reject)
            fail(ErrorKind::ordering,
                 detail::line_message(*first_disorder, "timestamp earlier than previous record"));
        std::stable_sort(result.ticks.begin(), result.ticks.end(),
                         [](const TickRecord& a, const TickRecord& b) { return a.time < b.time; });
        result.diagnostics.push_back(
            {*first_disorder, "timestamps out of order; records stable-sorted"});
    }
    if (result.ticks.empty())
        result.diagnostics.push_back({0, "no tick records"});
    return result;
}

inline TickParseResult parse_ticks(std::istream& in, const TickFormat& format = {})
{
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_ticks(std::string_view(text), format);
}

// ---------------------------------------------------------------------------
// Trading calendar

/// Wall-clock interval [open, close) in minutes after midnight.
struct Session {
    int open = 0;
    int close = 0;

    int length() const noexcept { return close - open; }
};

class SessionCalendar {
public:
    /// Two 120-minute sessions, 09:30-11:30 and 13:00-15:00.
    SessionCalendar() : SessionCalendar({{9 * 60 + 30, 11 * 60 + 30}, {13 * 60, 15 * 60}}) {}

    explicit SessionCalendar(std::vector<Session> sessions) : sessions_(std::move(sessions))
    {
        if (sessions_.empty())
            fail(ErrorKind::config, "calendar needs at least one session");
        int previous_close = -1;
        for (const auto& s : sessions_) {
            if (s.open < 0 || s.close > 24 * 60 || s.open >= s.close)
                fail(ErrorKind::config, "session bounds must satisfy 0 <= open < close <= 24:00");
            if (s.open < previous_close)
                fail(ErrorKind::config, "sessions must be ordered and disjoint");
            previous_close = s.close;
            minutes_per_day_ += s.length();
        }
    }

    int minutes_per_day() const noexcept { return minutes_per_day_; }
    const std::vector<Session>& sessions() const noexcept { return sessions_; }

    /// Trading-minute ordinal in [0, minutes_per_day) for a second of the day,
    /// or nullopt outside every session. Minutes are half-open [m, m+1).
    std::optional<int> trading_minute(std::int32_t second_of_day) const noexcept
    {
        const int minute = static_cast<int>(second_of_day / 60);
        int offset = 0;
        for (const auto& s : sessions_) {
            if (minute >= s.open && minute < s.close)
                return offset + (minute - s.open);
            offset += s.length();
        }
        return std::nullopt;
    }

    /// "HH:MM-HH:MM[,HH:MM-HH:MM...]"
    static SessionCalendar parse(std::string_view spec)
    {
        auto clock = [&](std::string_view hm) -> int {
            hm = detail::trim(hm);
            const auto colon = hm.find(':');
            std::optional<int> h, m;
            if (colon != std::string_view::npos) {
                h = detail::parse_int<int>(hm.substr(0, colon));
                m = detail::parse_int<int>(hm.substr(colon + 1));
            }
            if (!h || !m || *h < 0 || *h > 24 || *m < 0 || *m > 59)
                fail(ErrorKind::config, "bad clock time '" + std::string(hm) + "' in calendar");
            return *h * 60 + *m;
        };
        std::vector<Session> sessions;
        for (auto part : detail::split(spec, ',')) {
            const auto dash = part.find('-');
            if (dash == std::string_view::npos)
                fail(ErrorKind::config, "calendar session '" + std::string(part)
                                            + "' is not of the form HH:MM-HH:MM");
            sessions.push_back({clock(part.substr(0, dash)), clock(part.substr(dash + 1))});
        }
        return SessionCalendar(std::move(sessions));
    }

    std::string to_string() const
    {
        std::string out;
        char buf[48];
        for (const auto& s : sessions_) {
            if (!out.empty())
                out += ',';
            std::snprintf(buf, sizeof buf, "%02d:%02d-%02d:%02d", s.open / 60, s.open % 60,
                          s.close / 60, s.close % 60);
            out += buf;
        }
        return out;
    }

private:
    std::vector<Session> sessions_;
    int minutes_per_day_ = 0;
};

// ---------------------------------------------------------------------------
// Rescaled spread

enum class ExclusionReason { no_ticks, zero_spread };

struct ExcludedMinute {
    int day = 0;
    int minute = 0;
    ExclusionReason reason = ExclusionReason::no_ticks;
};

/// Mean spread per trading interval. Intervals without ticks or with zero
/// mean spread are left out of `values` and listed in `excluded`.
struct SpreadSeries {
    std::vector<double> values;
    std::vector<int> day_index;
    std::vector<int> minute_of_day;
    /// Intervals per trading day (minutes_per_day / delta_t).
    int slots_per_day = 240;
    int day_count = 0;
    std::vector<std::chrono::sys_days> dates; // one per day ordinal, may be empty
    std::vector<ExcludedMinute> excluded;
    std::size_t empty_minutes = 0;
    std::size_t zero_spread_minutes = 0;
    std::size_t dropped_ticks = 0;
    /// Day ordinals with at least one excluded interval.
    std::vector<int> partial_days;

    std::size_t size() const noexcept { return values.size(); }
};

enum class OutsideSessionPolicy { drop, error };

struct RescaleOptions {
    int delta_t = 1; // minutes per interval
    OutsideSessionPolicy outside = OutsideSessionPolicy::drop;
};

/// S(t') = (1/N) sum_i S~_i(t') over the N ticks of each trading interval.
/// Ticks must be sorted by time. Every date that has at least one in-session
/// tick contributes a full day of intervals; days never merge.
inline SpreadSeries rescale_to_minutes(const std::vector<TickRecord>& ticks,
                                       const SessionCalendar& calendar,
                                       const RescaleOptions& options = {})
{
    if (options.delta_t < 1 || calendar.minutes_per_day() % options.delta_t != 0)
        fail(ErrorKind::config, "delta-t must be a positive divisor of the trading-day length ("
                                    + std::to_string(calendar.minutes_per_day()) + " minutes)");
    for (std::size_t i = 1; i < ticks.size(); ++i) {
        if (ticks[i].time < ticks[i - 1].time)
            fail(ErrorKind::ordering, "ticks are not sorted by timestamp");
    }

    SpreadSeries out;
    out.slots_per_day = calendar.minutes_per_day() / options.delta_t;
    const auto slots = static_cast<std::size_t>(out.slots_per_day);

    std::vector<std::vector<double>> bucket(slots);
    auto flush_day = [&](std::chrono::sys_days date) {
        const int day = out.day_count++;
        out.dates.push_back(date);
        bool partial = false;
        for (std::size_t slot = 0; slot < slots; ++slot) {
            auto& spreads = bucket[slot];
            const int minute = static_cast<int>(slot);
            if (spreads.empty()) {
                out.excluded.push_back({day, minute, ExclusionReason::no_ticks});
                ++out.empty_minutes;
                partial = true;
                continue;
            }
            // Sorting fixes the summation order, so the mean does not depend on
            // the arrival order of ticks within the interval.
            std::sort(spreads.begin(), spreads.end());
            double sum = 0.0;
            for (double s : spreads)
                sum += s;
            const double mean = std::clamp(sum / static_cast<double>(spreads.size()),
                                           spreads.front(), spreads.back());
            spreads.clear();
            if (!(mean > 0.0)) {
                out.excluded.push_back({day, minute, ExclusionReason::zero_spread});
                ++out.zero_spread_minutes;
                partial = true;
                continue;
            }
            out.values.push_back(mean);
            out.day_index.push_back(day);
            out.minute_of_day.push_back(minute);
        }
        if (partial)
            out.partial_days.push_back(day);
    };

    std::optional<std::chrono::sys_days> current;
    for (const auto& tick : ticks) {
        const auto minute = calendar.trading_minute(tick.time.second_of_day);
        if (!minute) {
            if (options.outside == OutsideSessionPolicy::error)
                fail(ErrorKind::format, "tick at " + format_date(tick.time.date)
                                            + " second " + std::to_string(tick.time.second_of_day)
                                            + " lies outside every trading session");
            ++out.dropped_ticks;
            continue;
        }
        if (current && *current != tick.time.date)
            flush_day(*current);
        current = tick.time.date;
        bucket[static_cast<std::size_t>(*minute / options.delta_t)].push_back(
            instantaneous_spread(tick));
    }
    if (current)
        flush_day(*current);
    return out;
}

// ---------------------------------------------------------------------------
// SpreadSeries CSV: `day,minute,spread`, excluded intervals omitted.

inline void write_spread_csv(std::ostream& out, const SpreadSeries& series)
{
    out << "day,minute,spread\n";
    for (std::size_t i = 0; i < series.size(); ++i)
        out << series.day_index[i] << ',' << series.minute_of_day[i] << ','
            << detail::format_double(series.values[i]) << '\n';
}

/// Rebuilds values and alignment. Gaps in the (day, minute) lattice are
/// recorded as no-tick exclusions.
inline SpreadSeries read_spread_csv(std::string_view text, int slots_per_day = 240)
{
    if (slots_per_day < 1)
        fail(ErrorKind::config, "slots per day must be positive");
    detail::LineCursor cursor(text);
    std::string_view line;
    if (!cursor.next(line) || detail::split(line) != std::vector<std::string_view>{"day", "minute", "spread"})
        fail(ErrorKind::format, "spread CSV must start with header 'day,minute,spread'");

    SpreadSeries out;
    out.slots_per_day = slots_per_day;
    while (cursor.next(line)) {
        if (detail::trim(line).empty())
            continue;
        const auto f = detail::split(line);
        const auto day = f.size() == 3 ? detail::parse_int<int>(f[0]) : std::nullopt;
        const auto minute = f.size() == 3 ? detail::parse_int<int>(f[1]) : std::nullopt;
        const auto value = f.size() == 3 ? detail::parse_double(f[2]) : std::nullopt;
        if (!day || !minute || !value || *day < 0 || *minute < 0 || *minute >= slots_per_day)
            fail(ErrorKind::format, detail::line_message(cursor.line_number(), "malformed spread row"));
        if (!(*value > 0.0))
            fail(ErrorKind::format, detail::line_message(cursor.line_number(), "spread must be positive"));
        if (!out.values.empty()) {
            const auto prev = std::pair(out.day_index.back(), out.minute_of_day.back());
            if (std::pair(*day, *minute) <= prev)
                fail(ErrorKind::ordering,
                     detail::line_message(cursor.line_number(), "rows must be ordered by (day, minute)"));
        }
        out.values.push_back(*value);
        out.day_index.push_back(*day);
        out.minute_of_day.push_back(*minute);
    }

    out.day_count = out.values.empty() ? 0 : out.day_index.back() + 1;
    std::size_t k = 0;
    for (int day = 0; day < out.day_count; ++day) {
        bool partial = false;
        for (int minute = 0; minute < slots_per_day; ++minute) {
            if (k < out.size() && out.day_index[k] == day && out.minute_of_day[k] == minute) {
                ++k;
                continue;
            }
            out.excluded.push_back({day, minute, ExclusionReason::no_ticks});
            ++out.empty_minutes;
            partial = true;
        }
        if (partial)
            out.partial_days.push_back(day);
    }
    return out;
}

} // namespace spreadfract

#endif // SPREADFRACT_INGEST_HPP
