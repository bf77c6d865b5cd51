#ifndef SPREADFRACT_TESTS_TICK_FIXTURE_HPP
#define SPREADFRACT_TESTS_TICK_FIXTURE_HPP

// Synthetic tick files with a planted intraday volatility pattern.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "spreadfract/synth.hpp"

namespace fixture {

/// U-shaped amplitude over the 240-minute default calendar: loud at the
/// open, the lunch reopen and the close.
inline double planted_amplitude(int minute)
{
    const double open = std::exp(-minute / 15.0);
    const double reopen = minute >= 120 ? std::exp(-(minute - 120) / 15.0) : 0.0;
    const double close = std::exp(-(239 - minute) / 15.0);
    return 0.2 + 2.0 * open + 1.2 * reopen + 1.5 * close;
}

/// "HH:MM:SS" of the middle of trading minute `m` in the default calendar.
inline std::string clock_of(int m)
{
    const int start = m < 120 ? 9 * 60 + 30 + m : 13 * 60 + (m - 120);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d:30", start / 60, start % 60);
    return buf;
}

/// One tick per trading minute; spread = 0.05 exp(a(m) eps). With
/// `constant`, every spread is 0.05.
inline std::string planted_ticks(int days, std::uint64_t seed, bool constant = false)
{
    using namespace std::chrono;
    spreadfract::Rng rng(seed);
    std::string text = "timestamp,ask,bid\n";
    sys_days day = sys_days{year{2004} / January / 5};
    for (int d = 0; d < days; ++d, day += std::chrono::days{1}) {
        const year_month_day ymd{day};
        char date[16];
        std::snprintf(date, sizeof date, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
        for (int m = 0; m < 240; ++m) {
            const double spread =
                constant ? 0.05 : 0.05 * std::exp(0.5 * planted_amplitude(m) * rng.normal());
            char row[96];
            std::snprintf(row, sizeof row, "%s %s,%.17g,10\n", date, clock_of(m).c_str(),
                          10.0 + spread);
            text += row;
        }
    }
    return text;
}

} // namespace fixture

#endif
