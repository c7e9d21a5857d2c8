#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace cosmem {

// Seconds since the Unix epoch, always UTC. Everything that crosses a module
// boundary uses this; offsets in input files are folded in at parse time.
struct UtcTime {
  std::int64_t seconds = 0;

  friend auto operator<=>(const UtcTime&, const UtcTime&) = default;
};

inline UtcTime operator+(UtcTime t, std::int64_t s) { return {t.seconds + s}; }
inline UtcTime operator-(UtcTime t, std::int64_t s) { return {t.seconds - s}; }
inline std::int64_t operator-(UtcTime a, UtcTime b) {
  return a.seconds - b.seconds;
}

inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;
inline constexpr std::int64_t kSecondsPerWeek = 7 * kSecondsPerDay;

struct CivilDate {
  int year = 1970;
  int month = 1; // 1..12
  int day = 1;   // 1..31
};

// Proleptic Gregorian day count <-> civil date (Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d);
CivilDate civil_from_days(std::int64_t z);

// Accepts YYYY-MM-DDTHH:MM:SS followed by 'Z', '+HH:MM', '-HH:MM' or nothing
// (bare timestamps are taken as UTC). Fractional seconds are rejected; the
// data model is second resolution.
std::optional<UtcTime> parse_iso8601(std::string_view text);

// YYYY-MM-DDTHH:MM:SSZ
std::string format_iso8601(UtcTime t);

// Calendar floors, all UTC. Weeks are ISO weeks and start Monday 00:00.
UtcTime floor_hour(UtcTime t);
UtcTime floor_day(UtcTime t);
UtcTime floor_week(UtcTime t);
UtcTime floor_month(UtcTime t);

// Start of the month n months after the month containing t.
UtcTime add_months(UtcTime month_start, int n);

} // namespace cosmem
