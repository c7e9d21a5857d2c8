#include "cosmem/time_util.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace cosmem {

std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);            // [0, 399]
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1; // [0, 365]
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;           // [0, 146096]
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {static_cast<int>(y + (m <= 2)), static_cast<int>(m),
          static_cast<int>(d)};
}

namespace {

bool parse_fixed_int(std::string_view s, std::size_t pos, std::size_t len,
                     int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = 0; i < len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[pos + i]))) return false;
  }
  auto res = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return res.ec == std::errc();
}

} // namespace

std::optional<UtcTime> parse_iso8601(std::string_view s) {
  int year, month, day, hour, minute, second;
  if (s.size() < 19) return std::nullopt;
  if (!parse_fixed_int(s, 0, 4, year) || s[4] != '-' ||
      !parse_fixed_int(s, 5, 2, month) || s[7] != '-' ||
      !parse_fixed_int(s, 8, 2, day) || s[10] != 'T' ||
      !parse_fixed_int(s, 11, 2, hour) || s[13] != ':' ||
      !parse_fixed_int(s, 14, 2, minute) || s[16] != ':' ||
      !parse_fixed_int(s, 17, 2, second)) {
    return std::nullopt;
  }
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 ||
      minute > 59 || second > 60) {
    return std::nullopt;
  }
  // Reject days that do not exist in the month.
  CivilDate back = civil_from_days(days_from_civil(year, month, day));
  if (back.year != year || back.month != month || back.day != day) {
    return std::nullopt;
  }
  std::int64_t offset = 0;
  std::string_view rest = s.substr(19);
  if (rest == "Z") {
    // UTC
  } else if (!rest.empty()) {
    if (rest.size() != 6 || (rest[0] != '+' && rest[0] != '-') ||
        rest[3] != ':') {
      return std::nullopt;
    }
    int oh, om;
    if (!parse_fixed_int(rest, 1, 2, oh) || !parse_fixed_int(rest, 4, 2, om) ||
        oh > 23 || om > 59) {
      return std::nullopt;
    }
    offset = (oh * 60 + om) * 60;
    if (rest[0] == '-') offset = -offset;
  }
  std::int64_t secs = days_from_civil(year, month, day) * kSecondsPerDay +
                      hour * 3600 + minute * 60 + second;
  return UtcTime{secs - offset};
}

std::string format_iso8601(UtcTime t) {
  std::int64_t days = t.seconds / kSecondsPerDay;
  std::int64_t rem = t.seconds % kSecondsPerDay;
  if (rem < 0) {
    rem += kSecondsPerDay;
    --days;
  }
  CivilDate d = civil_from_days(days);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", d.year,
                d.month, d.day, static_cast<int>(rem / 3600),
                static_cast<int>((rem / 60) % 60), static_cast<int>(rem % 60));
  return buf;
}

UtcTime floor_hour(UtcTime t) {
  std::int64_t r = t.seconds % kSecondsPerHour;
  if (r < 0) r += kSecondsPerHour;
  return {t.seconds - r};
}

UtcTime floor_day(UtcTime t) {
  std::int64_t r = t.seconds % kSecondsPerDay;
  if (r < 0) r += kSecondsPerDay;
  return {t.seconds - r};
}

UtcTime floor_week(UtcTime t) {
  // 1970-01-01 was a Thursday; shift so weeks begin on Monday.
  std::int64_t shifted = t.seconds + 3 * kSecondsPerDay;
  std::int64_t r = shifted % kSecondsPerWeek;
  if (r < 0) r += kSecondsPerWeek;
  return {t.seconds - r};
}

UtcTime floor_month(UtcTime t) {
  UtcTime day = floor_day(t);
  CivilDate d = civil_from_days(day.seconds / kSecondsPerDay);
  return {days_from_civil(d.year, d.month, 1) * kSecondsPerDay};
}

UtcTime add_months(UtcTime month_start, int n) {
  CivilDate d = civil_from_days(month_start.seconds / kSecondsPerDay);
  int m0 = d.year * 12 + (d.month - 1) + n;
  int y = m0 / 12;
  int m = m0 % 12;
  if (m < 0) {
    m += 12;
    --y;
  }
  return {days_from_civil(y, m + 1, 1) * kSecondsPerDay};
}

} // namespace cosmem
