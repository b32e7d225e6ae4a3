#include "sentitrade/date.hpp"

#include <charconv>
#include <cstdio>

namespace sentitrade {

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  auto res = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return res.ec == std::errc{};
}

}  // namespace

std::string Date::iso() const {
  const auto d = ymd();
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, m) || !read_int(text, 8, 2, d)) {
    return std::nullopt;
  }
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{std::chrono::sys_days{ymd}};
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  auto date = parse_date(text.substr(0, 10));
  if (!date) return std::nullopt;
  Timestamp ts{date->sys_days()};
  if (text.size() == 10) return ts;

  if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
  int hh = 0, mm = 0, ss = 0;
  if (!read_int(text, 11, 2, hh) || text.size() < 16 || text[13] != ':' ||
      !read_int(text, 14, 2, mm)) {
    return std::nullopt;
  }
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    if (!read_int(text, pos + 1, 2, ss)) return std::nullopt;
    pos += 3;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  ts += std::chrono::hours{hh} + std::chrono::minutes{mm} + std::chrono::seconds{ss};

  if (pos == text.size()) return ts;
  if (text[pos] == 'Z' && pos + 1 == text.size()) return ts;
  if (text[pos] == '+' || text[pos] == '-') {
    const int sign = text[pos] == '+' ? 1 : -1;
    int oh = 0, om = 0;
    if (!read_int(text, pos + 1, 2, oh)) return std::nullopt;
    std::size_t mpos = pos + 3;
    if (mpos < text.size() && text[mpos] == ':') ++mpos;
    if (!read_int(text, mpos, 2, om) || mpos + 2 != text.size()) return std::nullopt;
    // Local time minus offset gives UTC.
    ts -= sign * (std::chrono::hours{oh} + std::chrono::minutes{om});
    return ts;
  }
  return std::nullopt;
}

Date local_date(Timestamp ts, int utc_offset_minutes) {
  const auto shifted = ts + std::chrono::minutes{utc_offset_minutes};
  return Date{std::chrono::floor<std::chrono::days>(shifted)};
}

}  // namespace sentitrade
