#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace sentitrade {

/// Calendar day. Stored as a day count so comparisons and offsets are cheap.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
  constexpr Date(int year, unsigned month, unsigned day)
      : days_(std::chrono::year_month_day{std::chrono::year{year},
                                          std::chrono::month{month},
                                          std::chrono::day{day}}) {}

  constexpr std::chrono::sys_days sys_days() const { return days_; }
  constexpr std::chrono::year_month_day ymd() const { return {days_}; }
  constexpr Date plus_days(int n) const { return Date{days_ + std::chrono::days{n}}; }
  std::chrono::weekday weekday() const { return std::chrono::weekday{days_}; }

  /// "YYYY-MM-DD"
  std::string iso() const;

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

/// Strict ISO-8601 calendar date ("2020-01-02"). Rejects impossible days.
std::optional<Date> parse_date(std::string_view text);

using Timestamp = std::chrono::sys_seconds;

/// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS[.fff]]" with optional "Z" or
/// "+HH:MM"/"-HH:MM" offset; a space may replace the 'T'. Result is UTC.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Calendar day of `ts` after shifting by `utc_offset_minutes`.
Date local_date(Timestamp ts, int utc_offset_minutes);

}  // namespace sentitrade
