#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace ozonecast {

/// Proleptic Gregorian calendar date at daily resolution.
struct Date {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..days_in_month

    static bool is_leap(int year);
    static int days_in_month(int year, int month);

    /// Strict ISO-8601 "YYYY-MM-DD"; nullopt on any malformed or
    /// out-of-range component.
    static std::optional<Date> parse(std::string_view text);

    /// Days since 1970-01-01 (negative before the epoch).
    long serial() const;
    static Date from_serial(long days);

    /// Monday = 0 .. Sunday = 6.
    int day_of_week() const;

    std::string to_string() const;

    auto operator<=>(const Date&) const = default;
};

}  // namespace ozonecast
