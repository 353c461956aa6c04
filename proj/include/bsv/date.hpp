#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace bsv {

/// Proleptic Gregorian calendar date, serialized as YYYY-MM-DD.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    std::string to_string() const;

    /// Strict YYYY-MM-DD; rejects out-of-range months and days.
    static std::optional<Date> parse(std::string_view text);
    static std::optional<Date> from_parts(int year, int month, int day);
};

int days_in_month(int year, int month) noexcept;

}  // namespace bsv
