#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace stressmodel {

// Calendar day stored as days since 1970-01-01 (proleptic Gregorian).
class Date {
public:
    Date() = default;
    explicit constexpr Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

    static Date from_ymd(int year, int month, int day);          // throws InvalidArgument
    static std::optional<Date> parse_iso(const std::string& s);  // "YYYY-MM-DD"

    std::string to_iso() const;
    constexpr std::int32_t days() const noexcept { return days_; }

    Date operator+(int n) const { return Date(days_ + n); }
    int operator-(Date other) const { return days_ - other.days_; }
    auto operator<=>(const Date&) const = default;

private:
    std::int32_t days_ = 0;
};

}  // namespace stressmodel
