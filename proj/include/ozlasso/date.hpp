#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace ozlasso {

// Calendar date (proleptic Gregorian). Thin value wrapper over
// std::chrono::year_month_day with ISO-8601 text conversion.
class Date {
public:
    Date() = default;
    Date(int year, unsigned month, unsigned day);
    explicit Date(std::chrono::year_month_day ymd) : ymd_(ymd) {}

    // Parses "YYYY-MM-DD"; returns nullopt for anything else or an invalid day.
    static std::optional<Date> parse(std::string_view text);

    int year() const { return static_cast<int>(ymd_.year()); }
    unsigned month() const { return static_cast<unsigned>(ymd_.month()); }
    unsigned day() const { return static_cast<unsigned>(ymd_.day()); }

    // Days since 1970-01-01.
    long serial() const;
    Date plus_days(long n) const;
    Date next() const { return plus_days(1); }

    // Calendar quarter, 0..3 (Jan-Mar, Apr-Jun, Jul-Sep, Oct-Dec).
    int trimester() const { return static_cast<int>((month() - 1) / 3); }

    std::string iso() const;

    friend bool operator==(const Date& a, const Date& b) { return a.ymd_ == b.ymd_; }
    friend std::strong_ordering operator<=>(const Date& a, const Date& b) {
        return a.serial() <=> b.serial();
    }

private:
    std::chrono::year_month_day ymd_{std::chrono::year{1970}, std::chrono::month{1},
                                     std::chrono::day{1}};
};

}  // namespace ozlasso
