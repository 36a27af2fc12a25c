#include "ozlasso/date.hpp"

#include <charconv>
#include <cstdio>

namespace ozlasso {

namespace {

template <class T>
bool parse_int(std::string_view s, T& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day)
    : ymd_(std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}) {}

std::optional<Date> Date::parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0, d = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
        !parse_int(text.substr(8, 2), d))
        return std::nullopt;
    Date out(y, m, d);
    if (!out.ymd_.ok()) return std::nullopt;
    return out;
}

long Date::serial() const {
    return std::chrono::sys_days{ymd_}.time_since_epoch().count();
}

Date Date::plus_days(long n) const {
    return Date(std::chrono::year_month_day{std::chrono::sys_days{ymd_} + std::chrono::days{n}});
}

std::string Date::iso() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year(), month(), day());
    return buf;
}

}  // namespace ozlasso
