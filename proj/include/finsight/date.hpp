#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace finsight {

using Date = std::chrono::year_month_day;

// Strict ISO `YYYY-MM-DD`; nullopt for anything else (including invalid
// calendar dates such as 2023-02-30).
std::optional<Date> parse_date(std::string_view text);

std::string format_date(const Date& date);

// Whole days from `from` to `to`; negative when `to` precedes `from`.
long days_between(const Date& from, const Date& to);

Date add_days(const Date& date, long days);

}  // namespace finsight
