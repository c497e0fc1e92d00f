#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mfstream {

/// A calendar day (UTC, day granularity). All stream analysis runs on a
/// one-day time unit; finer timestamps are truncated at parse time.
class Day {
public:
    Day() = default;
    explicit Day(std::chrono::sys_days d) : days_(d) {}

    /// Throws InputError if the year/month/day combination is not a real date.
    static Day from_ymd(int year, unsigned month, unsigned day);

    /// Parses "YYYY-MM-DD". A trailing time-of-day ("2016-05-01T09:30:00" or
    /// "2016-05-01 09:30") is accepted and truncated.
    static Day parse(std::string_view text);
    static std::optional<Day> try_parse(std::string_view text);

    std::string to_string() const;  // "YYYY-MM-DD"

    std::chrono::sys_days sys() const { return days_; }

    Day& operator++() {
        days_ += std::chrono::days{1};
        return *this;
    }
    Day operator+(std::int64_t n) const { return Day{days_ + std::chrono::days{n}}; }
    friend std::int64_t operator-(Day a, Day b) { return (a.days_ - b.days_).count(); }
    auto operator<=>(const Day&) const = default;

private:
    std::chrono::sys_days days_{};
};

/// Closed interval of days [first, last].
struct DayRange {
    Day first;
    Day last;

    std::int64_t length() const { return (last - first) + 1; }
    bool contains(Day d) const { return first <= d && d <= last; }
    friend bool operator==(const DayRange&, const DayRange&) = default;
};

}  // namespace mfstream
