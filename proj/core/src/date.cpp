#include "mfstream/date.hpp"

#include <charconv>
#include <cstdio>

#include "mfstream/errors.hpp"

namespace mfstream {

namespace {

bool parse_int(std::string_view text, int& out) {
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

Day Day::from_ymd(int year, unsigned month, unsigned day) {
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok()) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "invalid calendar day %04d-%02u-%02u", year, month, day);
        throw InputError(buf);
    }
    return Day{std::chrono::sys_days{ymd}};
}

Day Day::parse(std::string_view text) {
    if (auto day = try_parse(text)) {
        return *day;
    }
    throw InputError("invalid date \"" + std::string(text) + "\", expected YYYY-MM-DD");
}

std::optional<Day> Day::try_parse(std::string_view text) {
    // Truncate a time-of-day suffix; only the calendar day is kept.
    if (text.size() > 10 && (text[10] == 'T' || text[10] == ' ')) {
        text = text.substr(0, 10);
    }
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    int year = 0, month = 0, day = 0;
    if (!parse_int(text.substr(0, 4), year) || !parse_int(text.substr(5, 2), month) ||
        !parse_int(text.substr(8, 2), day)) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{year},
                                          std::chrono::month{static_cast<unsigned>(month)},
                                          std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return Day{std::chrono::sys_days{ymd}};
}

std::string Day::to_string() const {
    const std::chrono::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

}  // namespace mfstream
