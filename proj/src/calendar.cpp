#include <crudecast/calendar.hpp>
#include <crudecast/error.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>

namespace crudecast {

namespace {

int parse_digits(std::string_view text, std::string_view whole) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::InvalidArgument, "invalid date '" + std::string(whole) + "'");
    }
    return value;
}

Date make_date(int y, int m, int d, std::string_view whole) {
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        throw Error(ErrorCode::InvalidArgument, "invalid date '" + std::string(whole) + "'");
    }
    return sys_days{ymd};
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace

Date parse_date(std::string_view text) {
    text = trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw Error(ErrorCode::InvalidArgument, "invalid date '" + std::string(text) + "'");
    }
    return make_date(parse_digits(text.substr(0, 4), text), parse_digits(text.substr(5, 2), text),
                     parse_digits(text.substr(8, 2), text), text);
}

Date parse_compact_date(std::string_view text) {
    text = trim(text);
    if (text.size() != 8) {
        throw Error(ErrorCode::InvalidArgument, "invalid compact date '" + std::string(text) + "'");
    }
    return make_date(parse_digits(text.substr(0, 4), text), parse_digits(text.substr(4, 2), text),
                     parse_digits(text.substr(6, 2), text), text);
}

std::string format_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

unsigned weekday_index(Date date) noexcept {
    return std::chrono::weekday{date}.c_encoding();
}

TradingCalendar::TradingCalendar() : weekend_{0, 6} {}

TradingCalendar::TradingCalendar(std::set<unsigned> weekend_days, std::set<Date> holidays)
    : weekend_(std::move(weekend_days)) {
    for (unsigned d : weekend_) {
        if (d > 6) {
            throw Error(ErrorCode::InvalidArgument, "weekday index must be in 0..6");
        }
    }
    if (weekend_.size() == 7) {
        throw Error(ErrorCode::InvalidArgument, "calendar has no working weekdays");
    }
    for (Date h : holidays) {
        if (!weekend_.contains(weekday_index(h))) {
            holidays_.insert(h);
        }
    }
}

TradingCalendar TradingCalendar::from_holiday_stream(std::istream& in, std::set<unsigned> weekend_days) {
    std::set<Date> holidays;
    std::string line;
    while (std::getline(in, line)) {
        auto view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        holidays.insert(parse_date(view));
    }
    return TradingCalendar(std::move(weekend_days), std::move(holidays));
}

TradingCalendar TradingCalendar::from_holiday_file(const std::filesystem::path& path,
                                                   std::set<unsigned> weekend_days) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open holiday file " + path.string());
    }
    return from_holiday_stream(in, std::move(weekend_days));
}

bool TradingCalendar::is_business_day(Date date) const noexcept {
    return !weekend_.contains(weekday_index(date)) && !holidays_.contains(date);
}

Date TradingCalendar::next(Date date) const {
    do {
        date += std::chrono::days{1};
    } while (!is_business_day(date));
    return date;
}

Date TradingCalendar::prev(Date date) const {
    do {
        date -= std::chrono::days{1};
    } while (!is_business_day(date));
    return date;
}

Date TradingCalendar::advance(Date date, std::ptrdiff_t steps) const {
    for (; steps > 0; --steps) date = next(date);
    for (; steps < 0; ++steps) date = prev(date);
    return date;
}

std::vector<Date> TradingCalendar::business_days(Date first, Date last) const {
    std::vector<Date> out;
    for (Date d = first; d <= last; d += std::chrono::days{1}) {
        if (is_business_day(d)) out.push_back(d);
    }
    return out;
}

} // namespace crudecast
