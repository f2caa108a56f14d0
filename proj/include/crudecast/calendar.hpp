#ifndef CRUDECAST_CALENDAR_HPP
#define CRUDECAST_CALENDAR_HPP

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace crudecast {

using Date = std::chrono::sys_days;

/// Parses an ISO-8601 calendar date (YYYY-MM-DD). Throws Error(InvalidArgument).
Date parse_date(std::string_view text);
/// Parses the compact 8-digit form YYYYMMDD used by GDELT.
Date parse_compact_date(std::string_view text);
std::string format_date(Date date);

/// Weekday index using the C convention: 0 = Sunday ... 6 = Saturday.
unsigned weekday_index(Date date) noexcept;

// Five-day (by default) business calendar. Holidays falling on weekend days
// are dropped on construction so that the holiday set only ever removes
// otherwise-working days.
class TradingCalendar {
public:
    TradingCalendar();
    TradingCalendar(std::set<unsigned> weekend_days, std::set<Date> holidays);

    static TradingCalendar from_holiday_stream(std::istream& in, std::set<unsigned> weekend_days = {0, 6});
    static TradingCalendar from_holiday_file(const std::filesystem::path& path,
                                             std::set<unsigned> weekend_days = {0, 6});

    bool is_business_day(Date date) const noexcept;

    /// First business day strictly after `date`.
    Date next(Date date) const;
    /// Last business day strictly before `date`.
    Date prev(Date date) const;
    /// Moves `steps` business days from a business day (negative moves back).
    Date advance(Date date, std::ptrdiff_t steps) const;

    /// All business days in [first, last], strictly increasing.
    std::vector<Date> business_days(Date first, Date last) const;

    const std::set<unsigned>& weekend_days() const noexcept { return weekend_; }
    const std::set<Date>& holidays() const noexcept { return holidays_; }

    friend bool operator==(const TradingCalendar&, const TradingCalendar&) = default;

private:
    std::set<unsigned> weekend_;
    std::set<Date> holidays_;
};

} // namespace crudecast

#endif
