#ifndef CRUDECAST_SERIES_HPP
#define CRUDECAST_SERIES_HPP

#include <crudecast/calendar.hpp>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace crudecast {

using CalendarPtr = std::shared_ptr<const TradingCalendar>;

CalendarPtr default_calendar();

/// Unaligned (date, value) pairs as they come out of a parser.
struct RawObservations {
    std::vector<std::pair<Date, double>> entries;

    void add(Date date, double value) { entries.emplace_back(date, value); }
    bool empty() const noexcept { return entries.empty(); }
    std::size_t size() const noexcept { return entries.size(); }
};

// A gap-free series on a business-day grid: values[i] belongs to the i-th
// business day counted from start_date. Immutable once built.
class DailySeries {
public:
    DailySeries(std::string name, CalendarPtr calendar, Date start, std::vector<double> values,
                std::string provenance = {});

    const std::string& name() const noexcept { return name_; }
    const std::string& provenance() const noexcept { return provenance_; }
    const TradingCalendar& calendar() const noexcept { return *calendar_; }
    const CalendarPtr& calendar_ptr() const noexcept { return calendar_; }

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    const std::vector<Date>& dates() const noexcept { return dates_; }
    Date date(std::size_t i) const noexcept { return dates_[i]; }
    Date start_date() const noexcept { return dates_.front(); }
    Date end_date() const noexcept { return dates_.back(); }

    std::optional<std::size_t> index_of(Date date) const;

    /// Contiguous sub-range [first, first + count).
    DailySeries slice(std::size_t first, std::size_t count) const;
    DailySeries renamed(std::string name) const;

private:
    std::string name_;
    CalendarPtr calendar_;
    std::vector<double> values_;
    std::vector<Date> dates_;
    std::string provenance_;
};

bool same_calendar(const DailySeries& a, const DailySeries& b) noexcept;

// Ordered collection of series sharing one date grid.
class SignalSet {
public:
    SignalSet() = default;
    explicit SignalSet(std::vector<DailySeries> series);

    const std::vector<DailySeries>& series() const noexcept { return series_; }
    std::size_t size() const noexcept { return series_.size(); }
    bool empty() const noexcept { return series_.empty(); }
    auto begin() const noexcept { return series_.begin(); }
    auto end() const noexcept { return series_.end(); }

    const DailySeries* find(std::string_view name) const noexcept;
    /// Throws Error(InvalidArgument) when absent.
    const DailySeries& at(std::string_view name) const;
    std::vector<std::string> names() const;

private:
    std::vector<DailySeries> series_;
};

/// Drops non-business days, linearly interpolates interior missing business
/// days and trims (never extrapolates) the ends.
DailySeries align_to_calendar(const RawObservations& raw, CalendarPtr calendar, std::string name,
                              std::string provenance = {});

inline constexpr int kMaxLag = 3;

/// Value at date t is the input's value k business days earlier.
DailySeries lag(const DailySeries& s, int k);
DailySeries difference(const DailySeries& s, int order);

struct SplitSeries {
    DailySeries train;
    DailySeries test;
};
/// train holds dates <= boundary, test dates > boundary.
SplitSeries split(const DailySeries& s, Date boundary);

/// Inverse of split for adjacent series.
DailySeries concatenate(const DailySeries& head, const DailySeries& tail);

/// Truncates all series to their common dates; input order is kept.
SignalSet inner_join(std::span<const DailySeries> series);

// Two-column CSV `date,value`.
void write_series_csv(std::ostream& out, const DailySeries& s);
void write_series_csv(const std::filesystem::path& path, const DailySeries& s);
RawObservations read_observations_csv(std::istream& in);
DailySeries read_series_csv(const std::filesystem::path& path, CalendarPtr calendar, std::string name);

/// Shortest round-trip decimal form of a double.
std::string format_number(double value);

} // namespace crudecast

#endif
