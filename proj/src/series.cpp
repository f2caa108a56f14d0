#include <crudecast/error.hpp>
#include <crudecast/series.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace crudecast {

CalendarPtr default_calendar() {
    static const CalendarPtr cal = std::make_shared<const TradingCalendar>();
    return cal;
}

DailySeries::DailySeries(std::string name, CalendarPtr calendar, Date start, std::vector<double> values,
                         std::string provenance)
    : name_(std::move(name)), calendar_(std::move(calendar)), values_(std::move(values)),
      provenance_(std::move(provenance)) {
    if (!calendar_) {
        throw Error(ErrorCode::InvalidArgument, "series '" + name_ + "' has no calendar");
    }
    if (values_.empty()) {
        throw Error(ErrorCode::InvalidArgument, "series '" + name_ + "' is empty");
    }
    if (!calendar_->is_business_day(start)) {
        throw Error(ErrorCode::InvalidArgument,
                    "series '" + name_ + "' starts on non-business day " + format_date(start));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::InvalidArgument, "series '" + name_ + "' contains a non-finite value");
        }
    }
    dates_.reserve(values_.size());
    dates_.push_back(start);
    for (std::size_t i = 1; i < values_.size(); ++i) {
        dates_.push_back(calendar_->next(dates_.back()));
    }
}

std::optional<std::size_t> DailySeries::index_of(Date date) const {
    auto it = std::lower_bound(dates_.begin(), dates_.end(), date);
    if (it == dates_.end() || *it != date) return std::nullopt;
    return static_cast<std::size_t>(it - dates_.begin());
}

DailySeries DailySeries::slice(std::size_t first, std::size_t count) const {
    if (count == 0 || first + count > values_.size()) {
        throw Error(ErrorCode::InvalidArgument, "slice out of range for series '" + name_ + "'");
    }
    std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(first),
                          values_.begin() + static_cast<std::ptrdiff_t>(first + count));
    return DailySeries(name_, calendar_, dates_[first], std::move(v), provenance_);
}

DailySeries DailySeries::renamed(std::string name) const {
    return DailySeries(std::move(name), calendar_, dates_.front(), values_, provenance_);
}

bool same_calendar(const DailySeries& a, const DailySeries& b) noexcept {
    return a.calendar_ptr() == b.calendar_ptr() || a.calendar() == b.calendar();
}

SignalSet::SignalSet(std::vector<DailySeries> series) : series_(std::move(series)) {}

const DailySeries* SignalSet::find(std::string_view name) const noexcept {
    for (const auto& s : series_) {
        if (s.name() == name) return &s;
    }
    return nullptr;
}

const DailySeries& SignalSet::at(std::string_view name) const {
    if (const auto* s = find(name)) return *s;
    throw Error(ErrorCode::InvalidArgument, "no series named '" + std::string(name) + "'");
}

std::vector<std::string> SignalSet::names() const {
    std::vector<std::string> out;
    out.reserve(series_.size());
    for (const auto& s : series_) out.push_back(s.name());
    return out;
}

DailySeries align_to_calendar(const RawObservations& raw, CalendarPtr calendar, std::string name,
                              std::string provenance) {
    if (!calendar) calendar = default_calendar();
    auto entries = raw.entries;
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].first == entries[i - 1].first) {
            throw Error(ErrorCode::DuplicateDate,
                        "series '" + name + "' has two entries for " + format_date(entries[i].first));
        }
    }
    std::erase_if(entries, [&](const auto& e) { return !calendar->is_business_day(e.first); });
    if (entries.empty()) {
        throw Error(ErrorCode::EmptyAfterAlignment, "series '" + name + "' has no business-day entries");
    }
    for (const auto& [date, value] : entries) {
        if (!std::isfinite(value)) {
            throw Error(ErrorCode::InvalidArgument,
                        "series '" + name + "' has a non-finite value on " + format_date(date));
        }
    }

    const auto grid = calendar->business_days(entries.front().first, entries.back().first);
    std::vector<double> values(grid.size());
    std::size_t known = 0; // index into entries of the next anchor
    for (std::size_t i = 0; i < grid.size();) {
        if (grid[i] == entries[known].first) {
            values[i] = entries[known].second;
            ++known;
            ++i;
            continue;
        }
        // grid[i] is inside a gap between entries[known-1] and entries[known]
        std::size_t j = i;
        while (grid[j] != entries[known].first) ++j;
        const double va = values[i - 1];
        const double vb = entries[known].second;
        const double m = static_cast<double>(j - i + 1);
        for (std::size_t g = i; g < j; ++g) {
            const double k = static_cast<double>(g - i + 1);
            values[g] = va + (vb - va) * k / m;
        }
        i = j;
    }
    return DailySeries(std::move(name), std::move(calendar), grid.front(), std::move(values),
                       std::move(provenance));
}

DailySeries lag(const DailySeries& s, int k) {
    if (k < 1 || k > kMaxLag) {
        throw Error(ErrorCode::LagTooLarge, "lag must be in 1.." + std::to_string(kMaxLag) + ", got " +
                                                std::to_string(k));
    }
    if (static_cast<std::size_t>(k) >= s.size()) {
        throw Error(ErrorCode::LagExceedsLength,
                    "lag " + std::to_string(k) + " leaves nothing of series '" + s.name() + "'");
    }
    const auto vals = s.values();
    std::vector<double> shifted(vals.begin(), vals.end() - k);
    return DailySeries(s.name(), s.calendar_ptr(), s.date(static_cast<std::size_t>(k)), std::move(shifted),
                       s.provenance());
}

DailySeries difference(const DailySeries& s, int order) {
    if (order < 0) {
        throw Error(ErrorCode::InvalidArgument, "differencing order must be non-negative");
    }
    if (order == 0) return s;
    if (static_cast<std::size_t>(order) >= s.size()) {
        throw Error(ErrorCode::OrderExceedsLength,
                    "differencing order " + std::to_string(order) + " too large for series '" + s.name() + "'");
    }
    std::vector<double> v(s.values().begin(), s.values().end());
    for (int o = 0; o < order; ++o) {
        for (std::size_t t = v.size() - 1; t > 0; --t) v[t] -= v[t - 1];
        v.erase(v.begin());
    }
    return DailySeries(s.name(), s.calendar_ptr(), s.date(static_cast<std::size_t>(order)), std::move(v),
                       s.provenance());
}

SplitSeries split(const DailySeries& s, Date boundary) {
    if (!(s.start_date() < boundary && boundary < s.end_date())) {
        throw Error(ErrorCode::BoundaryOutOfRange, "boundary " + format_date(boundary) +
                                                       " is not strictly inside " + format_date(s.start_date()) +
                                                       ".." + format_date(s.end_date()));
    }
    const auto& dates = s.dates();
    const auto cut = static_cast<std::size_t>(std::upper_bound(dates.begin(), dates.end(), boundary) - dates.begin());
    return {s.slice(0, cut), s.slice(cut, s.size() - cut)};
}

DailySeries concatenate(const DailySeries& head, const DailySeries& tail) {
    if (!same_calendar(head, tail)) {
        throw Error(ErrorCode::CalendarMismatch, "cannot concatenate series on different calendars");
    }
    if (head.calendar().next(head.end_date()) != tail.start_date()) {
        throw Error(ErrorCode::InvalidArgument, "series are not adjacent");
    }
    std::vector<double> v(head.values().begin(), head.values().end());
    v.insert(v.end(), tail.values().begin(), tail.values().end());
    return DailySeries(head.name(), head.calendar_ptr(), head.start_date(), std::move(v), head.provenance());
}

SignalSet inner_join(std::span<const DailySeries> series) {
    if (series.empty()) {
        throw Error(ErrorCode::InvalidArgument, "inner_join needs at least one series");
    }
    Date first = series.front().start_date();
    Date last = series.front().end_date();
    for (const auto& s : series) {
        if (!same_calendar(s, series.front())) {
            throw Error(ErrorCode::CalendarMismatch, "series '" + s.name() + "' uses a different calendar");
        }
        first = std::max(first, s.start_date());
        last = std::min(last, s.end_date());
    }
    if (first > last) {
        throw Error(ErrorCode::EmptyIntersection, "series spans do not overlap");
    }
    std::vector<DailySeries> out;
    out.reserve(series.size());
    for (const auto& s : series) {
        const auto a = *s.index_of(first);
        const auto b = *s.index_of(last);
        out.push_back(s.slice(a, b - a + 1));
    }
    return SignalSet(std::move(out));
}

std::string format_number(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return std::string(buf, ptr);
}

void write_series_csv(std::ostream& out, const DailySeries& s) {
    out << "date,value\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << format_date(s.date(i)) << ',' << format_number(s[i]) << '\n';
    }
}

void write_series_csv(const std::filesystem::path& path, const DailySeries& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
    write_series_csv(out, s);
}

RawObservations read_observations_csv(std::istream& in) {
    RawObservations raw;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1 && line.rfind("date", 0) == 0) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw Error(ErrorCode::MalformedRow, "expected date,value", lineno);
        }
        double value = 0.0;
        const char* b = line.data() + comma + 1;
        const char* e = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(b, e, value);
        if (ec != std::errc{} || ptr != e) {
            throw Error(ErrorCode::MalformedRow, "bad value '" + std::string(b, e) + "'", lineno);
        }
        try {
            raw.add(parse_date(std::string_view(line).substr(0, comma)), value);
        } catch (const Error& err) {
            throw Error(ErrorCode::MalformedRow, err.what(), lineno);
        }
    }
    return raw;
}

DailySeries read_series_csv(const std::filesystem::path& path, CalendarPtr calendar, std::string name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    return align_to_calendar(read_observations_csv(in), std::move(calendar), std::move(name), path.filename().string());
}

} // namespace crudecast
