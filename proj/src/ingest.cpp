#include "line_reader.hpp"

#include <crudecast/error.hpp>
#include <crudecast/ingest.hpp>

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace crudecast::ingest {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::vector<std::string> lower_all(std::span<const std::string> terms) {
    std::vector<std::string> out;
    for (const auto& t : terms) {
        if (!t.empty()) out.push_back(lower(t));
    }
    return out;
}

bool contains_any(std::string_view haystack_lower, const std::vector<std::string>& terms) {
    return std::any_of(terms.begin(), terms.end(),
                       [&](const std::string& t) { return haystack_lower.find(t) != std::string_view::npos; });
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool blank(std::string_view s) { return trim(s).empty(); }

std::vector<std::string_view> split_view(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t from = 0;
    while (true) {
        const auto at = s.find(sep, from);
        if (at == std::string_view::npos) {
            out.push_back(s.substr(from));
            return out;
        }
        out.push_back(s.substr(from, at - from));
        from = at + 1;
    }
}

template <class T>
bool parse_full(std::string_view s, T& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

// Accepts YYYY-MM-DD, YYYYMMDD and YYYYMMDDHH.
Date parse_any_date(std::string_view s) {
    s = trim(s);
    if (s.size() == 10 && s[4] == '-') return parse_date(s);
    if (s.size() == 8 || (s.size() == 10 && std::all_of(s.begin(), s.end(), ::isdigit))) {
        return parse_compact_date(s.substr(0, 8));
    }
    throw Error(ErrorCode::InvalidArgument, "unrecognised date '" + std::string(s) + "'");
}

// Leaves the header in `line`; false for an empty stream.
bool read_header(detail::LineReader& reader, std::string_view first_column, std::string& line) {
    while (reader.next(line)) {
        if (blank(line)) continue;
        const auto cols = split_view(line, ',');
        if (lower(trim(cols[0])) != first_column) {
            throw Error(ErrorCode::MalformedRow, "expected a header beginning with '" + std::string(first_column) + "'",
                        reader.line_number());
        }
        return true;
    }
    return false;
}

void warn(ParseStats& st, std::size_t line, const std::string& what) {
    ++st.skipped;
    st.warnings.push_back("line " + std::to_string(line) + ": " + what);
}

} // namespace

std::string slug(std::string_view text) {
    std::string out;
    bool pending = false;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            if (pending && !out.empty()) out += '_';
            out += static_cast<char>(std::tolower(c));
            pending = false;
        } else {
            pending = true;
        }
    }
    return out;
}

RawObservations parse_price_csv(std::istream& in, ParseStats* stats) {
    ParseStats local;
    ParseStats& st = stats ? *stats : local;
    detail::LineReader reader(in);
    std::string line;
    const bool has_header = read_header(reader, "date", line);
    if (has_header) {
        const auto cols = split_view(line, ',');
        if (cols.size() != 2 || lower(trim(cols[1])) != "value") {
            throw Error(ErrorCode::MalformedRow, "header must be 'date,value'", reader.line_number());
        }
    }
    RawObservations out;
    while (reader.next(line)) {
        if (blank(line)) continue;
        ++st.records;
        const auto ln = reader.line_number();
        const auto cols = split_view(line, ',');
        if (cols.size() != 2) throw Error(ErrorCode::MalformedRow, "expected two columns", ln);
        Date date;
        try {
            date = parse_date(trim(cols[0]));
        } catch (const Error& e) {
            throw Error(ErrorCode::MalformedRow, e.what(), ln);
        }
        double value = 0.0;
        if (!parse_full(cols[1], value) || !std::isfinite(value)) {
            throw Error(ErrorCode::MalformedRow, "value is not a finite number", ln);
        }
        if (value <= 0.0) throw Error(ErrorCode::NonPositivePrice, "price must be positive", ln);
        out.add(date, value);
        ++st.kept;
    }
    return out;
}

GkgCounts parse_gkg(std::istream& in, std::span<const std::string> query_terms, GkgMatchField field,
                    ParseStats* stats) {
    ParseStats local;
    ParseStats& st = stats ? *stats : local;
    const auto terms = lower_all(query_terms);
    detail::LineReader reader(in);
    std::map<Date, std::pair<double, double>> daily; // articles, organizations
    std::string line;
    bool first = true;
    while (reader.next(line)) {
        if (blank(line)) continue;
        const auto cols = split_view(line, '\t');
        if (first) {
            first = false;
            if (trim(cols[0]) == "DATE") continue;
        }
        ++st.records;
        const auto ln = reader.line_number();
        if (cols.size() < 7) {
            warn(st, ln, "fewer than 7 tab-separated fields");
            continue;
        }
        const auto date_field = trim(cols[0]);
        if (date_field.size() != 8 || !std::all_of(date_field.begin(), date_field.end(), ::isdigit)) {
            warn(st, ln, "DATE is not YYYYMMDD");
            continue;
        }
        Date date;
        try {
            date = parse_compact_date(date_field);
        } catch (const Error&) {
            warn(st, ln, "DATE is not a calendar date");
            continue;
        }
        auto& acc = daily[date];
        const std::string haystack = lower(field == GkgMatchField::Themes ? cols[3] : std::string_view(line));
        if (!contains_any(haystack, terms)) {
            ++st.filtered;
            continue;
        }
        ++st.kept;
        acc.first += 1.0;
        for (auto org : split_view(cols[6], ';')) {
            if (!blank(org)) acc.second += 1.0;
        }
    }
    GkgCounts out;
    for (const auto& [date, acc] : daily) {
        out.articles.add(date, acc.first);
        out.organizations.add(date, acc.second);
    }
    return out;
}

std::map<std::string, RawObservations> parse_pageviews(std::istream& in, std::span<const std::string> titles,
                                                       ParseStats* stats) {
    ParseStats local;
    ParseStats& st = stats ? *stats : local;
    auto normalise = [](std::string_view t) {
        std::string s(trim(t));
        std::replace(s.begin(), s.end(), '_', ' ');
        return lower(s);
    };
    std::map<std::string, std::string> wanted; // normalised -> requested spelling
    std::map<std::string, std::map<Date, double>> acc;
    for (const auto& t : titles) {
        wanted.emplace(normalise(t), t);
        acc[t];
    }
    detail::LineReader reader(in);
    std::string line;
    while (reader.next(line)) {
        if (blank(line)) continue;
        ++st.records;
        const auto ln = reader.line_number();
        std::string article;
        Date date;
        double views = 0.0;
        try {
            const auto rec = nlohmann::json::parse(line);
            article = rec.at("article").get<std::string>();
            date = parse_any_date(rec.at("date").get<std::string>());
            const auto& v = rec.at("views");
            if (!v.is_number_integer() || v.get<long long>() < 0) {
                throw Error(ErrorCode::MalformedRow, "views must be a non-negative integer", ln);
            }
            views = static_cast<double>(v.get<long long>());
        } catch (const Error& e) {
            throw Error(ErrorCode::MalformedRow, e.what(), ln);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::MalformedRow, e.what(), ln);
        }
        const auto it = wanted.find(normalise(article));
        if (it == wanted.end()) {
            ++st.filtered;
            continue;
        }
        ++st.kept;
        acc[it->second][date] += views;
    }
    std::map<std::string, RawObservations> out;
    for (const auto& [title, days] : acc) {
        auto& obs = out[title];
        for (const auto& [date, v] : days) obs.add(date, v);
    }
    return out;
}

RawObservations parse_trends_csv(std::istream& in, ParseStats* stats) {
    ParseStats local;
    ParseStats& st = stats ? *stats : local;
    detail::LineReader reader(in);
    std::string line;
    const bool has_header = read_header(reader, "date", line);
    if (has_header && split_view(line, ',').size() != 2) {
        throw Error(ErrorCode::MalformedRow, "header must have two columns", reader.line_number());
    }
    RawObservations out;
    while (reader.next(line)) {
        if (blank(line)) continue;
        ++st.records;
        const auto ln = reader.line_number();
        const auto cols = split_view(line, ',');
        if (cols.size() != 2) throw Error(ErrorCode::MalformedRow, "expected two columns", ln);
        Date date;
        try {
            date = parse_date(trim(cols[0]));
        } catch (const Error& e) {
            throw Error(ErrorCode::MalformedRow, e.what(), ln);
        }
        long volume = 0;
        if (!parse_full(cols[1], volume)) throw Error(ErrorCode::MalformedRow, "volume is not an integer", ln);
        if (volume < 0 || volume > 100) throw Error(ErrorCode::VolumeOutOfRange, "volume outside 0..100", ln);
        out.add(date, static_cast<double>(volume));
        ++st.kept;
    }
    return out;
}

std::vector<text::Document> parse_tweets(std::istream& in, std::span<const std::string> query_terms,
                                         std::span<const std::string> exclusion_terms, ParseStats* stats) {
    ParseStats local;
    ParseStats& st = stats ? *stats : local;
    const auto terms = lower_all(query_terms);
    const auto exclusions = lower_all(exclusion_terms);
    detail::LineReader reader(in);
    std::vector<text::Document> docs;
    std::string line;
    while (reader.next(line)) {
        if (blank(line)) continue;
        ++st.records;
        const auto ln = reader.line_number();
        text::Document doc;
        try {
            const auto rec = nlohmann::json::parse(line);
            if (!rec.is_object() || !rec.contains("text") || !rec.contains("timestamp")) {
                warn(st, ln, "record lacks 'timestamp' or 'text'");
                continue;
            }
            doc.text = rec.at("text").get<std::string>();
            doc.timestamp = text::parse_timestamp(rec.at("timestamp").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            warn(st, ln, e.what());
            continue;
        } catch (const Error& e) {
            warn(st, ln, e.what());
            continue;
        }
        const std::string haystack = lower(doc.text);
        if (contains_any(haystack, exclusions)) {
            ++st.filtered;
            continue;
        }
        if (!terms.empty()) {
            const auto hit = std::find_if(terms.begin(), terms.end(),
                                          [&](const std::string& t) { return haystack.find(t) != std::string::npos; });
            if (hit == terms.end()) {
                ++st.filtered;
                continue;
            }
            doc.query = *hit;
        }
        doc.source = text::Source::Tweet;
        docs.push_back(std::move(doc));
        ++st.kept;
    }
    return docs;
}

} // namespace crudecast::ingest
