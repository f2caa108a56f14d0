#include <crudecast/error.hpp>
#include <crudecast/text_metrics.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

namespace crudecast::text {

namespace {

int digits(std::string_view s, std::string_view whole) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw Error(ErrorCode::InvalidArgument, "invalid timestamp '" + std::string(whole) + "'");
    }
    return v;
}

std::vector<std::string> load_tokens(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open lexicon file " + path.string());
    }
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        std::size_t b = 0;
        while (b < line.size() && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
        if (b == line.size() || line[b] == '#') continue;
        out.push_back(line.substr(b));
    }
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    }
    return true;
}

} // namespace

Timestamp parse_timestamp(std::string_view text) {
    // YYYY-MM-DD[T ]HH:MM[:SS][.fff](Z|+HH:MM|-HH:MM)?
    using namespace std::chrono;
    if (text.size() < 16) {
        throw Error(ErrorCode::InvalidArgument, "invalid timestamp '" + std::string(text) + "'");
    }
    const Date day = parse_date(text.substr(0, 10));
    if (text[10] != 'T' && text[10] != ' ') {
        throw Error(ErrorCode::InvalidArgument, "invalid timestamp '" + std::string(text) + "'");
    }
    const int hh = digits(text.substr(11, 2), text);
    if (text[13] != ':') throw Error(ErrorCode::InvalidArgument, "invalid timestamp '" + std::string(text) + "'");
    const int mm = digits(text.substr(14, 2), text);
    std::size_t pos = 16;
    int ss = 0;
    if (pos < text.size() && text[pos] == ':') {
        ss = digits(text.substr(pos + 1, 2), text);
        pos += 3;
    }
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    int offset_minutes = 0;
    if (pos < text.size()) {
        const char sign = text[pos];
        if (sign == 'Z') {
            ++pos;
        } else if ((sign == '+' || sign == '-') && text.size() >= pos + 6 && text[pos + 3] == ':') {
            const int oh = digits(text.substr(pos + 1, 2), text);
            const int om = digits(text.substr(pos + 4, 2), text);
            offset_minutes = (sign == '+' ? 1 : -1) * (oh * 60 + om);
            pos += 6;
        }
    }
    if (pos != text.size() || hh > 23 || mm > 59 || ss > 60) {
        throw Error(ErrorCode::InvalidArgument, "invalid timestamp '" + std::string(text) + "'");
    }
    return sys_seconds{day} + hours{hh} + minutes{mm} + seconds{ss} - minutes{offset_minutes};
}

std::string format_timestamp(Timestamp ts) {
    using namespace std::chrono;
    const auto day = floor<days>(ts);
    const hh_mm_ss hms{ts - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(day).c_str(),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

Lexicon::Lexicon(std::vector<std::string> positive, std::vector<std::string> negative) {
    for (const auto& t : positive) positive_.insert(lower(t));
    for (const auto& t : negative) {
        auto token = lower(t);
        if (positive_.contains(token)) {
            throw Error(ErrorCode::OverlappingLexicon, "token '" + token + "' is both positive and negative");
        }
        negative_.insert(std::move(token));
    }
}

Lexicon Lexicon::load(const std::filesystem::path& positive, const std::filesystem::path& negative) {
    return Lexicon(load_tokens(positive), load_tokens(negative));
}

bool Lexicon::is_positive(std::string_view token) const { return positive_.contains(std::string(token)); }
bool Lexicon::is_negative(std::string_view token) const { return negative_.contains(std::string(token)); }

IdfTable::IdfTable(std::size_t doc_count, std::unordered_map<std::string, std::size_t> doc_freq)
    : doc_count_(doc_count), doc_freq_(std::move(doc_freq)) {
    if (doc_count_ == 0) {
        throw Error(ErrorCode::EmptyCorpus, "IDF table needs at least one document");
    }
    for (const auto& [token, df] : doc_freq_) {
        if (df < 1 || df > doc_count_) {
            throw Error(ErrorCode::InvalidArgument, "document frequency of '" + token + "' out of range");
        }
    }
}

std::size_t IdfTable::doc_freq(std::string_view token) const {
    auto it = doc_freq_.find(std::string(token));
    return it == doc_freq_.end() ? 0 : it->second;
}

double IdfTable::idf(std::string_view token) const {
    const std::size_t df = std::max<std::size_t>(doc_freq(token), 1);
    return std::log(static_cast<double>(doc_count_) / static_cast<double>(df));
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        const auto word = text.substr(i, j - i);
        i = j;
        if (word.empty() || word.front() == '@' || starts_with_ci(word, "http://") ||
            starts_with_ci(word, "https://") || starts_with_ci(word, "www.")) {
            continue;
        }
        std::string current;
        auto flush = [&] {
            if (current.size() >= 2) tokens.push_back(current);
            current.clear();
        };
        for (char c : word) {
            const auto uc = static_cast<unsigned char>(c);
            if (std::isalnum(uc)) {
                current.push_back(static_cast<char>(std::tolower(uc)));
            } else {
                flush();
            }
        }
        flush();
    }
    return tokens;
}

double sentiment_score(std::span<const std::string> tokens, const Lexicon& lex) {
    std::size_t pos = 0;
    std::size_t neg = 0;
    for (const auto& t : tokens) {
        if (lex.is_positive(t)) ++pos;
        else if (lex.is_negative(t)) ++neg;
    }
    if (pos + neg == 0) return 0.5;
    return static_cast<double>(pos) / static_cast<double>(pos + neg);
}

double sentiment_score(const Document& doc, const Lexicon& lex) {
    const auto tokens = tokenize(doc.text);
    return sentiment_score(tokens, lex);
}

double emotionality(double score) {
    if (!(score >= 0.0 && score <= 1.0)) {
        throw Error(ErrorCode::OutOfRange, "sentiment score must lie in [0, 1]");
    }
    return 2.0 * std::abs(score - 0.5);
}

IdfTable build_idf(std::span<const Document> corpus) {
    if (corpus.empty()) {
        throw Error(ErrorCode::EmptyCorpus, "cannot build IDF from an empty corpus");
    }
    std::unordered_map<std::string, std::size_t> df;
    for (const auto& doc : corpus) {
        auto tokens = tokenize(doc.text);
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
        for (auto& t : tokens) ++df[std::move(t)];
    }
    return IdfTable(corpus.size(), std::move(df));
}

double complexity_score(std::span<const std::string> tokens, const IdfTable& idf) {
    if (tokens.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& t : tokens) sum += idf.idf(t);
    return sum / static_cast<double>(tokens.size());
}

double complexity_score(const Document& doc, const IdfTable& idf) {
    const auto tokens = tokenize(doc.text);
    return complexity_score(tokens, idf);
}

DailyTextSignals aggregate_daily(std::span<const Document> docs, const Lexicon& lex, CalendarPtr calendar,
                                 std::string_view prefix) {
    if (docs.empty()) {
        throw Error(ErrorCode::EmptyCorpus, "no documents to aggregate");
    }
    if (!calendar) calendar = default_calendar();
    const IdfTable idf = build_idf(docs);

    struct Day {
        std::size_t count = 0;
        double sentiment_sum = 0.0;
        double complexity_sum = 0.0;
    };
    std::map<Date, Day> days;
    for (const auto& doc : docs) {
        const auto tokens = tokenize(doc.text);
        auto& d = days[std::chrono::floor<std::chrono::days>(doc.timestamp)];
        ++d.count;
        d.sentiment_sum += sentiment_score(tokens, lex);
        d.complexity_sum += complexity_score(tokens, idf);
    }

    // Business days inside the span without any document are explicit zeros,
    // not gaps to interpolate.
    std::optional<Date> first_bd;
    std::optional<Date> last_bd;
    for (const auto& [date, _] : days) {
        if (calendar->is_business_day(date)) {
            if (!first_bd) first_bd = date;
            last_bd = date;
        }
    }
    if (first_bd) {
        for (Date d : calendar->business_days(*first_bd, *last_bd)) days.try_emplace(d);
    }

    RawObservations messages, sentiment, emo, complexity;
    for (const auto& [date, d] : days) {
        const double n = static_cast<double>(d.count);
        const double s = d.count ? d.sentiment_sum / n : 0.5;
        messages.add(date, n);
        sentiment.add(date, s);
        emo.add(date, emotionality(std::clamp(s, 0.0, 1.0)));
        complexity.add(date, d.count ? d.complexity_sum / n : 0.0);
    }
    const std::string p(prefix);
    return DailyTextSignals{
        align_to_calendar(messages, calendar, p + "_messages", "tweets"),
        align_to_calendar(sentiment, calendar, p + "_sentiment", "tweets"),
        align_to_calendar(emo, calendar, p + "_emotionality", "tweets"),
        align_to_calendar(complexity, calendar, p + "_complexity", "tweets"),
    };
}

} // namespace crudecast::text
