#ifndef CRUDECAST_TEXT_METRICS_HPP
#define CRUDECAST_TEXT_METRICS_HPP

#include <crudecast/series.hpp>

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace crudecast::text {

using Timestamp = std::chrono::sys_seconds;

enum class Source { Tweet, News };

struct Document {
    Timestamp timestamp;
    std::string text;
    Source source = Source::Tweet;
    std::string query;
};

/// Parses ISO-8601 instants such as 2014-01-02T13:45:00Z or ...+01:00 into UTC.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

class Lexicon {
public:
    Lexicon() = default;
    /// Tokens are lowercased; a token in both lists is an OverlappingLexicon error.
    Lexicon(std::vector<std::string> positive, std::vector<std::string> negative);

    static Lexicon load(const std::filesystem::path& positive, const std::filesystem::path& negative);

    bool is_positive(std::string_view token) const;
    bool is_negative(std::string_view token) const;

private:
    std::unordered_set<std::string> positive_;
    std::unordered_set<std::string> negative_;
};

class IdfTable {
public:
    IdfTable(std::size_t doc_count, std::unordered_map<std::string, std::size_t> doc_freq);

    std::size_t doc_count() const noexcept { return doc_count_; }
    /// Document frequency; 0 for unseen tokens.
    std::size_t doc_freq(std::string_view token) const;
    /// ln(N / df) with df = 1 for unseen tokens.
    double idf(std::string_view token) const;

private:
    std::size_t doc_count_;
    std::unordered_map<std::string, std::size_t> doc_freq_;
};

struct DailyTextSignals {
    DailySeries messages;
    DailySeries sentiment;
    DailySeries emotionality;
    DailySeries complexity;
};

// Lowercases, drops URLs and @-mentions, splits on non-alphanumeric runs and
// keeps tokens of two or more characters.
std::vector<std::string> tokenize(std::string_view text);

double sentiment_score(std::span<const std::string> tokens, const Lexicon& lex);
double sentiment_score(const Document& doc, const Lexicon& lex);

/// 2 |score - 0.5|; OutOfRange outside [0, 1].
double emotionality(double score);

IdfTable build_idf(std::span<const Document> corpus);

double complexity_score(std::span<const std::string> tokens, const IdfTable& idf);
double complexity_score(const Document& doc, const IdfTable& idf);

/// Per business day: message count, mean sentiment, emotionality of that mean,
/// mean complexity. Business days without documents get 0 / 0.5 / 0.
DailyTextSignals aggregate_daily(std::span<const Document> docs, const Lexicon& lex, CalendarPtr calendar,
                                 std::string_view prefix = "twitter");

} // namespace crudecast::text

#endif
