#ifndef CRUDECAST_INGEST_HPP
#define CRUDECAST_INGEST_HPP

#include <crudecast/series.hpp>
#include <crudecast/text_metrics.hpp>

#include <cstddef>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crudecast::ingest {

// Every parser reads plain or gzip-compressed input line by line.

/// records == kept + skipped + filtered. Header lines are not records.
struct ParseStats {
    std::size_t records = 0;
    std::size_t kept = 0;
    std::size_t skipped = 0;  ///< malformed, reported in warnings
    std::size_t filtered = 0; ///< well-formed but not selected
    std::vector<std::string> warnings;
};

/// `date,value` with positive prices. MalformedRow / NonPositivePrice abort.
RawObservations parse_price_csv(std::istream& in, ParseStats* stats = nullptr);

enum class GkgMatchField { Themes, FullRecord };

struct GkgCounts {
    RawObservations articles;
    RawObservations organizations;
};

/// GKG 1.0 daily file: DATE, NUMARTS, COUNTS, THEMES, LOCATIONS, PERSONS,
/// ORGANIZATIONS, TONE, CAMEOEVENTIDS, SOURCES, SOURCEURLS. Malformed records
/// are skipped. Each date with at least one valid record gets a value.
GkgCounts parse_gkg(std::istream& in, std::span<const std::string> query_terms,
                    GkgMatchField field = GkgMatchField::Themes, ParseStats* stats = nullptr);

/// One JSON object per line with `date`, `article`, `views`. Same-day records
/// for a title are summed. Every requested title gets an entry.
std::map<std::string, RawObservations> parse_pageviews(std::istream& in, std::span<const std::string> titles,
                                                       ParseStats* stats = nullptr);

/// `date,relative_volume` with integer volumes in 0..100.
RawObservations parse_trends_csv(std::istream& in, ParseStats* stats = nullptr);

/// One JSON object per line with `timestamp` and `text`. Kept when the text
/// contains a query term and no exclusion term (case-insensitive substrings).
/// An empty query list keeps everything not excluded.
std::vector<text::Document> parse_tweets(std::istream& in, std::span<const std::string> query_terms,
                                         std::span<const std::string> exclusion_terms, ParseStats* stats = nullptr);

/// Lowercase ASCII alphanumerics joined by '_': "Price of oil" -> "price_of_oil".
std::string slug(std::string_view text);

} // namespace crudecast::ingest

#endif
