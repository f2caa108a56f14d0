#include "support.hpp"

#include <crudecast/error.hpp>
#include <crudecast/text_metrics.hpp>

#include <doctest.h>

#include <cmath>

using namespace crudecast;
using namespace crudecast::text;
using namespace testsupport;

namespace {

using Tokens = std::vector<std::string>;

Document doc_at(const std::string& when, std::string text) {
    return Document{parse_timestamp(when), std::move(text), Source::Tweet, "oil"};
}

const Lexicon& lexicon() {
    static const Lexicon lex({"gain", "rally", "strong"}, {"fall", "crash", "weak"});
    return lex;
}

// Independent df count: a token counts once per document.
double reference_idf(const std::vector<Tokens>& corpus, const std::string& token) {
    std::size_t df = 0;
    for (const auto& d : corpus) df += std::find(d.begin(), d.end(), token) != d.end();
    return std::log(static_cast<double>(corpus.size()) / static_cast<double>(std::max<std::size_t>(df, 1)));
}

} // namespace

TEST_CASE("tokenize examples") {
    CHECK(tokenize("Crude OIL price!!") == Tokens{"crude", "oil", "price"});
    CHECK(tokenize("http://x.co @bob up") == Tokens{"up"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("a b cd https://t.co/x?y=1 #wti") == Tokens{"cd", "wti"});
}

TEST_CASE("timestamps normalise to UTC") {
    CHECK(parse_timestamp("2014-01-02T13:45:00Z") == parse_timestamp("2014-01-02T14:45:00+01:00"));
    CHECK(format_timestamp(parse_timestamp("2014-03-02T23:30:00-02:00")) == "2014-03-03T01:30:00Z");
    CHECK(code_of([] { parse_timestamp("yesterday"); }).has_value());
}

TEST_CASE("lexicon rejects overlap") {
    CHECK(code_of([] { Lexicon({"up"}, {"UP"}); }) == ErrorCode::OverlappingLexicon);
}

TEST_CASE("sentiment examples") {
    CHECK(sentiment_score(Tokens{"gain", "rally"}, lexicon()) == 1.0);
    CHECK(sentiment_score(Tokens{"oil", "price"}, lexicon()) == 0.5);
    const double p = 1, n = 3;
    CHECK(sentiment_score(Tokens{"gain", "fall", "crash", "weak"}, lexicon()) == doctest::Approx(p / (p + n)));
    CHECK(sentiment_score(doc_at("2014-01-06T10:00:00Z", "Strong rally, no crash"), lexicon()) ==
          doctest::Approx(2.0 / 3.0));
}

TEST_CASE("sentiment is invariant under token duplication") {
    const Tokens base{"gain", "oil", "fall", "weak", "strong", "x1"};
    Tokens twice = base;
    twice.insert(twice.end(), base.begin(), base.end());
    CHECK(sentiment_score(twice, lexicon()) == sentiment_score(base, lexicon()));
}

TEST_CASE("emotionality examples and symmetry") {
    CHECK(emotionality(0.5) == 0.0);
    CHECK(emotionality(1.0) == 1.0);
    CHECK(emotionality(0.75) == doctest::Approx(2.0 * std::abs(0.75 - 0.5)));
    CHECK(code_of([] { emotionality(1.2); }) == ErrorCode::OutOfRange);
    CHECK(code_of([] { emotionality(-0.1); }) == ErrorCode::OutOfRange);
    for (double s = 0.0; s <= 1.0; s += 0.05) CHECK(emotionality(s) == doctest::Approx(emotionality(1.0 - s)));
}

TEST_CASE("build_idf examples") {
    const std::vector<Document> corpus{
        doc_at("2014-01-06T10:00:00Z", "oil opec opec opec opec opec"),
        doc_at("2014-01-06T11:00:00Z", "oil price"),
        doc_at("2014-01-07T10:00:00Z", "oil barrel"),
        doc_at("2014-01-07T11:00:00Z", "oil price barrel"),
    };
    const auto idf = build_idf(corpus);
    CHECK(idf.doc_count() == 4);
    CHECK(idf.doc_freq("opec") == 1);
    CHECK(idf.idf("opec") == doctest::Approx(1.3863).epsilon(1e-4));
    CHECK(idf.idf("oil") == 0.0);
    CHECK(idf.doc_freq("unseen") == 0);
    CHECK(idf.idf("unseen") == doctest::Approx(std::log(4.0)));
    CHECK(code_of([] { build_idf(std::span<const Document>{}); }) == ErrorCode::EmptyCorpus);

    std::vector<Tokens> tokens;
    for (const auto& d : corpus) tokens.push_back(tokenize(d.text));
    for (const auto* t : {"oil", "opec", "price", "barrel"}) CHECK(idf.idf(t) == doctest::Approx(reference_idf(tokens, t)));
}

TEST_CASE("complexity examples") {
    const std::vector<Document> corpus{
        doc_at("2014-01-06T10:00:00Z", "oil opec"),
        doc_at("2014-01-06T11:00:00Z", "oil price"),
        doc_at("2014-01-07T10:00:00Z", "oil barrel"),
        doc_at("2014-01-07T11:00:00Z", "oil price"),
    };
    const auto idf = build_idf(corpus);
    CHECK(complexity_score(Tokens{"oil", "oil"}, idf) == 0.0);
    CHECK(complexity_score(Tokens{"opec"}, idf) == doctest::Approx(std::log(4.0)));
    CHECK(complexity_score(Tokens{}, idf) == 0.0);
    const double expected = (0.0 + std::log(2.0) + std::log(4.0)) / 3.0;
    CHECK(complexity_score(Tokens{"oil", "price", "barrel"}, idf) == doctest::Approx(expected));
}

TEST_CASE("removing the most common token never lowers complexity") {
    std::mt19937_64 rng(4);
    const Tokens vocab{"oil", "price", "crude", "opec", "barrel", "brent", "wti", "supply", "glut", "rig"};
    std::vector<Document> corpus;
    for (int i = 0; i < 40; ++i) {
        std::string text;
        const auto len = 1 + rng() % 6;
        for (std::size_t j = 0; j < len; ++j) text += vocab[rng() % std::min<std::size_t>(vocab.size(), 1 + rng() % 10)] + " ";
        corpus.push_back(doc_at("2014-01-06T10:00:00Z", text));
    }
    const auto idf = build_idf(corpus);
    for (const auto& d : corpus) {
        auto tokens = tokenize(d.text);
        if (tokens.size() < 2) continue;
        const double before = complexity_score(tokens, idf);
        auto common = std::min_element(tokens.begin(), tokens.end(),
                                       [&](const auto& a, const auto& b) { return idf.idf(a) < idf.idf(b); });
        tokens.erase(common);
        CHECK(complexity_score(tokens, idf) >= before - 1e-15);
    }
}

TEST_CASE("idf and complexity are order free and reproducible") {
    std::vector<Document> corpus{
        doc_at("2014-01-06T10:00:00Z", "oil opec glut"),
        doc_at("2014-01-06T11:00:00Z", "oil price"),
        doc_at("2014-01-07T10:00:00Z", "brent barrel glut"),
    };
    const auto a = build_idf(corpus);
    std::reverse(corpus.begin(), corpus.end());
    const auto b = build_idf(corpus);
    for (const auto& d : corpus) CHECK(complexity_score(d, a) == complexity_score(d, b));
}

TEST_CASE("aggregate_daily examples") {
    SUBCASE("three docs on one day") {
        const std::vector<Document> docs{
            doc_at("2014-01-06T09:00:00Z", "gain rally"),
            doc_at("2014-01-06T10:00:00Z", "oil price"),
            doc_at("2014-01-06T11:00:00Z", "crash fall"),
        };
        const auto out = aggregate_daily(docs, lexicon(), default_calendar());
        REQUIRE(out.messages.size() == 1);
        CHECK(out.messages[0] == 3.0);
        CHECK(out.sentiment[0] == doctest::Approx((1.0 + 0.5 + 0.0) / 3.0));
        CHECK(out.emotionality[0] == doctest::Approx(0.0));
    }
    SUBCASE("all neutral docs give zero emotionality, empty days get defaults") {
        const std::vector<Document> docs{
            doc_at("2014-01-06T09:00:00Z", "oil price"),
            doc_at("2014-01-08T10:00:00Z", "opec meeting"),
            doc_at("2014-01-11T10:00:00Z", "weekend post"),
            doc_at("2014-01-13T10:00:00Z", "brent"),
        };
        const auto out = aggregate_daily(docs, lexicon(), default_calendar());
        REQUIRE(out.messages.size() == 6);
        CHECK(out.messages.start_date() == ymd(2014, 1, 6));
        CHECK(out.messages.end_date() == ymd(2014, 1, 13));
        for (double e : out.emotionality.values()) CHECK(e == 0.0);
        CHECK(out.messages[1] == 0.0);
        CHECK(out.sentiment[1] == 0.5);
        CHECK(out.complexity[1] == 0.0);
        CHECK(out.messages.name() == "twitter_messages");
    }
    SUBCASE("saturday-only docs") {
        const std::vector<Document> docs{doc_at("2014-01-11T09:00:00Z", "oil"), doc_at("2014-01-11T12:00:00Z", "gain")};
        CHECK(code_of([&] { aggregate_daily(docs, lexicon(), default_calendar()); }) == ErrorCode::EmptyAfterAlignment);
    }
    SUBCASE("empty corpus") {
        CHECK(code_of([] { aggregate_daily(std::span<const Document>{}, lexicon(), default_calendar()); }) ==
              ErrorCode::EmptyCorpus);
    }
}

TEST_CASE("daily signals share dates and keep the emotionality identity") {
    std::mt19937_64 rng(21);
    const Tokens words{"gain", "fall", "oil", "rally", "crash", "opec", "weak", "strong", "price"};
    std::vector<Document> docs;
    for (int i = 0; i < 300; ++i) {
        const int day = 1 + static_cast<int>(rng() % 28);
        std::string text;
        for (int j = 0; j < 4; ++j) text += words[rng() % words.size()] + " ";
        char ts[32];
        std::snprintf(ts, sizeof ts, "2014-02-%02dT%02d:00:00Z", day, static_cast<int>(rng() % 24));
        docs.push_back(doc_at(ts, text));
    }
    const auto out = aggregate_daily(docs, lexicon(), default_calendar());
    CHECK(out.messages.dates() == out.sentiment.dates());
    CHECK(out.messages.dates() == out.emotionality.dates());
    CHECK(out.messages.dates() == out.complexity.dates());
    double total = 0;
    for (std::size_t i = 0; i < out.sentiment.size(); ++i) {
        CHECK(out.sentiment[i] >= 0.0);
        CHECK(out.sentiment[i] <= 1.0);
        CHECK(out.complexity[i] >= 0.0);
        CHECK(out.emotionality[i] == doctest::Approx(2.0 * std::abs(out.sentiment[i] - 0.5)));
        total += out.messages[i];
    }
    std::size_t weekday_docs = 0;
    for (const auto& d : docs) weekday_docs += default_calendar()->is_business_day(std::chrono::floor<std::chrono::days>(d.timestamp));
    CHECK(total == static_cast<double>(weekday_docs));

    // Shuffled input order produces identical output.
    std::shuffle(docs.begin(), docs.end(), rng);
    const auto again = aggregate_daily(docs, lexicon(), default_calendar());
    for (std::size_t i = 0; i < out.sentiment.size(); ++i) {
        CHECK(again.sentiment[i] == doctest::Approx(out.sentiment[i]).epsilon(1e-14));
        CHECK(again.complexity[i] == doctest::Approx(out.complexity[i]).epsilon(1e-14));
    }
}
