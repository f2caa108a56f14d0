#include <crudecast/arima.hpp>
#include <crudecast/error.hpp>
#include <crudecast/evaluation.hpp>
#include <crudecast/pipeline.hpp>
#include <crudecast/synthetic.hpp>
#include <crudecast/text_metrics.hpp>

#include <fmt/format.h>
#include <json.hpp>
#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace crudecast::synthetic {

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace std::chrono;

namespace {

constexpr std::size_t kSpan = 372;
constexpr Date kEnd{year{2015} / 4 / 1};
constexpr Date kBoundary{year{2015} / 3 / 14};
constexpr double kContributionSd = 1.5;

// US exchange holidays that fall on weekdays, 2013-2015.
const char* const kHolidays[] = {
    "2013-01-01", "2013-01-21", "2013-02-18", "2013-03-29", "2013-05-27", "2013-07-04", "2013-09-02",
    "2013-11-28", "2013-12-25", "2014-01-01", "2014-01-20", "2014-02-17", "2014-04-18", "2014-05-26",
    "2014-07-04", "2014-09-01", "2014-11-27", "2014-12-25", "2015-01-01", "2015-01-19", "2015-02-16",
    "2015-04-03", "2015-05-25", "2015-07-03", "2015-09-07", "2015-11-26", "2015-12-25",
};

const std::vector<std::string> kPositive = {"gain",   "gains",  "rise",    "rally",   "surge",  "strong", "boost",
                                            "growth", "bullish", "recover", "rebound", "profit", "higher", "optimistic",
                                            "soar",   "climb",  "jump",    "upbeat",  "robust", "good"};
const std::vector<std::string> kNegative = {"fall",   "drop",     "crash",  "plunge", "weak",    "loss",   "bearish",
                                            "slump",  "decline",  "lower",  "fear",   "glut",    "oversupply", "sink",
                                            "tumble", "slide",    "slash",  "worst",  "gloomy",  "bad"};
const std::vector<std::string> kCommon = {"market", "today",  "trading", "barrel", "news",    "energy", "supply",
                                          "demand", "report", "week",    "says",   "futures", "stocks", "dollar",
                                          "now",    "traders", "update", "watch",  "latest",  "day"};
const std::vector<std::string> kRare = {
    "contango",     "backwardation", "cushing",      "distillate",   "throughput",  "refinery",    "crackspread",
    "inventories",  "hedging",       "netbacks",     "fracking",     "shale",       "rigcount",    "sweet",
    "sour",         "api",           "gravity",      "sulfur",       "feedstock",   "condensate",  "midstream",
    "upstream",     "downstream",    "tanker",       "storage",      "brentwti",    "differential", "arbitrage",
    "swaps",        "options",       "volatility",   "openinterest", "curve",       "spreads",     "quota",
    "embargo",      "sanctions",     "pipeline",     "keystone",     "bakken",      "permian",     "eagleford",
    "deepwater",    "offshore",     "breakeven",    "capex",        "hedgebook",   "roll",        "expiry",
    "margin",       "liquidity",    "petrodollar",  "benchmark",    "assay",       "blend",       "nymex",
    "ice",          "settlement",   "physical",     "paper",        "speculators", "cftc",        "cot",
    "longs",        "shorts",       "squeeze",      "coverage",     "drawdown",    "buildup",     "utilization",
};
const std::vector<std::string> kOrganizations = {"opec",           "exxon mobil", "chevron",       "bp",
                                                 "royal dutch shell", "saudi aramco", "goldman sachs", "conocophillips",
                                                 "energy information administration", "international energy agency"};

std::string gzip(const std::string& data) {
    z_stream zs{};
    if (deflateInit2(&zs, 9, Z_DEFLATED, 15 + 16, 9, Z_DEFAULT_STRATEGY) != Z_OK) {
        throw Error(ErrorCode::Io, "zlib initialisation failed");
    }
    std::string out(deflateBound(&zs, static_cast<uLong>(data.size())), '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&zs, Z_FINISH);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw Error(ErrorCode::Io, "gzip compression failed");
    out.resize(zs.total_out);
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << content;
}

class Draws {
public:
    explicit Draws(std::uint64_t seed) : rng_(seed) {}
    double normal() { return norm_(rng_); }
    double uniform() { return unif_(rng_); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }
    int between(int lo, int hi) { return lo + static_cast<int>(index(static_cast<std::size_t>(hi - lo + 1))); }

    // Stationary AR(1) path started at its mean.
    std::vector<double> ar1(std::size_t n, double mean, double phi, double sd) {
        std::vector<double> x(n);
        double v = mean;
        for (auto& xi : x) {
            v = mean + phi * (v - mean) + sd * normal();
            xi = v;
        }
        return x;
    }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> norm_{0.0, 1.0};
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

std::vector<eval::ModelDefinition> battery_models() {
    const arima::ArimaSpec base{2, 1, 4, false};
    auto model = [&](std::string name, std::vector<std::pair<std::string, int>> terms) {
        eval::ModelDefinition m{std::move(name), {base, {}}};
        for (auto& [signal, lag] : terms) m.spec.exog.push_back({signal, lag, true});
        return m;
    };
    return {
        model("Model 1", {}),
        model("Model 2", {{"nasdaq100", 1}}),
        model("Model 3", {{"twitter_messages", 3}, {"twitter_sentiment", 3}, {"twitter_emotionality", 1}}),
        model("Model 4", {{"twitter_complexity", 1}}),
        model("Model 5", {{"trends_opec", 2}, {"trends_price_of_oil", 3}}),
        model("Model 6", {{"wiki_opec", 2}, {"wiki_price_of_oil", 3}}),
        model("Model 7", {{"gdelt_organizations", 3}, {"gdelt_articles", 2}}),
        model("Model 8", {{"nasdaq100", 1}, {"twitter_complexity", 1}, {"wiki_price_of_oil", 3}, {"gdelt_articles", 2}}),
    };
}

json config_json(std::uint64_t seed) {
    json models = json::array();
    for (const auto& m : battery_models()) {
        json exog = json::array();
        for (const auto& t : m.spec.exog) exog.push_back({{"signal", t.name}, {"lag", t.lag}});
        models.push_back({{"name", m.name}, {"exog", exog}});
    }
    return json{
        {"calendar", {{"holidays_file", "holidays.txt"}, {"weekend", {0, 6}}}},
        {"target", {{"name", "wti"}, {"file", "wti.csv"}}},
        {"controls", json::array({{{"name", "nasdaq100"}, {"file", "nasdaq100.csv"}}})},
        {"tweets",
         {{"file", "tweets.jsonl.gz"},
          {"query_terms", {"crude oil price", "oil price", "wti"}},
          {"exclusion_terms", {"frying", "olive oil", "palm oil"}},
          {"lexicon", {{"positive", "lexicon/positive.txt"}, {"negative", "lexicon/negative.txt"}}}}},
        {"pageviews", {{"file", "pageviews.jsonl"}, {"titles", {"Price of oil", "OPEC"}}}},
        {"trends", json::array({{{"query", "OPEC"}, {"file", "trends_opec.csv"}},
                                {{"query", "Price of oil"}, {"file", "trends_price_of_oil.csv"}}})},
        {"gkg", {{"files", {"gkg.tsv.gz"}}, {"query_terms", {"WTI Crude Oil Price"}}, {"match_field", "themes"}}},
        {"lag_cap", 3},
        {"boundary", format_date(kBoundary)},
        {"forecast_mode", "rolling"},
        {"order", {2, 1, 4}},
        {"adf", {{"regression", "constant"}}},
        {"granger", {{"form", "wald_chi2"}}},
        {"order_selection", {{"p_max", 3}, {"q_max", 4}, {"d", 1}}},
        {"models", models},
        {"figure_model", "Model 8"},
        {"output_dir", "out"},
        {"seed", seed},
    };
}

std::string price_csv(const std::vector<Date>& dates, const std::vector<double>& values) {
    std::string out = "date,value\n";
    for (std::size_t i = 0; i < dates.size(); ++i) out += fmt::format("{},{:.2f}\n", format_date(dates[i]), values[i]);
    return out;
}

std::string timestamp_text(sys_seconds ts, bool with_offset) {
    if (!with_offset) return text::format_timestamp(ts);
    auto local = text::format_timestamp(ts + hours{2});
    local.pop_back();
    return local + "+02:00";
}

struct Media {
    std::vector<Date> days;     ///< calendar days covered by media files
    std::vector<double> gdelt;  ///< matching article counts per calendar day
};

Media write_media(const fs::path& dir, const std::vector<Date>& span, const TradingCalendar& cal, Draws& rng) {
    Media media;
    const Date first = span.front() - days{14};
    const Date last = span.back() + days{7};
    for (Date d = first; d <= last; d += days{1}) media.days.push_back(d);
    const std::size_t n = media.days.size();

    const auto rare_share = rng.ar1(n, 0.3, 0.97, 0.035);
    const auto wiki_oil = rng.ar1(n, 3000.0, 0.97, 150.0);
    const auto wiki_opec = rng.ar1(n, 1500.0, 0.97, 80.0);
    const auto trends_opec = rng.ar1(n, 45.0, 0.95, 3.0);
    const auto gdelt_level = rng.ar1(n, 25.0, 0.95, 2.5);

    // Tweets: volume follows Wikipedia interest, vocabulary rarity and
    // sentiment extremity follow one driver.
    std::string tweets;
    int sign = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.uniform() < 0.03) sign = -sign;
        const double r = std::clamp(rare_share[i], 0.03, 0.65);
        const double p_pos = std::clamp(0.5 + sign * 1.2 * (r - 0.03), 0.05, 0.95);
        const int count = std::clamp(static_cast<int>(std::lround(20.0 + (wiki_oil[i] - 3000.0) / 150.0)), 5, 40);
        const auto day_start = sys_seconds{media.days[i]};
        auto emit = [&](const std::string& text) {
            const auto ts = day_start + seconds{rng.between(0, 86399)};
            const bool offset = rng.uniform() < 0.1;
            tweets += json{{"timestamp", timestamp_text(ts, offset)}, {"text", text}}.dump() + "\n";
        };
        static const char* const kPhrases[] = {"crude oil price", "oil price", "WTI crude"};
        for (int k = 0; k < count; ++k) {
            std::vector<std::string> words;
            const int len = rng.between(6, 10);
            for (int w = 0; w < len; ++w) {
                if (rng.uniform() < 0.25) {
                    words.push_back(rng.uniform() < p_pos ? kPositive[rng.index(kPositive.size())]
                                                          : kNegative[rng.index(kNegative.size())]);
                } else if (rng.uniform() < r) {
                    words.push_back(kRare[rng.index(kRare.size())]);
                } else {
                    words.push_back(kCommon[rng.index(kCommon.size())]);
                }
            }
            words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.index(words.size() + 1)),
                         kPhrases[rng.index(3)]);
            std::string text;
            if (rng.uniform() < 0.15) text += "@trader" + std::to_string(rng.between(1, 99)) + " ";
            for (std::size_t w = 0; w < words.size(); ++w) text += (w ? " " : "") + words[w];
            if (rng.uniform() < 0.2) text += " http://t.co/" + std::to_string(rng.between(10000, 99999));
            emit(text);
        }
        emit("olive oil for frying tonight with friends");
        emit("new phone battery life is great today");
        if (i % 3 == 0) emit("palm oil price " + kNegative[rng.index(kNegative.size())] + " in asia");
        if (i % 97 == 5) {
            tweets += json{{"timestamp", text::format_timestamp(day_start + hours{12})}}.dump() + "\n";
        }
    }
    write_file(dir / "tweets.jsonl.gz", gzip(tweets));

    std::string pageviews;
    for (std::size_t i = 0; i < n; ++i) {
        const auto date = format_date(media.days[i]);
        const auto oil = std::max<long long>(50, std::llround(wiki_oil[i]));
        const auto desktop = oil * 7 / 10;
        pageviews += json{{"date", date}, {"article", "Price_of_oil"}, {"access", "desktop"}, {"views", desktop}}.dump() + "\n";
        pageviews += json{{"date", date}, {"article", "Price_of_oil"}, {"access", "mobile-web"}, {"views", oil - desktop}}.dump() + "\n";
        pageviews += json{{"date", date}, {"article", "OPEC"}, {"access", "all-access"},
                          {"views", std::max<long long>(50, std::llround(wiki_opec[i]))}}.dump() + "\n";
        pageviews += json{{"date", date}, {"article", "Petroleum"}, {"access", "all-access"},
                          {"views", 5000 + rng.between(-400, 400)}}.dump() + "\n";
    }
    write_file(dir / "pageviews.jsonl", pageviews);

    std::string t_opec = "date,relative_volume\n";
    std::string t_oil = "date,relative_volume\n";
    for (std::size_t i = 0; i < n; ++i) {
        const auto date = format_date(media.days[i]);
        const long v_opec = std::clamp(std::lround(trends_opec[i]), 0L, 100L);
        const long v_oil = std::clamp(std::lround(50.0 + (wiki_oil[i] - 3000.0) / 40.0 + rng.normal()), 0L, 100L);
        t_opec += fmt::format("{},{}\n", date, v_opec);
        t_oil += fmt::format("{},{}\n", date, v_oil);
    }
    write_file(dir / "trends_opec.csv", t_opec);
    write_file(dir / "trends_price_of_oil.csv", t_oil);

    std::string gkg = "DATE\tNUMARTS\tCOUNTS\tTHEMES\tLOCATIONS\tPERSONS\tORGANIZATIONS\tTONE\tCAMEOEVENTIDS\tSOURCES\tSOURCEURLS\n";
    media.gdelt.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ymd = year_month_day{media.days[i]};
        const auto date = fmt::format("{:04d}{:02d}{:02d}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                                      static_cast<unsigned>(ymd.day()));
        const int matching = std::max(1, static_cast<int>(std::lround(gdelt_level[i])));
        media.gdelt[i] = matching;
        auto record = [&](const std::string& themes, bool with_orgs) {
            std::string orgs;
            if (with_orgs) {
                const int k = rng.between(0, 4);
                for (int o = 0; o < k; ++o) orgs += (o ? ";" : "") + kOrganizations[rng.index(kOrganizations.size())];
            }
            const int id = rng.between(100000, 999999);
            gkg += fmt::format("{}\t{}\t\t{}\t1#United States#US#US#38#-97#US\t\t{}\t{:.2f},2.1,3.4,5.5,21.0,0,{}\t\t"
                               "source{}.example\thttp://news.example/{}\n",
                               date, rng.between(1, 3), themes, orgs, rng.normal() * 2.0, 150 + rng.between(0, 300),
                               id % 7, id);
        };
        for (int k = 0; k < matching; ++k) record("ECON_OILPRICE;WTI CRUDE OIL PRICE;ENERGY", true);
        for (int k = 0; k < 5; ++k) record("TAX_FNCACT;EDUCATION;ELECTION", true);
        if (i % 120 == 7) gkg += date + "\t1\ttruncated record\n";
        if (i % 150 == 11) gkg += "2014XX01\t1\t\tWTI CRUDE OIL PRICE\t\t\tOPEC\t0\t\ts\tu\n";
    }
    write_file(dir / "gkg.tsv.gz", gzip(gkg));

    // Nasdaq reacts to the previous business day's news volume.
    auto gdelt_on = [&](Date d) {
        return media.gdelt[static_cast<std::size_t>((d - media.days.front()).count())];
    };
    std::vector<Date> nasdaq_dates;
    for (Date d = cal.advance(span.front(), -5); d <= span.back(); d = cal.next(d)) nasdaq_dates.push_back(d);
    std::vector<double> nasdaq;
    double level = 3300.0;
    for (std::size_t b = 0; b < nasdaq_dates.size(); ++b) {
        if (b >= 2) level += -6.0 * (gdelt_on(nasdaq_dates[b - 1]) - gdelt_on(nasdaq_dates[b - 2])) + 12.0 * rng.normal();
        nasdaq.push_back(level);
    }
    write_file(dir / "nasdaq100.csv", price_csv(nasdaq_dates, nasdaq));
    return media;
}

void write_static(const fs::path& dir) {
    std::string holidays = "# US exchange holidays (weekday observances)\n";
    for (const char* h : kHolidays) holidays += std::string(h) + "\n";
    write_file(dir / "holidays.txt", holidays);
    std::string pos = "# positive terms\n";
    for (const auto& w : kPositive) pos += w + "\n";
    std::string neg = "# negative terms\n";
    for (const auto& w : kNegative) neg += w + "\n";
    write_file(dir / "lexicon/positive.txt", pos);
    write_file(dir / "lexicon/negative.txt", neg);
}

double diff_sd(std::span<const double> x) {
    if (x.size() < 3) return 0.0;
    double mean = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) mean += x[i] - x[i - 1];
    mean /= static_cast<double>(x.size() - 1);
    double acc = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) acc += (x[i] - x[i - 1] - mean) * (x[i] - x[i - 1] - mean);
    return std::sqrt(acc / static_cast<double>(x.size() - 2));
}

} // namespace

FixtureSummary generate_fixture(const fs::path& dir, const FixtureOptions& options) {
    fs::create_directories(dir);
    write_static(dir);
    auto calendar = std::make_shared<const TradingCalendar>(TradingCalendar::from_holiday_file(dir / "holidays.txt"));
    const Date start = calendar->advance(kEnd, -static_cast<std::ptrdiff_t>(kSpan - 1));
    const auto span = calendar->business_days(start, kEnd);
    const auto models = battery_models();
    const fs::path work = dir / ".work";

    for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
        const std::uint64_t seed = options.seed + static_cast<std::uint64_t>(attempt);
        Draws rng(seed);
        write_media(dir, span, *calendar, rng);
        write_file(dir / "wti.csv", price_csv(span, std::vector<double>(span.size(), 100.0)));
        write_file(dir / "config.json", config_json(seed).dump(2) + "\n");

        auto cfg = pipeline::load_config(dir / "config.json");
        cfg.output_dir = work;
        pipeline::Pipeline pipe(cfg);
        pipe.run_stage(pipeline::Stage::Ingest);
        pipe.run_stage(pipeline::Stage::Features);
        const auto signals = pipeline::read_signals_csv(work / "features/signals.csv", calendar);

        const arima::ArimaxSpec noise_spec{{2, 1, 4, false}, {}};
        const arima::ArimaParams noise_params{{0.5, -0.2}, {0.3, 0.1, -0.1, 0.05}, {}, 0.0, 0.25};
        arima::SimulationOptions sim_opts;
        sim_opts.start = span.front();
        sim_opts.calendar = calendar;
        const auto noise = arima::simulate(noise_spec, noise_params, {}, span.size(), seed, sim_opts);

        std::vector<double> price(span.size());
        for (std::size_t t = 0; t < span.size(); ++t) price[t] = 95.0 + noise[t];
        const std::pair<const char*, int> planted[] = {{"twitter_complexity", 1}, {"wiki_price_of_oil", 3}, {"gdelt_articles", 2}};
        for (const auto& [name, lag_k] : planted) {
            const auto& x = signals.at(name);
            const double beta = -kContributionSd / diff_sd(x.values());
            for (std::size_t t = 0; t < span.size(); ++t) {
                const std::size_t src = t >= static_cast<std::size_t>(lag_k) ? t - static_cast<std::size_t>(lag_k) : 0;
                price[t] += beta * (x[src] - x[0]);
            }
        }
        for (auto& p : price) p = std::round(p * 100.0) / 100.0;
        const double min_price = *std::min_element(price.begin(), price.end());
        fs::remove_all(work);
        if (min_price <= 10.0) continue;

        const DailySeries target("wti", calendar, span.front(), price, "synthetic");
        std::vector<DailySeries> with_target;
        for (const auto& s : signals) with_target.push_back(s.name() == "wti" ? target : s);
        eval::BatteryOptions bopts;
        bopts.fit.seed = seed;
        const auto reports = eval::model_battery(target, SignalSet(with_target), models, kBoundary, bopts);
        if (!std::all_of(reports.begin(), reports.end(), [](const eval::ForecastReport& r) { return r.ok(); })) continue;

        const double baseline = reports.front().rmse;
        const double combined = reports.back().rmse;
        bool ordered = true;
        for (std::size_t i = 1; i + 1 < reports.size(); ++i) {
            ordered = ordered && combined < reports[i].rmse && reports[i].rmse < baseline;
        }
        if (!ordered || baseline / combined < 3.0) continue;

        write_file(dir / "wti.csv", price_csv(span, price));
        FixtureSummary summary;
        summary.seed_used = seed;
        summary.attempts = attempt + 1;
        for (const auto& r : reports) summary.rmse.emplace_back(r.model_name, r.rmse);
        summary.baseline_over_combined = baseline / combined;
        summary.min_price = min_price;
        summary.accepted = true;
        json rmse = json::object();
        for (const auto& [name, v] : summary.rmse) rmse[name] = v;
        write_file(dir / "generation.json", json{{"seed", seed},
                                                 {"attempts", summary.attempts},
                                                 {"rmse", rmse},
                                                 {"baseline_over_combined", summary.baseline_over_combined},
                                                 {"min_price", min_price},
                                                 {"observations", span.size()},
                                                 {"first_date", format_date(span.front())},
                                                 {"last_date", format_date(span.back())}}
                                                .dump(2) + "\n");
        return summary;
    }
    throw Error(ErrorCode::StageFailure,
                fmt::format("no fixture draw met the ordering constraints in {} attempts", options.max_attempts));
}

} // namespace crudecast::synthetic
