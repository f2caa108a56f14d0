#include "digest.hpp"
#include "parallel.hpp"
#include "svg_plot.hpp"

#include <crudecast/error.hpp>
#include <crudecast/pipeline.hpp>
#include <crudecast/text_metrics.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace crudecast::pipeline {

using json = nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& message) { throw Error(ErrorCode::Validation, message); }

fs::path resolve(const fs::path& base, const fs::path& p) {
    return (p.is_absolute() ? p : base / p).lexically_normal();
}

std::vector<std::string> string_list(const json& j, const char* key) {
    std::vector<std::string> out;
    if (!j.contains(key)) return out;
    for (const auto& v : j.at(key)) out.push_back(v.get<std::string>());
    return out;
}

eval::ModelDefinition parse_model(const json& j, const arima::ArimaSpec& default_order) {
    eval::ModelDefinition m;
    m.name = j.at("name").get<std::string>();
    m.spec.base = default_order;
    if (j.contains("order")) {
        const auto o = j.at("order").get<std::vector<int>>();
        if (o.size() != 3) invalid("model '" + m.name + "': order must be [p, d, q]");
        m.spec.base.p = o[0];
        m.spec.base.d = o[1];
        m.spec.base.q = o[2];
        m.spec.base.include_constant = m.spec.base.d == 0;
    }
    if (j.contains("include_constant")) m.spec.base.include_constant = j.at("include_constant").get<bool>();
    if (j.contains("exog")) {
        for (const auto& e : j.at("exog")) {
            arima::ExogTerm term;
            term.name = e.at("signal").get<std::string>();
            term.lag = e.value("lag", 1);
            term.difference_like_target = e.value("difference", true);
            m.spec.exog.push_back(std::move(term));
        }
    }
    return m;
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return in;
}

std::string read_file(const fs::path& path) {
    auto in = open_input(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt_num(double v) { return format_number(v); }

std::string fmt_opt(double v, const char* spec = "{:.4f}") {
    return std::isfinite(v) ? fmt::format(fmt::runtime(spec), v) : std::string("nan");
}

// Digests of everything a stage reads and writes.
class StageRecord {
public:
    StageRecord(const PipelineConfig& cfg) : cfg_(cfg) {}

    void config_input(const fs::path& path) {
        const auto rel = path.lexically_relative(cfg_.base_dir);
        inputs_["config:" + (rel.empty() ? path.filename() : rel).generic_string()] = detail::sha256_file(path);
    }

    fs::path artifact_input(const std::string& rel) {
        const auto path = cfg_.output_dir / rel;
        inputs_[rel] = detail::sha256_file(path);
        return path;
    }

    void write(const std::string& rel, const std::string& content) {
        const auto path = cfg_.output_dir / rel;
        fs::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
        out << content;
        if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
        outputs_[rel] = detail::sha256_hex(content);
    }

    json& counts() { return counts_; }

    json to_json() const { return json{{"inputs", inputs_}, {"outputs", outputs_}, {"counts", counts_}}; }

private:
    const PipelineConfig& cfg_;
    std::map<std::string, std::string> inputs_;
    std::map<std::string, std::string> outputs_;
    json counts_ = json::object();
};

std::string series_csv(const DailySeries& s) {
    std::ostringstream out;
    write_series_csv(out, s);
    return out.str();
}

std::vector<std::string> price_names(const PipelineConfig& cfg) {
    std::vector<std::string> names{cfg.target.name};
    for (const auto& c : cfg.controls) names.push_back(c.name);
    return names;
}

// Series produced by the ingest stage, in feature order (tweets excluded).
std::vector<std::string> ingested_names(const PipelineConfig& cfg) {
    auto names = price_names(cfg);
    for (const auto& t : cfg.trends) names.push_back("trends_" + ingest::slug(t.query));
    if (cfg.pageviews) {
        for (const auto& title : cfg.pageviews->titles) names.push_back("wiki_" + ingest::slug(title));
    }
    if (cfg.gkg) {
        names.emplace_back("gdelt_articles");
        names.emplace_back("gdelt_organizations");
    }
    return names;
}

json stats_json(const ingest::ParseStats& st) {
    constexpr std::size_t kMaxWarnings = 20;
    std::vector<std::string> w(st.warnings.begin(),
                               st.warnings.begin() + static_cast<std::ptrdiff_t>(std::min(kMaxWarnings, st.warnings.size())));
    return json{{"records", st.records},
                {"kept", st.kept},
                {"skipped", st.skipped},
                {"filtered", st.filtered},
                {"warnings", w},
                {"warnings_total", st.warnings.size()}};
}

std::string model_slug(const std::string& name) {
    const auto s = ingest::slug(name);
    return s.empty() ? "model" : s;
}

void update_manifest(const PipelineConfig& cfg, Stage stage, const StageRecord& record) {
    const auto path = cfg.output_dir / "manifest.json";
    json manifest = json::object();
    if (fs::exists(path)) {
        try {
            manifest = json::parse(read_file(path));
        } catch (const json::exception&) {
            manifest = json::object();
        }
    }
    if (!manifest.contains("stages") || !manifest["stages"].is_object()) manifest["stages"] = json::object();
    // Artifacts of later stages are stale once an earlier stage reruns.
    bool later = false;
    for (Stage s : kAllStages) {
        if (s == stage) later = true;
        if (later) manifest["stages"].erase(std::string(to_string(s)));
    }
    manifest["stages"][std::string(to_string(stage))] = record.to_json();
    manifest["version"] = CRUDECAST_VERSION;
    manifest["seed"] = cfg.seed;
    manifest["config_sha256"] = detail::sha256_hex(cfg.source_text);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << manifest.dump(2) << '\n';
}

} // namespace

std::string_view to_string(Stage stage) noexcept {
    switch (stage) {
    case Stage::Ingest: return "ingest";
    case Stage::Features: return "features";
    case Stage::Correlate: return "correlate";
    case Stage::Granger: return "granger";
    case Stage::Fit: return "fit";
    case Stage::Report: return "report";
    }
    return "unknown";
}

std::optional<Stage> stage_from_string(std::string_view name) noexcept {
    for (Stage s : kAllStages) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

PipelineConfig parse_config(std::string_view json_text, const fs::path& base_dir) {
    PipelineConfig cfg;
    cfg.base_dir = base_dir;
    cfg.source_text = std::string(json_text);
    try {
        const auto j = json::parse(json_text);
        const auto path_of = [&](const json& node, const char* key) { return resolve(base_dir, node.at(key).get<std::string>()); };

        if (j.contains("calendar")) {
            const auto& c = j.at("calendar");
            if (c.contains("holidays_file")) cfg.holidays_file = path_of(c, "holidays_file");
            if (c.contains("weekend")) cfg.weekend = c.at("weekend").get<std::vector<unsigned>>();
        }
        const auto& t = j.at("target");
        cfg.target = {t.at("name").get<std::string>(), path_of(t, "file")};
        if (j.contains("controls")) {
            for (const auto& c : j.at("controls")) cfg.controls.push_back({c.at("name").get<std::string>(), path_of(c, "file")});
        }
        if (j.contains("tweets")) {
            const auto& tw = j.at("tweets");
            TweetsInput in;
            in.file = path_of(tw, "file");
            in.query_terms = string_list(tw, "query_terms");
            in.exclusion_terms = string_list(tw, "exclusion_terms");
            in.lexicon_positive = path_of(tw.at("lexicon"), "positive");
            in.lexicon_negative = path_of(tw.at("lexicon"), "negative");
            cfg.tweets = std::move(in);
        }
        if (j.contains("pageviews")) {
            const auto& pv = j.at("pageviews");
            cfg.pageviews = PageviewsInput{path_of(pv, "file"), string_list(pv, "titles")};
        }
        if (j.contains("trends")) {
            for (const auto& tr : j.at("trends")) cfg.trends.push_back({tr.at("query").get<std::string>(), path_of(tr, "file")});
        }
        if (j.contains("gkg")) {
            const auto& g = j.at("gkg");
            GkgInput in;
            for (const auto& f : g.at("files")) in.files.push_back(resolve(base_dir, f.get<std::string>()));
            in.query_terms = string_list(g, "query_terms");
            const auto field = g.value("match_field", std::string("themes"));
            if (field == "themes") in.match_field = ingest::GkgMatchField::Themes;
            else if (field == "full_record") in.match_field = ingest::GkgMatchField::FullRecord;
            else invalid("gkg.match_field must be 'themes' or 'full_record'");
            cfg.gkg = std::move(in);
        }
        cfg.lag_cap = j.value("lag_cap", kMaxLag);
        try {
            cfg.boundary = parse_date(j.at("boundary").get<std::string>());
        } catch (const Error& e) {
            invalid(std::string("boundary: ") + e.what());
        }
        const auto mode = j.value("forecast_mode", std::string("rolling"));
        if (mode == "rolling") cfg.forecast_mode = eval::ForecastMode::Rolling;
        else if (mode == "trajectory") cfg.forecast_mode = eval::ForecastMode::Trajectory;
        else invalid("forecast_mode must be 'rolling' or 'trajectory'");

        if (j.contains("adf")) {
            const auto& a = j.at("adf");
            if (a.contains("max_lags") && !a.at("max_lags").is_null()) cfg.adf_max_lags = a.at("max_lags").get<int>();
            const auto kind = a.value("regression", std::string("constant"));
            if (kind == "none") cfg.adf_kind = econo::RegressionKind::None;
            else if (kind == "constant") cfg.adf_kind = econo::RegressionKind::Constant;
            else if (kind == "constant_trend") cfg.adf_kind = econo::RegressionKind::ConstantTrend;
            else invalid("adf.regression must be none, constant or constant_trend");
        }
        if (j.contains("granger")) {
            const auto form = j.at("granger").value("form", std::string("wald_chi2"));
            if (form == "wald_chi2") cfg.granger_form = econo::GrangerForm::WaldChi2;
            else if (form == "f") cfg.granger_form = econo::GrangerForm::F;
            else invalid("granger.form must be 'wald_chi2' or 'f'");
        }
        if (j.contains("order_selection")) {
            const auto& o = j.at("order_selection");
            cfg.order_selection = OrderGrid{o.value("p_max", 3), o.value("q_max", 4), o.value("d", 1)};
        }
        arima::ArimaSpec default_order{2, 1, 4, false};
        if (j.contains("order")) {
            const auto o = j.at("order").get<std::vector<int>>();
            if (o.size() != 3) invalid("order must be [p, d, q]");
            default_order = {o[0], o[1], o[2], o[1] == 0};
        }
        if (j.contains("include_constant")) default_order.include_constant = j.at("include_constant").get<bool>();
        for (const auto& m : j.at("models")) cfg.models.push_back(parse_model(m, default_order));
        cfg.figure_model = j.value("figure_model", std::string());
        cfg.output_dir = resolve(base_dir, j.value("output_dir", std::string("out")));
        cfg.seed = j.value("seed", std::uint64_t{0});
    } catch (const json::exception& e) {
        invalid(std::string("config: ") + e.what());
    }
    return cfg;
}

PipelineConfig load_config(const fs::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        invalid(e.what());
    }
    const auto base = fs::absolute(path).parent_path();
    return parse_config(text, base);
}

void apply_environment(PipelineConfig& config) {
    if (const char* out = std::getenv("CRUDECAST_OUT_DIR"); out && *out) config.output_dir = out;
    if (const char* seed = std::getenv("CRUDECAST_SEED"); seed && *seed) {
        std::uint64_t v = 0;
        const std::string_view s(seed);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) invalid("CRUDECAST_SEED is not an unsigned integer");
        config.seed = v;
    }
}

namespace {

CalendarPtr make_calendar(const PipelineConfig& cfg) {
    std::set<unsigned> weekend(cfg.weekend.begin(), cfg.weekend.end());
    if (cfg.holidays_file) {
        return std::make_shared<const TradingCalendar>(TradingCalendar::from_holiday_file(*cfg.holidays_file, weekend));
    }
    return std::make_shared<const TradingCalendar>(weekend, std::set<Date>{});
}

DailySeries load_price(const PriceInput& in, const CalendarPtr& cal, ingest::ParseStats* stats) {
    auto stream = open_input(in.file);
    const auto raw = ingest::parse_price_csv(stream, stats);
    return align_to_calendar(raw, cal, in.name, "price:" + in.file.filename().string());
}

} // namespace

void validate(const PipelineConfig& cfg) {
    auto need_file = [](const fs::path& p, const std::string& what) {
        if (!fs::is_regular_file(p)) invalid(what + " not found: " + p.string());
    };
    if (cfg.target.name.empty()) invalid("target.name is empty");
    need_file(cfg.target.file, "target file");
    for (const auto& c : cfg.controls) {
        if (c.name.empty()) invalid("control name is empty");
        need_file(c.file, "control file");
    }
    if (cfg.holidays_file) need_file(*cfg.holidays_file, "holidays file");
    if (cfg.weekend.size() >= 7 || std::any_of(cfg.weekend.begin(), cfg.weekend.end(), [](unsigned d) { return d > 6; })) {
        invalid("calendar.weekend must list weekday indices 0..6 and leave at least one working day");
    }
    if (cfg.tweets) {
        need_file(cfg.tweets->file, "tweets file");
        need_file(cfg.tweets->lexicon_positive, "positive lexicon");
        need_file(cfg.tweets->lexicon_negative, "negative lexicon");
    }
    if (cfg.pageviews) {
        need_file(cfg.pageviews->file, "pageviews file");
        if (cfg.pageviews->titles.empty()) invalid("pageviews.titles is empty");
    }
    for (const auto& t : cfg.trends) {
        if (ingest::slug(t.query).empty()) invalid("trends query is empty");
        need_file(t.file, "trends file");
    }
    if (cfg.gkg) {
        if (cfg.gkg->files.empty()) invalid("gkg.files is empty");
        for (const auto& f : cfg.gkg->files) need_file(f, "gkg file");
        if (cfg.gkg->query_terms.empty()) invalid("gkg.query_terms is empty");
    }
    if (cfg.lag_cap < 1 || cfg.lag_cap > kMaxLag) invalid(fmt::format("lag_cap must be within 1..{}", kMaxLag));
    if (cfg.output_dir.empty()) invalid("output_dir is empty");
    if (cfg.models.empty()) invalid("models is empty");

    std::set<std::string> slugs;
    for (const auto& m : cfg.models) {
        if (m.name.empty() || m.name.find(',') != std::string::npos) {
            invalid("model names must be non-empty and free of commas: '" + m.name + "'");
        }
        if (!slugs.insert(model_slug(m.name)).second) invalid("model names collide: '" + m.name + "'");
        try {
            arima::validate(m.spec);
        } catch (const Error& e) {
            invalid("model '" + m.name + "': " + e.what());
        }
        for (const auto& term : m.spec.exog) {
            if (term.lag > cfg.lag_cap) {
                invalid(fmt::format("model '{}': lag {} of '{}' exceeds lag_cap {}", m.name, term.lag, term.name, cfg.lag_cap));
            }
        }
    }
    if (!cfg.figure_model.empty() && cfg.figure_model != "ARIMA" &&
        std::none_of(cfg.models.begin(), cfg.models.end(),
                     [&](const eval::ModelDefinition& m) { return m.name == cfg.figure_model; })) {
        invalid("figure_model '" + cfg.figure_model + "' is not a configured model");
    }
    if (cfg.order_selection) {
        const auto& g = *cfg.order_selection;
        if (g.p_max < 0 || g.q_max < 0 || g.d < 0 || g.p_max > arima::kMaxOrder || g.q_max > arima::kMaxOrder ||
            g.d > 2) {
            invalid("order_selection grid out of range");
        }
    }

    try {
        const auto target = load_price(cfg.target, make_calendar(cfg), nullptr);
        if (!(cfg.boundary > target.start_date() && cfg.boundary < target.end_date())) {
            invalid(fmt::format("boundary {} is outside the target span {}..{}", format_date(cfg.boundary),
                                format_date(target.start_date()), format_date(target.end_date())));
        }
        if (target.index_of(cfg.boundary) == std::nullopt && cfg.boundary >= target.end_date()) {
            invalid("boundary leaves no test observations");
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Validation) throw;
        invalid(std::string("target: ") + e.what());
    }
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {
    validate(config_);
    calendar_ = make_calendar(config_);
}

void Pipeline::run_stage(Stage stage) {
    try {
        switch (stage) {
        case Stage::Ingest: ingest(); break;
        case Stage::Features: features(); break;
        case Stage::Correlate: correlate(); break;
        case Stage::Granger: granger(); break;
        case Stage::Fit: fit(); break;
        case Stage::Report: report(); break;
        }
    } catch (const Error& e) {
        throw Error(ErrorCode::StageFailure, fmt::format("stage '{}': {}", to_string(stage), e.what()));
    } catch (const std::exception& e) {
        throw Error(ErrorCode::StageFailure, fmt::format("stage '{}': {}", to_string(stage), e.what()));
    }
}

void Pipeline::run_all() {
    for (Stage s : kAllStages) run_stage(s);
}

void Pipeline::ingest() {
    const auto& cfg = config_;
    StageRecord rec(cfg);
    std::map<std::string, json> stats;
    std::vector<std::optional<DailySeries>> outputs;
    std::vector<std::string> output_names;
    std::vector<std::function<void()>> tasks;

    // Each task fills its own slots; results are written in a fixed order.
    const auto names = ingested_names(cfg);
    outputs.resize(names.size());
    std::vector<ingest::ParseStats> price_stats(1 + cfg.controls.size());
    std::vector<ingest::ParseStats> trend_stats(cfg.trends.size());
    ingest::ParseStats pageview_stats;
    std::vector<ingest::ParseStats> gkg_stats(cfg.gkg ? cfg.gkg->files.size() : 0);
    std::vector<ingest::GkgCounts> gkg_counts(gkg_stats.size());
    ingest::ParseStats tweet_stats;
    std::vector<text::Document> docs;

    std::size_t slot = 0;
    std::vector<PriceInput> prices{cfg.target};
    prices.insert(prices.end(), cfg.controls.begin(), cfg.controls.end());
    for (std::size_t i = 0; i < prices.size(); ++i, ++slot) {
        tasks.emplace_back([&, i, slot] { outputs[slot] = load_price(prices[i], calendar_, &price_stats[i]); });
    }
    for (std::size_t i = 0; i < cfg.trends.size(); ++i, ++slot) {
        tasks.emplace_back([&, i, slot] {
            auto in = open_input(cfg.trends[i].file);
            const auto raw = ingest::parse_trends_csv(in, &trend_stats[i]);
            outputs[slot] = align_to_calendar(raw, calendar_, names[slot], "trends:" + cfg.trends[i].query);
        });
    }
    if (cfg.pageviews) {
        const std::size_t first = slot;
        slot += cfg.pageviews->titles.size();
        tasks.emplace_back([&, first] {
            auto in = open_input(cfg.pageviews->file);
            const auto per_title = ingest::parse_pageviews(in, cfg.pageviews->titles, &pageview_stats);
            for (std::size_t k = 0; k < cfg.pageviews->titles.size(); ++k) {
                const auto& title = cfg.pageviews->titles[k];
                outputs[first + k] = align_to_calendar(per_title.at(title), calendar_, names[first + k], "pageviews:" + title);
            }
        });
    }
    if (cfg.gkg) {
        for (std::size_t i = 0; i < cfg.gkg->files.size(); ++i) {
            tasks.emplace_back([&, i] {
                auto in = open_input(cfg.gkg->files[i]);
                gkg_counts[i] = ingest::parse_gkg(in, cfg.gkg->query_terms, cfg.gkg->match_field, &gkg_stats[i]);
            });
        }
    }
    if (cfg.tweets) {
        tasks.emplace_back([&] {
            auto in = open_input(cfg.tweets->file);
            docs = ingest::parse_tweets(in, cfg.tweets->query_terms, cfg.tweets->exclusion_terms, &tweet_stats);
        });
    }
    detail::parallel_for(tasks.size(), [&](std::size_t i) { tasks[i](); });

    if (cfg.gkg) {
        // Daily counts merge additively across files.
        std::map<Date, std::pair<double, double>> merged;
        for (const auto& c : gkg_counts) {
            for (const auto& [d, v] : c.articles.entries) merged[d].first += v;
            for (const auto& [d, v] : c.organizations.entries) merged[d].second += v;
        }
        RawObservations articles;
        RawObservations orgs;
        for (const auto& [d, v] : merged) {
            articles.add(d, v.first);
            orgs.add(d, v.second);
        }
        outputs[slot] = align_to_calendar(articles, calendar_, "gdelt_articles", "gkg");
        outputs[slot + 1] = align_to_calendar(orgs, calendar_, "gdelt_organizations", "gkg");
    }

    rec.config_input(cfg.target.file);
    for (const auto& c : cfg.controls) rec.config_input(c.file);
    if (cfg.holidays_file) rec.config_input(*cfg.holidays_file);
    for (const auto& t : cfg.trends) rec.config_input(t.file);
    if (cfg.pageviews) rec.config_input(cfg.pageviews->file);
    if (cfg.gkg) {
        for (const auto& f : cfg.gkg->files) rec.config_input(f);
    }
    if (cfg.tweets) rec.config_input(cfg.tweets->file);

    for (std::size_t i = 0; i < names.size(); ++i) {
        rec.write("ingest/" + names[i] + ".csv", series_csv(*outputs[i]));
        rec.counts()[names[i]] = outputs[i]->size();
    }
    for (std::size_t i = 0; i < prices.size(); ++i) stats["price:" + prices[i].name] = stats_json(price_stats[i]);
    for (std::size_t i = 0; i < cfg.trends.size(); ++i) stats["trends:" + cfg.trends[i].query] = stats_json(trend_stats[i]);
    if (cfg.pageviews) stats["pageviews"] = stats_json(pageview_stats);
    for (std::size_t i = 0; i < gkg_stats.size(); ++i) {
        stats["gkg:" + cfg.gkg->files[i].filename().string()] = stats_json(gkg_stats[i]);
    }
    if (cfg.tweets) {
        std::stable_sort(docs.begin(), docs.end(),
                         [](const text::Document& a, const text::Document& b) { return a.timestamp < b.timestamp; });
        std::string lines;
        for (const auto& d : docs) {
            lines += json{{"timestamp", text::format_timestamp(d.timestamp)}, {"text", d.text}, {"query", d.query}}.dump();
            lines += '\n';
        }
        rec.write("ingest/tweets.jsonl", lines);
        rec.counts()["tweets"] = docs.size();
        stats["tweets"] = stats_json(tweet_stats);
    }
    rec.write("ingest/stats.json", json(stats).dump(2) + "\n");
    update_manifest(cfg, Stage::Ingest, rec);
}

void Pipeline::features() {
    const auto& cfg = config_;
    StageRecord rec(cfg);
    const auto names = ingested_names(cfg);
    std::vector<DailySeries> series;
    const auto n_prices = price_names(cfg).size();
    for (std::size_t i = 0; i < n_prices; ++i) {
        series.push_back(read_series_csv(rec.artifact_input("ingest/" + names[i] + ".csv"), calendar_, names[i]));
    }
    if (cfg.tweets) {
        const auto path = rec.artifact_input("ingest/tweets.jsonl");
        auto in = open_input(path);
        std::vector<text::Document> docs;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto j = json::parse(line);
            text::Document d;
            d.timestamp = text::parse_timestamp(j.at("timestamp").get<std::string>());
            d.text = j.at("text").get<std::string>();
            d.query = j.value("query", std::string());
            docs.push_back(std::move(d));
        }
        rec.config_input(cfg.tweets->lexicon_positive);
        rec.config_input(cfg.tweets->lexicon_negative);
        const auto lex = text::Lexicon::load(cfg.tweets->lexicon_positive, cfg.tweets->lexicon_negative);
        auto daily = text::aggregate_daily(docs, lex, calendar_, "twitter");
        series.push_back(std::move(daily.messages));
        series.push_back(std::move(daily.sentiment));
        series.push_back(std::move(daily.emotionality));
        series.push_back(std::move(daily.complexity));
    }
    for (std::size_t i = n_prices; i < names.size(); ++i) {
        series.push_back(read_series_csv(rec.artifact_input("ingest/" + names[i] + ".csv"), calendar_, names[i]));
    }
    const auto joined = inner_join(series);
    for (const auto& s : joined) rec.write("features/" + s.name() + ".csv", series_csv(s));
    std::ostringstream wide;
    write_signals_csv(wide, joined);
    rec.write("features/signals.csv", wide.str());
    const auto& first = joined.series().front();
    rec.counts()["aligned_observations"] = first.size();
    rec.counts()["first_date"] = format_date(first.start_date());
    rec.counts()["last_date"] = format_date(first.end_date());
    rec.counts()["signals"] = joined.names();
    update_manifest(cfg, Stage::Features, rec);
}

namespace {

SignalSet load_signals(StageRecord& rec, const CalendarPtr& cal) {
    return read_signals_csv(rec.artifact_input("features/signals.csv"), cal);
}

SignalSet predictors_of(const SignalSet& all, const std::string& target) {
    std::vector<DailySeries> out;
    for (const auto& s : all) {
        if (s.name() != target) out.push_back(s);
    }
    return SignalSet(std::move(out));
}

} // namespace

void Pipeline::correlate() {
    const auto& cfg = config_;
    StageRecord rec(cfg);
    const auto all = load_signals(rec, calendar_);
    const auto& target = all.at(cfg.target.name);
    const auto predictors = predictors_of(all, cfg.target.name);
    std::vector<int> lags;
    for (int k = 1; k <= cfg.lag_cap; ++k) lags.push_back(k);
    const auto rows = econo::correlation_table(predictors, target, lags);

    std::ostringstream csv;
    csv << "predictor,lag,r,p_value,n,significant,error\n";
    for (const auto& r : rows) {
        if (r.entry) {
            csv << r.predictor << ',' << r.lag << ',' << fmt_num(r.entry->r) << ',' << fmt_num(r.entry->p_value) << ','
                << r.entry->n << ',' << (r.entry->significant ? "true" : "false") << ",\n";
        } else {
            std::string err = r.error;
            std::replace(err.begin(), err.end(), ',', ';');
            csv << r.predictor << ',' << r.lag << ",,,,," << err << '\n';
        }
    }
    rec.write("correlate/correlations.csv", csv.str());

    std::size_t width = 10;
    for (const auto& s : predictors) width = std::max(width, s.name().size());
    std::ostringstream txt;
    txt << fmt::format("Pearson correlation with {} (N = {})\n", cfg.target.name, target.size());
    txt << fmt::format("{:<{}}", "Predictor", width);
    for (int k : lags) txt << fmt::format("{:>12}", fmt::format("(t-{})", k));
    txt << '\n';
    for (std::size_t i = 0; i < rows.size(); i += lags.size()) {
        txt << fmt::format("{:<{}}", rows[i].predictor, width);
        for (std::size_t k = 0; k < lags.size(); ++k) {
            const auto& r = rows[i + k];
            txt << fmt::format("{:>12}", r.entry ? fmt::format("{:.3f}{}", r.entry->r, r.entry->significant ? "*" : " ")
                                                 : std::string("n/a "));
        }
        txt << '\n';
    }
    txt << "*p<0.05\n";
    rec.write("correlate/correlations.txt", txt.str());
    rec.counts()["rows"] = rows.size();
    update_manifest(cfg, Stage::Correlate, rec);
}

void Pipeline::granger() {
    const auto& cfg = config_;
    StageRecord rec(cfg);
    const auto all = load_signals(rec, calendar_);
    const auto& target = all.at(cfg.target.name);
    econo::GrangerTableOptions opts;
    opts.adf_max_lags = cfg.adf_max_lags;
    opts.adf_kind = cfg.adf_kind;
    opts.form = cfg.granger_form;
    opts.lags.clear();
    for (int k = 1; k <= cfg.lag_cap; ++k) opts.lags.push_back(k);
    const auto table = econo::granger_table(all, target, opts);

    std::ostringstream adf_csv;
    adf_csv << "series,kind,level_statistic,level_lags,critical_5pct,level_stationary,differenced,diff_statistic,"
               "diff_lags,diff_stationary,error\n";
    std::ostringstream adf_txt;
    std::size_t width = 10;
    for (const auto& s : all) width = std::max(width, s.name().size());
    adf_txt << fmt::format("Augmented Dickey-Fuller ({}), 5% critical value {:.3f}\n", econo::to_string(cfg.adf_kind),
                           econo::adf_critical_values(cfg.adf_kind).five_pct);
    adf_txt << fmt::format("{:<{}}{:>12}{:>6}{:>14}{:>12}{:>6}\n", "Series", width, "level", "lags", "differenced",
                           "diff", "lags");
    for (const auto& row : table.stationarity) {
        if (!row.error.empty()) {
            std::string err = row.error;
            std::replace(err.begin(), err.end(), ',', ';');
            adf_csv << row.series << ',' << econo::to_string(cfg.adf_kind) << ",,,,,,,,," << err << '\n';
            adf_txt << fmt::format("{:<{}}  {}\n", row.series, width, row.error);
            continue;
        }
        adf_csv << row.series << ',' << econo::to_string(row.level.kind) << ',' << fmt_num(row.level.statistic) << ','
                << row.level.lags_used << ',' << fmt_num(row.level.critical_values.five_pct) << ','
                << (row.level.stationary_at_5pct ? "true" : "false") << ',' << (row.was_differenced ? "true" : "false")
                << ',';
        if (row.differenced) {
            adf_csv << fmt_num(row.differenced->statistic) << ',' << row.differenced->lags_used << ','
                    << (row.differenced->stationary_at_5pct ? "true" : "false");
        } else {
            adf_csv << ",,";
        }
        adf_csv << ",\n";
        adf_txt << fmt::format("{:<{}}{:>12.3f}{:>6}{:>14}", row.series, width, row.level.statistic, row.level.lags_used,
                               row.was_differenced ? "yes" : "no");
        if (row.differenced) {
            adf_txt << fmt::format("{:>12.3f}{:>6}", row.differenced->statistic, row.differenced->lags_used);
        }
        adf_txt << '\n';
    }
    rec.write("granger/adf.csv", adf_csv.str());
    rec.write("granger/adf.txt", adf_txt.str());

    std::ostringstream g_csv;
    g_csv << "cause,effect,lag,form,statistic,p_value,nobs,significant,error\n";
    for (const auto& r : table.rows) {
        if (r.result) {
            g_csv << r.cause << ',' << table.effect << ',' << r.lag_order << ','
                  << (r.result->form == econo::GrangerForm::F ? "f" : "wald_chi2") << ',' << fmt_num(r.result->statistic)
                  << ',' << fmt_num(r.result->p_value) << ',' << r.result->nobs << ','
                  << (r.result->significant_at_5pct ? "true" : "false") << ",\n";
        } else {
            std::string err = r.error;
            std::replace(err.begin(), err.end(), ',', ';');
            g_csv << r.cause << ',' << table.effect << ',' << r.lag_order << ",,,,,," << err << '\n';
        }
    }
    rec.write("granger/granger.csv", g_csv.str());

    std::ostringstream g_txt;
    g_txt << fmt::format("Granger causality towards {} (p-values)\n", table.effect);
    g_txt << fmt::format("{:<{}}", "Cause", width);
    for (int k : opts.lags) g_txt << fmt::format("{:>12}", fmt::format("(t-{})", k));
    g_txt << '\n';
    const std::size_t per = opts.lags.size();
    for (std::size_t i = 0; i + per <= table.rows.size(); i += per) {
        g_txt << fmt::format("{:<{}}", table.rows[i].cause, width);
        for (std::size_t k = 0; k < per; ++k) {
            const auto& r = table.rows[i + k];
            g_txt << fmt::format("{:>12}", r.result ? fmt::format("{:.3f}{}", r.result->p_value,
                                                                   r.result->significant_at_5pct ? "*" : " ")
                                                    : std::string("n/a "));
        }
        g_txt << '\n';
    }
    g_txt << "*p<0.05\n";
    rec.write("granger/granger.txt", g_txt.str());
    rec.counts()["series"] = table.stationarity.size();
    rec.counts()["tests"] = table.rows.size();
    update_manifest(cfg, Stage::Granger, rec);
}

void Pipeline::fit() {
    const auto& cfg = config_;
    StageRecord rec(cfg);
    const auto all = load_signals(rec, calendar_);
    const auto& target = all.at(cfg.target.name);
    arima::FitOptions fit_opts;
    fit_opts.seed = cfg.seed;

    if (cfg.order_selection) {
        const auto& g = *cfg.order_selection;
        const auto train = split(target, cfg.boundary).train;
        const auto sel = arima::select_order(train, g.p_max, g.q_max, g.d, fit_opts);
        std::ostringstream out;
        out << fmt::format("Order selection on {} (train, d = {}): best {}\n", cfg.target.name, g.d,
                           arima::describe(sel.best));
        out << fmt::format("{:>4}{:>8}{:>14}{:>14}  {}\n", "lag", "acf", "", "pacf", "");
        for (std::size_t k = 0; k < sel.acf.size(); ++k) {
            out << fmt::format("{:>4}{:>8.3f}{:>14}{:>14.3f}\n", k + 1, sel.acf[k], "", k < sel.pacf.size() ? sel.pacf[k] : 0.0);
        }
        out << fmt::format("{:<16}{:>14}{:>14}  {}\n", "model", "AIC", "BIC", "note");
        for (const auto& c : sel.candidates) {
            out << fmt::format("{:<16}{:>14}{:>14}  {}\n", arima::describe(c.spec), c.error.empty() ? fmt_opt(c.aic, "{:.3f}") : "-",
                               c.error.empty() ? fmt_opt(c.bic, "{:.3f}") : "-",
                               !c.error.empty() ? c.error : (c.converged ? "" : "not converged"));
        }
        rec.write("fit/order_selection.txt", out.str());
    }

    eval::BatteryOptions opts;
    opts.fit = fit_opts;
    opts.mode = cfg.forecast_mode;
    const auto reports = eval::model_battery(target, all, cfg.models, cfg.boundary, opts);

    std::ostringstream csv;
    eval::write_battery_csv(csv, reports);
    rec.write("fit/battery.csv", csv.str());
    std::ostringstream table;
    eval::write_battery_table(table, reports);
    rec.write("fit/comparison.txt", table.str());
    std::size_t ok = 0;
    for (const auto& r : reports) {
        const auto slug = model_slug(r.model_name);
        std::ostringstream coef;
        coef << "name,lag,estimate,se,significant\n";
        for (const auto& c : r.coefficient_rows) {
            coef << c.name << ',' << c.lag << ',' << fmt_num(c.estimate) << ',' << fmt_num(c.se) << ','
                 << (c.significant ? "true" : "false") << '\n';
        }
        rec.write("fit/models/" + slug + ".csv", coef.str());
        std::ostringstream fc;
        eval::write_forecast_csv(fc, r);
        rec.write("fit/forecasts/" + slug + ".csv", fc.str());
        if (r.ok()) ++ok;
    }
    rec.counts()["models"] = reports.size();
    rec.counts()["models_ok"] = ok;
    rec.counts()["test_observations"] = split(target, cfg.boundary).test.size();
    update_manifest(cfg, Stage::Fit, rec);
}

namespace {

struct BatteryLine {
    std::string model;
    std::string spec;
    bool baseline = false;
    double rmse = 0.0;
    double mape = 0.0;
    bool ok = false;
};

std::vector<BatteryLine> read_battery(const fs::path& path) {
    auto in = open_input(path);
    std::vector<BatteryLine> out;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cols.push_back(cell);
        if (line.back() == ',') cols.emplace_back();
        if (cols.size() != 15) throw Error(ErrorCode::MalformedRow, "unexpected battery row: " + line);
        BatteryLine b;
        b.model = cols[0];
        b.baseline = cols[1] == "ARIMA";
        b.spec = fmt::format("{}({},{},{})", cols[1], cols[2], cols[3], cols[4]);
        b.ok = cols[14].empty();
        if (b.ok) {
            b.rmse = std::stod(cols[11]);
            b.mape = std::stod(cols[12]);
        }
        out.push_back(std::move(b));
    }
    return out;
}

} // namespace

void Pipeline::report() {
    const auto& cfg = config_;
    StageRecord rec(cfg);
    const auto battery = read_battery(rec.artifact_input("fit/battery.csv"));
    const BatteryLine* chosen = nullptr;
    for (const auto& b : battery) {
        if (!b.ok) continue;
        if (!cfg.figure_model.empty()) {
            if (b.model == cfg.figure_model) chosen = &b;
        } else if (!chosen || b.rmse < chosen->rmse) {
            chosen = &b;
        }
    }
    if (!chosen) throw Error(ErrorCode::StageFailure, "no successfully evaluated model to plot");

    const auto forecast_path = rec.artifact_input("fit/forecasts/" + model_slug(chosen->model) + ".csv");
    RawObservations actual_raw;
    RawObservations predicted_raw;
    {
        auto in = open_input(forecast_path);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto c1 = line.find(',');
            const auto c2 = line.find(',', c1 + 1);
            const Date d = parse_date(std::string_view(line).substr(0, c1));
            actual_raw.add(d, std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
            predicted_raw.add(d, std::stod(line.substr(c2 + 1)));
        }
    }
    const auto actual = align_to_calendar(actual_raw, calendar_, cfg.target.name);
    const auto predicted = align_to_calendar(predicted_raw, calendar_, chosen->model);

    std::ostringstream fig;
    fig << "date,actual,predicted\n";
    for (std::size_t i = 0; i < actual.size(); ++i) {
        fig << format_date(actual.date(i)) << ',' << fmt_num(actual[i]) << ',' << fmt_num(predicted[i]) << '\n';
    }
    rec.write("report/forecast_plot.csv", fig.str());
    std::ostringstream svg;
    detail::write_line_chart(svg, actual, predicted,
                             fmt::format("{}: actual vs {} forecast", cfg.target.name, chosen->model));
    rec.write("report/forecast_plot.svg", svg.str());

    std::vector<const BatteryLine*> ranked;
    for (const auto& b : battery) ranked.push_back(&b);
    std::stable_sort(ranked.begin(), ranked.end(), [](const BatteryLine* a, const BatteryLine* b) {
        if (a->ok != b->ok) return a->ok;
        return a->ok && a->rmse < b->rmse;
    });
    const BatteryLine* baseline = nullptr;
    for (const auto& b : battery) {
        if (b.baseline) {
            baseline = &b;
            break;
        }
    }
    std::ostringstream sum;
    sum << fmt::format("Target: {}\nTest span: {} .. {} ({} observations)\nForecast mode: {}\nSeed: {}\n\n", cfg.target.name,
                       format_date(actual.start_date()), format_date(actual.end_date()), actual.size(),
                       cfg.forecast_mode == eval::ForecastMode::Rolling ? "rolling one-step" : "trajectory", cfg.seed);
    sum << fmt::format("{:<4}{:<28}{:<18}{:>12}{:>12}\n", "#", "model", "spec", "RMSE", "MAPE %");
    std::size_t rank = 0;
    for (const auto* b : ranked) {
        ++rank;
        if (b->ok) {
            sum << fmt::format("{:<4}{:<28}{:<18}{:>12.3f}{:>12.3f}\n", rank, b->model, b->spec, b->rmse, b->mape);
        } else {
            sum << fmt::format("{:<4}{:<28}{:<18}{:>12}{:>12}\n", rank, b->model, b->spec, "failed", "failed");
        }
    }
    if (baseline && baseline->ok && chosen->rmse > 0.0) {
        sum << fmt::format("\nBaseline {} RMSE / {} RMSE = {:.3f}\n", baseline->model, chosen->model,
                           baseline->rmse / chosen->rmse);
    }
    sum << fmt::format("Figure: {} (report/forecast_plot.svg)\n", chosen->model);
    rec.write("report/summary.txt", sum.str());
    rec.counts()["figure_points"] = actual.size();
    update_manifest(cfg, Stage::Report, rec);
}

void write_signals_csv(std::ostream& out, const SignalSet& signals) {
    if (signals.empty()) throw Error(ErrorCode::InvalidArgument, "no signals to write");
    const auto& first = signals.series().front();
    for (const auto& s : signals) {
        if (s.size() != first.size() || s.start_date() != first.start_date()) {
            throw Error(ErrorCode::CalendarMismatch, "signals are not on one date grid");
        }
    }
    out << "date";
    for (const auto& s : signals) out << ',' << s.name();
    out << '\n';
    for (std::size_t i = 0; i < first.size(); ++i) {
        out << format_date(first.date(i));
        for (const auto& s : signals) out << ',' << format_number(s[i]);
        out << '\n';
    }
}

void write_signals_csv(const fs::path& path, const SignalSet& signals) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    write_signals_csv(out, signals);
}

SignalSet read_signals_csv(const fs::path& path, CalendarPtr calendar) {
    auto in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::MalformedRow, "empty signals file", 1);
    std::vector<std::string> names;
    {
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        if (cell != "date") throw Error(ErrorCode::MalformedRow, "signals header must start with 'date'", 1);
        while (std::getline(ss, cell, ',')) names.push_back(cell);
    }
    std::vector<RawObservations> raw(names.size());
    std::size_t ln = 1;
    while (std::getline(in, line)) {
        ++ln;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        Date d;
        try {
            d = parse_date(cell);
        } catch (const Error& e) {
            throw Error(ErrorCode::MalformedRow, e.what(), ln);
        }
        for (std::size_t k = 0; k < names.size(); ++k) {
            if (!std::getline(ss, cell, ',')) throw Error(ErrorCode::MalformedRow, "missing column", ln);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size()) throw Error(ErrorCode::MalformedRow, "bad number", ln);
            raw[k].add(d, v);
        }
    }
    std::vector<DailySeries> series;
    for (std::size_t k = 0; k < names.size(); ++k) series.push_back(align_to_calendar(raw[k], calendar, names[k]));
    return SignalSet(std::move(series));
}

} // namespace crudecast::pipeline
