#ifndef CRUDECAST_PIPELINE_HPP
#define CRUDECAST_PIPELINE_HPP

#include <crudecast/arima.hpp>
#include <crudecast/econo_tests.hpp>
#include <crudecast/evaluation.hpp>
#include <crudecast/ingest.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crudecast::pipeline {

namespace fs = std::filesystem;

struct PriceInput {
    std::string name;
    fs::path file;
};

struct TweetsInput {
    fs::path file;
    std::vector<std::string> query_terms;
    std::vector<std::string> exclusion_terms;
    fs::path lexicon_positive;
    fs::path lexicon_negative;
};

struct PageviewsInput {
    fs::path file;
    std::vector<std::string> titles;
};

struct TrendsInput {
    std::string query;
    fs::path file;
};

struct GkgInput {
    std::vector<fs::path> files;
    std::vector<std::string> query_terms;
    ingest::GkgMatchField match_field = ingest::GkgMatchField::Themes;
};

struct OrderGrid {
    int p_max = 3;
    int q_max = 4;
    int d = 1;
};

// Relative paths are resolved against the directory of the config file.
struct PipelineConfig {
    fs::path base_dir;
    std::string source_text; ///< raw config, digested into the manifest

    std::optional<fs::path> holidays_file;
    std::vector<unsigned> weekend{0, 6};

    PriceInput target;
    std::vector<PriceInput> controls;
    std::optional<TweetsInput> tweets;
    std::optional<PageviewsInput> pageviews;
    std::vector<TrendsInput> trends;
    std::optional<GkgInput> gkg;

    int lag_cap = kMaxLag;
    Date boundary{};
    eval::ForecastMode forecast_mode = eval::ForecastMode::Rolling;
    std::optional<int> adf_max_lags;
    econo::RegressionKind adf_kind = econo::RegressionKind::Constant;
    econo::GrangerForm granger_form = econo::GrangerForm::WaldChi2;
    std::optional<OrderGrid> order_selection;
    std::vector<eval::ModelDefinition> models;
    std::string figure_model; ///< empty: lowest out-of-sample RMSE

    fs::path output_dir;
    std::uint64_t seed = 0;
};

/// Parses the JSON config. Throws Error(Validation) on schema problems.
PipelineConfig parse_config(std::string_view json_text, const fs::path& base_dir);
PipelineConfig load_config(const fs::path& path);

/// CRUDECAST_OUT_DIR and CRUDECAST_SEED, when set.
void apply_environment(PipelineConfig& config);

/// Files exist, lag cap <= 3, model lags within the cap, boundary strictly
/// inside the target's span. Throws Error(Validation).
void validate(const PipelineConfig& config);

enum class Stage { Ingest, Features, Correlate, Granger, Fit, Report };

inline constexpr Stage kAllStages[] = {Stage::Ingest, Stage::Features, Stage::Correlate,
                                       Stage::Granger,  Stage::Fit,      Stage::Report};

std::string_view to_string(Stage stage) noexcept;
std::optional<Stage> stage_from_string(std::string_view name) noexcept;

// Each stage reads only the previous stages' artifacts under output_dir and
// records input/output digests in output_dir/manifest.json.
class Pipeline {
public:
    /// Validates the config; Error(Validation) on failure.
    explicit Pipeline(PipelineConfig config);

    const PipelineConfig& config() const noexcept { return config_; }

    /// Error(StageFailure) naming the stage on any failure.
    void run_stage(Stage stage);
    void run_all();

private:
    void ingest();
    void features();
    void correlate();
    void granger();
    void fit();
    void report();

    PipelineConfig config_;
    CalendarPtr calendar_;
};

/// Wide CSV: date column plus one column per series, all on one grid.
void write_signals_csv(std::ostream& out, const SignalSet& signals);
void write_signals_csv(const fs::path& path, const SignalSet& signals);
SignalSet read_signals_csv(const fs::path& path, CalendarPtr calendar);

} // namespace crudecast::pipeline

#endif
