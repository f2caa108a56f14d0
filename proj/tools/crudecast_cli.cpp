// crudecast <subcommand> --config <path> [--seed N] [--out DIR]
//   exit 0 success, 1 validation error, 2 stage failure
#include <crudecast/crudecast.h>

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kStageFailure = 2;

int run_pipeline(const std::string& stage, const std::string& config, std::optional<std::uint64_t> seed,
                 std::optional<std::string> out) {
    cc_pipeline* p = nullptr;
    if (cc_pipeline_open(config.c_str(), &p) != CC_OK) {
        std::fprintf(stderr, "crudecast: invalid configuration: %s\n", cc_last_error());
        return kValidation;
    }
    int code = kOk;
    if ((seed && cc_pipeline_set_seed(p, *seed) != CC_OK) ||
        (out && cc_pipeline_set_output_dir(p, out->c_str()) != CC_OK)) {
        std::fprintf(stderr, "crudecast: %s\n", cc_last_error());
        code = kValidation;
    } else {
        const cc_status st = cc_pipeline_run_stage(p, stage.c_str());
        if (st == CC_VALIDATION) {
            std::fprintf(stderr, "crudecast: invalid configuration: %s\n", cc_last_error());
            code = kValidation;
        } else if (st != CC_OK) {
            std::fprintf(stderr, "crudecast: %s failed: %s\n", stage.c_str(), cc_last_error());
            code = kStageFailure;
        }
    }
    cc_pipeline_free(p);
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Media-signal crude oil price forecasting pipeline"};
    app.set_version_flag("--version", std::string(cc_version()));
    app.require_subcommand(1);

    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::string selected;

    const std::pair<const char*, const char*> stages[] = {
        {"run", "Run every stage in order"},
        {"ingest", "Parse raw inputs into daily series"},
        {"features", "Build text signals and join all series"},
        {"correlate", "Pearson correlations with the target at lags 1..cap"},
        {"granger", "ADF screening and Granger causality table"},
        {"fit", "Fit the model battery and score out-of-sample forecasts"},
        {"report", "Figure data, plot and summary"},
    };
    for (const auto& [name, help] : stages) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "Pipeline config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Override the config seed");
        sub->add_option("--out", out, "Override the output directory");
        sub->callback([&selected, stage = std::string(name)] { selected = stage; });
    }

    std::string synth_dir;
    std::uint64_t synth_seed = 2015;
    int attempts = 0;
    auto* synth = app.add_subcommand("synth", "Generate the synthetic study dataset");
    synth->add_option("--dir", synth_dir, "Destination directory")->required();
    synth->add_option("--seed", synth_seed, "First generator seed");
    synth->add_option("--max-attempts", attempts, "Draws to try before giving up");
    synth->callback([&selected] { selected = "synth"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    if (selected == "synth") {
        if (cc_generate_fixture(synth_dir.c_str(), synth_seed, attempts) != CC_OK) {
            std::fprintf(stderr, "crudecast: synth failed: %s\n", cc_last_error());
            return kStageFailure;
        }
        return kOk;
    }
    return run_pipeline(selected, config, seed, out);
}
