#ifndef CRUDECAST_SYNTHETIC_HPP
#define CRUDECAST_SYNTHETIC_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace crudecast::synthetic {

struct FixtureOptions {
    std::uint64_t seed = 2015;
    int max_attempts = 200;
};

struct FixtureSummary {
    std::uint64_t seed_used = 0;
    int attempts = 0;
    std::vector<std::pair<std::string, double>> rmse; ///< battery order
    double baseline_over_combined = 0.0;
    double min_price = 0.0;
    bool accepted = false;
};

/// Writes a complete input set plus config.json into `dir`: 372 business days
/// ending 2015-04-01, a target built from ARIMA(2,1,4) noise and planted
/// contributions of twitter_complexity (t-1), wiki_price_of_oil (t-3) and
/// gdelt_articles (t-2). Draws are repeated until the battery ranks the
/// combined model first and every single-source model above the baseline.
/// Throws Error(StageFailure) when no attempt qualifies.
FixtureSummary generate_fixture(const std::filesystem::path& dir, const FixtureOptions& options = {});

} // namespace crudecast::synthetic

#endif
