// Exercises the C interface through the shared library only.
#include <crudecast/crudecast.h>
#include <crudecast/error.hpp>

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace {

using crudecast::ErrorCode;

static_assert(CC_INVALID_ARGUMENT == static_cast<int>(ErrorCode::InvalidArgument));
static_assert(CC_STAGE_FAILURE == static_cast<int>(ErrorCode::StageFailure));
static_assert(CC_CALENDAR_MISMATCH == static_cast<int>(ErrorCode::CalendarMismatch));
static_assert(CC_OVERLAPPING_LEXICON == static_cast<int>(ErrorCode::OverlappingLexicon));
static_assert(CC_SINGULAR_REGRESSION == static_cast<int>(ErrorCode::SingularRegression));
static_assert(CC_COLLINEAR_REGRESSORS == static_cast<int>(ErrorCode::CollinearRegressors));
static_assert(CC_ZERO_ACTUAL == static_cast<int>(ErrorCode::ZeroActual));
static_assert(CC_MALFORMED_RECORD == static_cast<int>(ErrorCode::MalformedRecord));

std::vector<double> ar1(std::size_t n, double phi, double mu, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> e;
    std::vector<double> v(n);
    double u = 0;
    for (auto& x : v) {
        u = phi * u + e(rng);
        x = mu + u;
    }
    return v;
}

} // namespace

TEST_CASE("version and status names") {
    CHECK(std::strlen(cc_version()) > 0);
    CHECK(std::string(cc_status_name(CC_OK)) == "Ok");
    CHECK(std::string(cc_status_name(CC_ZERO_ACTUAL)) == "ZeroActual");
}

TEST_CASE("series handles") {
    const double v[] = {1, 3, 6, 10};
    cc_series* s = nullptr;
    REQUIRE(cc_series_create("x", "2014-01-06", v, 4, &s) == CC_OK);
    CHECK(cc_series_length(s) == 4);
    char buf[16];
    REQUIRE(cc_series_date(s, 1, buf, sizeof buf) == CC_OK);
    CHECK(std::string(buf) == "2014-01-07");
    CHECK(cc_series_date(s, 9, buf, sizeof buf) == CC_OUT_OF_RANGE);

    cc_series* d = nullptr;
    REQUIRE(cc_series_difference(s, 1, &d) == CC_OK);
    double out[3];
    REQUIRE(cc_series_values(d, out, 3) == CC_OK);
    CHECK(out[0] == 2);
    CHECK(out[2] == 4);

    cc_series* l = nullptr;
    CHECK(cc_series_lag(s, 4, &l) == CC_LAG_TOO_LARGE);
    CHECK(l == nullptr);
    CHECK(std::strlen(cc_last_error()) > 0);
    REQUIRE(cc_series_lag(s, 1, &l) == CC_OK);
    REQUIRE(cc_series_date(l, 0, buf, sizeof buf) == CC_OK);
    CHECK(std::string(buf) == "2014-01-07");

    cc_series* bad = nullptr;
    CHECK(cc_series_create("x", "2014-01-11", v, 4, &bad) == CC_INVALID_ARGUMENT);
    CHECK(cc_series_create("x", "not a date", v, 4, &bad) == CC_INVALID_ARGUMENT);
    CHECK(cc_series_create(nullptr, "2014-01-06", v, 4, &bad) == CC_INVALID_ARGUMENT);

    cc_series_free(l);
    cc_series_free(d);
    cc_series_free(s);
    cc_series_free(nullptr);
}

TEST_CASE("statistics entry points") {
    const double a[] = {2, 4}, p[] = {1, 5};
    double r = 0;
    REQUIRE(cc_rmse(a, p, 2, &r) == CC_OK);
    CHECK(r == doctest::Approx(1.0));
    const double a1[] = {100}, p1[] = {90};
    REQUIRE(cc_mape(a1, p1, 1, &r) == CC_OK);
    CHECK(r == doctest::Approx(10.0));
    const double z[] = {0, 1};
    CHECK(cc_mape(z, p, 2, &r) == CC_ZERO_ACTUAL);

    const double x[] = {1, 2, 3}, y[] = {2, 4, 7};
    double pv = 0;
    REQUIRE(cc_pearson(x, y, 3, &r, &pv) == CC_OK);
    CHECK(r == doctest::Approx(0.9934).epsilon(1e-4));
    const double c[] = {1, 1, 1};
    CHECK(cc_pearson(x, c, 3, &r, &pv) == CC_ZERO_VARIANCE);

    const auto s = ar1(300, 0.5, 0, 4);
    cc_adf_result adf{};
    REQUIRE(cc_adf(s.data(), s.size(), -1, CC_REG_CONSTANT, &adf) == CC_OK);
    CHECK(adf.stationary_at_5pct == 1);
    CHECK(adf.critical_1pct < adf.critical_5pct);

    const auto cause = ar1(300, 0.0, 0, 5);
    std::vector<double> effect(300, 0.0);
    const auto noise = ar1(300, 0.0, 0, 6);
    for (std::size_t t = 1; t < 300; ++t) effect[t] = 0.8 * cause[t - 1] + noise[t];
    cc_granger_result g{};
    REQUIRE(cc_granger(cause.data(), effect.data(), 300, 1, 0, &g) == CC_OK);
    CHECK(g.significant_at_5pct == 1);
    CHECK(g.nobs == 299);
    CHECK(cc_granger(cause.data(), effect.data(), 20, 3, 0, &g) == CC_SERIES_TOO_SHORT);
}

TEST_CASE("arima fit and forecast") {
    const auto v = ar1(800, 0.7, 20, 9);
    cc_series* y = nullptr;
    REQUIRE(cc_series_create("y", "2010-01-04", v.data(), v.size(), &y) == CC_OK);

    cc_fit* fit = nullptr;
    REQUIRE(cc_arima_fit(y, nullptr, 0, cc_arima_order{1, 0, 0, 1}, 0, &fit) == CC_OK);
    cc_fit_summary sum{};
    REQUIRE(cc_fit_summary_get(fit, &sum) == CC_OK);
    CHECK(sum.k == 3);
    CHECK(sum.n_coefficients == 2);
    CHECK(sum.aic == doctest::Approx(2.0 * sum.k - 2.0 * sum.loglik));

    char name[32];
    double phi = 0, se = 0, mu = 0;
    int sig = 0;
    REQUIRE(cc_fit_coefficient(fit, 0, name, sizeof name, &phi, &se, &sig) == CC_OK);
    CHECK(std::string(name) == "AR(1)");
    CHECK(phi == doctest::Approx(0.7).epsilon(0.1));
    CHECK(sig == 1);
    REQUIRE(cc_fit_coefficient(fit, 1, name, sizeof name, &mu, &se, &sig) == CC_OK);
    CHECK(std::string(name) == "constant");
    CHECK(cc_fit_coefficient(fit, 2, name, sizeof name, &mu, &se, &sig) == CC_OUT_OF_RANGE);

    double fc[5];
    REQUIRE(cc_fit_forecast(fit, 5, fc) == CC_OK);
    for (int h = 1; h <= 5; ++h) CHECK(std::abs(fc[h - 1] - (mu + std::pow(phi, h) * (v.back() - mu))) < 1e-10);
    CHECK(cc_fit_forecast(fit, 0, fc) == CC_INVALID_ARGUMENT);

    cc_fit* bad = nullptr;
    CHECK(cc_arima_fit(y, nullptr, 0, cc_arima_order{9, 0, 0, 0}, 0, &bad) == CC_INVALID_ARGUMENT);

    // ARIMAX with a lagged regressor.
    const auto xv = ar1(801, 0.0, 0, 10);
    std::vector<double> yv(801);
    const auto e = ar1(801, 0.0, 0, 11);
    for (std::size_t t = 1; t < yv.size(); ++t) yv[t] = 2.0 * xv[t - 1] + e[t];
    cc_series* xs = nullptr;
    cc_series* ys = nullptr;
    REQUIRE(cc_series_create("x", "2010-01-04", xv.data(), xv.size(), &xs) == CC_OK);
    REQUIRE(cc_series_create("y", "2010-01-04", yv.data(), yv.size(), &ys) == CC_OK);
    const cc_exog_term term{xs, 1};
    cc_fit* fx = nullptr;
    REQUIRE(cc_arima_fit(ys, &term, 1, cc_arima_order{0, 0, 0, 0}, 0, &fx) == CC_OK);
    double beta = 0;
    REQUIRE(cc_fit_coefficient(fx, 0, name, sizeof name, &beta, &se, &sig) == CC_OK);
    CHECK(beta == doctest::Approx(2.0).epsilon(0.05));
    REQUIRE(cc_fit_forecast(fx, 1, fc) == CC_OK);
    CHECK(fc[0] == doctest::Approx(beta * xv.back()).epsilon(1e-12));
    CHECK(cc_fit_forecast(fx, 2, fc) == CC_MISSING_FUTURE_EXOG);

    cc_fit_free(fx);
    cc_fit_free(fit);
    cc_series_free(xs);
    cc_series_free(ys);
    cc_series_free(y);
}

TEST_CASE("pipeline handle") {
    namespace fs = std::filesystem;
    cc_pipeline* p = nullptr;
    CHECK(cc_pipeline_open("/nonexistent/config.json", &p) != CC_OK);
    CHECK(p == nullptr);

    const fs::path out = fs::temp_directory_path() / ("crudecast_capi_" + std::to_string(std::random_device{}()));
    const std::string config = std::string(CRUDECAST_SOURCE_DIR) + "/data/synthetic/config.json";
    REQUIRE(cc_pipeline_open(config.c_str(), &p) == CC_OK);
    REQUIRE(cc_pipeline_set_output_dir(p, out.c_str()) == CC_OK);
    REQUIRE(cc_pipeline_set_seed(p, 2015) == CC_OK);
    CHECK(cc_pipeline_run_stage(p, "correlate") == CC_STAGE_FAILURE);
    CHECK(std::string(cc_last_error()).find("correlate") != std::string::npos);
    CHECK(cc_pipeline_run_stage(p, "plot") == CC_INVALID_ARGUMENT);
    REQUIRE(cc_pipeline_run_stage(p, "ingest") == CC_OK);
    REQUIRE(cc_pipeline_run_stage(p, "features") == CC_OK);
    CHECK(fs::is_regular_file(out / "features" / "signals.csv"));
    cc_pipeline_free(p);
    fs::remove_all(out);
}
