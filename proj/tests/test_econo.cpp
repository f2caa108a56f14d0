#include "support.hpp"

#include <crudecast/econo_tests.hpp>
#include <crudecast/error.hpp>

#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace crudecast;
using namespace crudecast::econo;
using namespace testsupport;

namespace {

std::vector<double> random_walk(std::size_t n, std::uint64_t seed) {
    auto e = gaussian_noise(n, seed);
    for (std::size_t i = 1; i < n; ++i) e[i] += e[i - 1];
    return e;
}

std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed) {
    auto e = gaussian_noise(n, seed);
    for (std::size_t i = 1; i < n; ++i) e[i] += phi * e[i - 1];
    return e;
}

// Residual sum of squares by normal equations, independent of the library OLS.
double ssr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const Eigen::VectorXd b = (X.transpose() * X).ldlt().solve(X.transpose() * y);
    return (y - X * b).squaredNorm();
}

// Dickey-Fuller t statistic with a constant and no augmentation lags.
double df_statistic(const std::vector<double>& s) {
    const std::size_t n = s.size() - 1;
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (std::size_t t = 1; t <= n; ++t) {
        X(t - 1, 0) = 1.0;
        X(t - 1, 1) = s[t - 1];
        y(t - 1) = s[t] - s[t - 1];
    }
    const Eigen::MatrixXd inv = (X.transpose() * X).inverse();
    const Eigen::VectorXd b = inv * X.transpose() * y;
    const double s2 = (y - X * b).squaredNorm() / static_cast<double>(n - 2);
    return b(1) / std::sqrt(s2 * inv(1, 1));
}

double wald_chi2(const std::vector<double>& x, const std::vector<double>& y, int L) {
    const std::size_t n = y.size() - static_cast<std::size_t>(L);
    Eigen::MatrixXd Xu(n, 1 + 2 * L);
    Eigen::VectorXd v(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t t = r + static_cast<std::size_t>(L);
        v(r) = y[t];
        Xu(r, 0) = 1;
        for (int j = 1; j <= L; ++j) {
            Xu(r, j) = y[t - j];
            Xu(r, L + j) = x[t - j];
        }
    }
    const double u = ssr(Xu, v);
    const double restricted = ssr(Xu.leftCols(1 + L), v);
    return static_cast<double>(n) * (restricted - u) / u;
}

} // namespace

TEST_CASE("pearson examples") {
    const std::vector<double> x{1, 2, 3, 4, 5.5};
    std::vector<double> neg;
    for (double v : x) neg.push_back(-v);
    CHECK(pearson(x, x).r == doctest::Approx(1.0));
    CHECK(pearson(x, neg).r == doctest::Approx(-1.0));

    // Hand sums: sxy = 5, sxx = 2, syy = 114/9.
    const std::vector<double> a{1, 2, 3}, b{2, 4, 7};
    const double r = 5.0 / std::sqrt(2.0 * 114.0 / 9.0);
    const auto e = pearson(a, b);
    CHECK(e.r == doctest::Approx(r).epsilon(1e-12));
    CHECK(e.r == doctest::Approx(0.9934).epsilon(1e-4));
    // One degree of freedom: Student t is Cauchy, two-sided p = 1 - (2/pi) atan|t|.
    const double t = r * std::sqrt(1.0 / (1.0 - r * r));
    CHECK(e.p_value == doctest::Approx(1.0 - 2.0 / std::numbers::pi * std::atan(t)).epsilon(1e-10));
    CHECK(e.n == 3);
}

TEST_CASE("pearson errors") {
    const std::vector<double> x{1, 2, 3}, c{4, 4, 4}, shorter{1, 2};
    CHECK(code_of([&] { pearson(x, c); }) == ErrorCode::ZeroVariance);
    CHECK(code_of([&] { pearson(x, shorter); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("pearson symmetry and affine invariance") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto x = gaussian_noise(60, seed);
        auto y = gaussian_noise(60, seed + 100);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += 0.5 * x[i];
        const double r = pearson(x, y).r;
        CHECK(pearson(y, x).r == doctest::Approx(r).epsilon(1e-12));
        std::vector<double> ax, nx;
        for (double v : x) {
            ax.push_back(3.5 * v + 10.0);
            nx.push_back(-2.0 * v + 1.0);
        }
        CHECK(pearson(ax, y).r == doctest::Approx(r).epsilon(1e-12));
        CHECK(pearson(nx, y).r == doctest::Approx(-r).epsilon(1e-12));
        CHECK(pearson(x, y).p_value >= 0.0);
        CHECK(pearson(x, y).p_value <= 1.0);
    }
}

TEST_CASE("correlation table on a persistent series and noise") {
    const auto cal = default_calendar();
    const auto start = ymd(2014, 1, 6);
    auto walk = random_walk(400, 8);
    for (auto& v : walk) v += 100;
    const DailySeries target("wti", cal, start, walk);
    const DailySeries noise("noise", cal, start, gaussian_noise(400, 9));
    const DailySeries flat("flat", cal, start, std::vector<double>(400, 2.0));
    const SignalSet signals({target, noise, flat});
    const std::vector<int> lags{1, 2, 3};
    const auto rows = correlation_table(signals, target, lags);
    REQUIRE(rows.size() == 9);

    REQUIRE(rows[0].entry);
    REQUIRE(rows[1].entry);
    REQUIRE(rows[2].entry);
    CHECK(rows[0].entry->r > 0.9);
    CHECK(rows[0].entry->r > rows[1].entry->r);
    CHECK(rows[1].entry->r > rows[2].entry->r);
    CHECK(rows[0].entry->significant);
    CHECK(rows[0].entry->n == 399);
    CHECK(rows[2].entry->n == 397);

    for (std::size_t i = 6; i < 9; ++i) {
        CHECK_FALSE(rows[i].entry);
        CHECK(rows[i].error.find("variance") != std::string::npos);
        CHECK(rows[i].lag == static_cast<int>(i - 5));
    }
}

TEST_CASE("independent noise predictors are mostly not significant") {
    const auto cal = default_calendar();
    int significant = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const DailySeries y("y", cal, ymd(2014, 1, 6), gaussian_noise(250, 2 * seed + 1));
        const DailySeries x("x", cal, ymd(2014, 1, 6), gaussian_noise(250, 2 * seed + 2));
        const std::vector<int> lags{1};
        const auto rows = correlation_table(SignalSet({x}), y, lags);
        REQUIRE(rows[0].entry);
        CHECK(std::abs(rows[0].entry->r) < 0.3);
        significant += rows[0].entry->significant;
        ++total;
    }
    CHECK(significant <= total / 10);
}

TEST_CASE("adf statistic agrees with a direct regression at zero lags") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto s = ar1(200, 0.7, seed);
        const auto res = adf_test(s, 0, RegressionKind::Constant);
        CHECK(res.lags_used == 0);
        CHECK(res.nobs == 199);
        CHECK(res.statistic == doctest::Approx(df_statistic(s)).epsilon(1e-9));
        CHECK(res.stationary_at_5pct == (res.statistic < res.critical_values.five_pct));
    }
}

TEST_CASE("adf critical values are ordered") {
    for (auto kind : {RegressionKind::None, RegressionKind::Constant, RegressionKind::ConstantTrend}) {
        const auto cv = adf_critical_values(kind);
        CHECK(cv.one_pct < cv.five_pct);
        CHECK(cv.five_pct < cv.ten_pct);
    }
    CHECK(adf_critical_values(RegressionKind::Constant).five_pct < adf_critical_values(RegressionKind::None).five_pct);
}

TEST_CASE("adf errors") {
    CHECK(code_of([] { adf_test(std::vector<double>(100, 3.0), 2, RegressionKind::Constant); }) ==
          ErrorCode::SingularRegression);
    CHECK(code_of([] { adf_test(gaussian_noise(21, 1), 2, RegressionKind::Constant); }) == ErrorCode::SeriesTooShort);
}

TEST_CASE("adf is invariant to a level shift") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto s = random_walk(300, seed);
        const auto a = adf_test(s, 4, RegressionKind::Constant);
        for (auto& v : s) v += 250.0;
        const auto b = adf_test(s, 4, RegressionKind::Constant);
        CHECK(a.lags_used == b.lags_used);
        CHECK(b.statistic == doctest::Approx(a.statistic).epsilon(1e-7));
    }
}

TEST_CASE("adf monte carlo: random walks, stationary AR(1) and size") {
    constexpr std::size_t n = 500;
    const int lags = default_adf_lags(n);
    int walk_rejections = 0, ar_rejections = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        walk_rejections += adf_test(random_walk(n, 1000 + seed), lags, RegressionKind::Constant).stationary_at_5pct;
        ar_rejections += adf_test(ar1(n, 0.5, 5000 + seed), lags, RegressionKind::Constant).stationary_at_5pct;
    }
    CHECK(200 - walk_rejections >= 180);
    CHECK(ar_rejections >= 180);

    int size_rejections = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        size_rejections += adf_test(random_walk(n, 20000 + seed), lags, RegressionKind::Constant).stationary_at_5pct;
    }
    const double rate = size_rejections / 1000.0;
    CAPTURE(rate);
    CHECK(rate >= 0.02);
    CHECK(rate <= 0.08);
}

TEST_CASE("granger statistic agrees with a direct regression") {
    const auto x = gaussian_noise(200, 3);
    auto y = gaussian_noise(200, 4);
    for (std::size_t t = 1; t < y.size(); ++t) y[t] += 0.3 * x[t - 1];
    for (int L = 1; L <= 3; ++L) {
        const auto res = granger_test(x, y, L);
        CHECK(res.statistic == doctest::Approx(wald_chi2(x, y, L)).epsilon(1e-8));
        CHECK(res.nobs == 200u - static_cast<std::size_t>(L));
    }
    // Two degrees of freedom: the chi-square survival function is exp(-w/2).
    const auto two = granger_test(x, y, 2);
    CHECK(two.p_value == doctest::Approx(std::exp(-two.statistic / 2)).epsilon(1e-10));
}

TEST_CASE("granger errors") {
    CHECK(code_of([] { granger_test(gaussian_noise(29, 1), gaussian_noise(29, 2), 3); }) == ErrorCode::SeriesTooShort);
    CHECK(code_of([] { granger_test(gaussian_noise(30, 1), gaussian_noise(31, 2), 1); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("granger is invariant to positive rescaling") {
    const auto x = gaussian_noise(150, 5);
    auto y = gaussian_noise(150, 6);
    for (std::size_t t = 2; t < y.size(); ++t) y[t] += 0.2 * x[t - 2];
    std::vector<double> xs, ys;
    for (double v : x) xs.push_back(40.0 * v);
    for (double v : y) ys.push_back(0.01 * v);
    for (int L = 1; L <= 3; ++L) {
        const double w = granger_test(x, y, L).statistic;
        CHECK(granger_test(xs, y, L).statistic == doctest::Approx(w).epsilon(1e-8));
        CHECK(granger_test(x, ys, L).statistic == doctest::Approx(w).epsilon(1e-8));
    }
}

TEST_CASE("granger monte carlo: planted causality, size and reverse direction") {
    int planted = 0, reverse = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto x = gaussian_noise(500, 7000 + seed);
        auto y = gaussian_noise(500, 9000 + seed);
        for (std::size_t t = 1; t < y.size(); ++t) y[t] += 0.8 * x[t - 1];
        planted += granger_test(x, y, 1).p_value < 0.01;
        reverse += granger_test(y, x, 1).significant_at_5pct;
    }
    CHECK(planted >= 190);
    CHECK(reverse <= 20);

    int rejections = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        rejections += granger_test(gaussian_noise(200, 30000 + seed), gaussian_noise(200, 40000 + seed), 2)
                          .significant_at_5pct;
    }
    const double rate = rejections / 1000.0;
    CAPTURE(rate);
    CHECK(rate >= 0.02);
    CHECK(rate <= 0.08);
}

TEST_CASE("granger table finds the planted lag-2 predictor") {
    const auto cal = default_calendar();
    const auto start = ymd(2014, 1, 6);
    constexpr std::size_t n = 400;
    const auto driver = gaussian_noise(n, 77);
    auto y = gaussian_noise(n, 78);
    for (std::size_t t = 2; t < n; ++t) y[t] += 0.8 * driver[t - 2];
    // The target is integrated, so the table must difference it first.
    for (std::size_t t = 1; t < n; ++t) y[t] += y[t - 1];
    std::vector<double> x(n);
    x[0] = driver[0];
    for (std::size_t t = 1; t < n; ++t) x[t] = x[t - 1] + driver[t];

    std::vector<DailySeries> cols{DailySeries("wti", cal, start, y), DailySeries("planted", cal, start, x)};
    for (int i = 0; i < 4; ++i) cols.emplace_back("noise" + std::to_string(i), cal, start, gaussian_noise(n, 500 + i));
    const SignalSet signals(cols);
    const auto table = granger_table(signals, signals.at("wti"));

    CHECK(table.effect == "wti");
    REQUIRE(table.rows.size() == 15);
    for (const auto& row : table.rows) CHECK(row.cause != "wti");
    CHECK(table.stationarity[0].series == "wti");
    CHECK(table.stationarity[0].was_differenced);

    int noise_hits = 0;
    for (const auto& row : table.rows) {
        REQUIRE(row.result);
        if (row.cause == "planted" && row.lag_order >= 2) CHECK(row.result->significant_at_5pct);
        if (row.cause.rfind("noise", 0) == 0) noise_hits += row.result->significant_at_5pct;
    }
    CHECK(noise_hits <= 3);
}

TEST_CASE("granger table on pure noise flags about five percent of cells") {
    const auto cal = default_calendar();
    int hits = 0, cells = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::vector<DailySeries> cols{DailySeries("y", cal, ymd(2014, 1, 6), gaussian_noise(200, 100 * seed))};
        for (int i = 1; i <= 5; ++i) cols.emplace_back("x" + std::to_string(i), cal, ymd(2014, 1, 6), gaussian_noise(200, 100 * seed + i));
        const SignalSet signals(cols);
        const auto table = granger_table(signals, signals.at("y"));
        for (const auto& row : table.rows) {
            REQUIRE(row.result);
            hits += row.result->significant_at_5pct;
            ++cells;
        }
    }
    const double rate = static_cast<double>(hits) / cells;
    CAPTURE(rate);
    CHECK(rate <= 0.12);
}
