#include "ols.hpp"

#include <crudecast/econo_tests.hpp>
#include <crudecast/error.hpp>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <limits>

namespace crudecast::econo {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::pair<std::vector<double>, std::vector<double>> joined_values(const DailySeries& a, const DailySeries& b) {
    const DailySeries pair[] = {a, b};
    const auto joined = inner_join(pair);
    const auto& x = joined.series()[0].values();
    const auto& y = joined.series()[1].values();
    return {{x.begin(), x.end()}, {y.begin(), y.end()}};
}

} // namespace

CorrelationEntry pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw Error(ErrorCode::LengthMismatch, "pearson needs equal-length inputs");
    }
    const std::size_t n = x.size();
    if (n < 3) {
        throw Error(ErrorCode::SeriesTooShort, "pearson needs at least 3 points");
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw Error(ErrorCode::ZeroVariance, "pearson input has zero variance");
    }
    CorrelationEntry e;
    e.n = n;
    e.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double df = static_cast<double>(n - 2);
    const double one_minus = 1.0 - e.r * e.r;
    if (one_minus <= 0.0) {
        e.p_value = 0.0;
    } else {
        const double t = std::abs(e.r) * std::sqrt(df / one_minus);
        boost::math::students_t dist(df);
        e.p_value = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, t)), 0.0, 1.0);
    }
    e.significant = e.p_value < kSignificance;
    return e;
}

CorrelationEntry pearson(const DailySeries& x, const DailySeries& y) {
    const auto [xv, yv] = joined_values(x, y);
    auto e = pearson(xv, yv);
    e.predictor = x.name();
    return e;
}

std::vector<CorrelationRow> correlation_table(const SignalSet& signals, const DailySeries& target,
                                              std::span<const int> lags) {
    std::vector<CorrelationRow> rows;
    for (const auto& predictor : signals) {
        for (int k : lags) {
            CorrelationRow row{predictor.name(), k, std::nullopt, {}};
            try {
                auto e = pearson(lag(predictor, k), target);
                e.lag = k;
                row.entry = e;
            } catch (const Error& err) {
                row.error = err.what();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string_view to_string(RegressionKind kind) noexcept {
    switch (kind) {
    case RegressionKind::None: return "none";
    case RegressionKind::Constant: return "constant";
    case RegressionKind::ConstantTrend: return "constant_trend";
    }
    return "unknown";
}

CriticalValues adf_critical_values(RegressionKind kind) noexcept {
    // MacKinnon (2010) asymptotic tau quantiles.
    switch (kind) {
    case RegressionKind::None: return {-2.56574, -1.94100, -1.61682};
    case RegressionKind::Constant: return {-3.43035, -2.86154, -2.56677};
    case RegressionKind::ConstantTrend: return {-3.95877, -3.41049, -3.12705};
    }
    return {-3.43035, -2.86154, -2.56677};
}

int default_adf_lags(std::size_t n) {
    int lags = static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
    while (lags > 0 && static_cast<std::size_t>(20 + lags) > n) --lags;
    return lags;
}

namespace {

struct AdfDesign {
    MatrixXd X;
    VectorXd y;
    Index gamma_col = 0;
};

// Rows t = first..n-1 of  ds_t = [a] + [b t] + g s_{t-1} + sum_j d_j ds_{t-j}.
AdfDesign adf_design(std::span<const double> s, int lags, std::size_t first, RegressionKind kind) {
    const std::size_t n = s.size();
    const Index rows = static_cast<Index>(n - first);
    const Index det = kind == RegressionKind::None ? 0 : (kind == RegressionKind::Constant ? 1 : 2);
    AdfDesign d;
    d.X.resize(rows, det + 1 + lags);
    d.y.resize(rows);
    d.gamma_col = det;
    for (Index r = 0; r < rows; ++r) {
        const std::size_t t = first + static_cast<std::size_t>(r);
        d.y(r) = s[t] - s[t - 1];
        Index c = 0;
        if (det >= 1) d.X(r, c++) = 1.0;
        if (det >= 2) d.X(r, c++) = static_cast<double>(t);
        d.X(r, c++) = s[t - 1];
        for (int j = 1; j <= lags; ++j) {
            d.X(r, c++) = s[t - static_cast<std::size_t>(j)] - s[t - static_cast<std::size_t>(j) - 1];
        }
    }
    return d;
}

} // namespace

AdfResult adf_test(std::span<const double> s, int max_lags, RegressionKind kind) {
    if (max_lags < 0) {
        throw Error(ErrorCode::InvalidArgument, "max_lags must be non-negative");
    }
    if (s.size() < static_cast<std::size_t>(20 + max_lags)) {
        throw Error(ErrorCode::SeriesTooShort, "ADF needs at least 20 + max_lags observations");
    }
    // Lag order by AIC on the common sample t > max_lags.
    const std::size_t common = static_cast<std::size_t>(max_lags) + 1;
    int best_lag = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    for (int L = 0; L <= max_lags; ++L) {
        const auto d = adf_design(s, L, common, kind);
        const auto fit = detail::ols(d.X, d.y);
        if (fit.ssr <= 0.0) {
            throw Error(ErrorCode::SingularRegression, "ADF regression fits perfectly");
        }
        const double nobs = static_cast<double>(fit.n);
        const double aic = nobs * std::log(fit.ssr / nobs) + 2.0 * static_cast<double>(fit.k);
        if (aic < best_aic) {
            best_aic = aic;
            best_lag = L;
        }
    }
    const auto d = adf_design(s, best_lag, static_cast<std::size_t>(best_lag) + 1, kind);
    const auto fit = detail::ols(d.X, d.y);
    if (fit.ssr <= 0.0) {
        throw Error(ErrorCode::SingularRegression, "ADF regression fits perfectly");
    }
    const double s2 = fit.ssr / static_cast<double>(fit.n - fit.k);
    const double se = std::sqrt(s2 * fit.xtx_inv(d.gamma_col, d.gamma_col));
    AdfResult res;
    res.statistic = fit.coef(d.gamma_col) / se;
    res.lags_used = best_lag;
    res.kind = kind;
    res.critical_values = adf_critical_values(kind);
    res.nobs = static_cast<std::size_t>(fit.n);
    res.stationary_at_5pct = res.statistic < res.critical_values.five_pct;
    return res;
}

AdfResult adf_test(const DailySeries& s, int max_lags, RegressionKind kind) {
    return adf_test(s.values(), max_lags, kind);
}

GrangerResult granger_test(std::span<const double> cause, std::span<const double> effect, int lag_order,
                           GrangerForm form) {
    if (cause.size() != effect.size()) {
        throw Error(ErrorCode::LengthMismatch, "granger_test needs aligned series");
    }
    if (lag_order < 1) {
        throw Error(ErrorCode::InvalidArgument, "lag order must be positive");
    }
    const std::size_t L = static_cast<std::size_t>(lag_order);
    const std::size_t n = effect.size();
    if (n < 10 * L) {
        throw Error(ErrorCode::SeriesTooShort, "granger_test needs at least 10 * lag_order observations");
    }
    const Index rows = static_cast<Index>(n - L);
    const Index Li = static_cast<Index>(L);
    MatrixXd Xu(rows, 1 + 2 * Li);
    VectorXd y(rows);
    for (Index r = 0; r < rows; ++r) {
        const std::size_t t = L + static_cast<std::size_t>(r);
        y(r) = effect[t];
        Xu(r, 0) = 1.0;
        for (std::size_t j = 1; j <= L; ++j) {
            Xu(r, static_cast<Index>(j)) = effect[t - j];
            Xu(r, Li + static_cast<Index>(j)) = cause[t - j];
        }
    }
    const auto unrestricted = detail::ols(Xu, y);
    const auto restricted = detail::ols(Xu.leftCols(1 + Li), y);
    if (unrestricted.ssr <= 0.0) {
        throw Error(ErrorCode::SingularRegression, "Granger regression fits perfectly");
    }
    const double nobs = static_cast<double>(rows);
    const double gain = std::max(restricted.ssr - unrestricted.ssr, 0.0);

    GrangerResult res;
    res.lag_order = lag_order;
    res.form = form;
    res.nobs = static_cast<std::size_t>(rows);
    if (form == GrangerForm::WaldChi2) {
        res.statistic = nobs * gain / unrestricted.ssr;
        boost::math::chi_squared dist(static_cast<double>(L));
        res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
    } else {
        const double df2 = nobs - static_cast<double>(1 + 2 * L);
        res.statistic = (gain / static_cast<double>(L)) / (unrestricted.ssr / df2);
        boost::math::fisher_f dist(static_cast<double>(L), df2);
        res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
    }
    res.p_value = std::clamp(res.p_value, 0.0, 1.0);
    res.significant_at_5pct = res.p_value < kSignificance;
    return res;
}

GrangerResult granger_test(const DailySeries& cause, const DailySeries& effect, int lag_order, GrangerForm form) {
    const auto [x, y] = joined_values(cause, effect);
    auto res = granger_test(x, y, lag_order, form);
    res.cause = cause.name();
    res.effect = effect.name();
    return res;
}

namespace {

std::pair<StationarityRow, DailySeries> make_stationary(const DailySeries& s, const GrangerTableOptions& opt) {
    StationarityRow row;
    row.series = s.name();
    const int lags = opt.adf_max_lags.value_or(default_adf_lags(s.size()));
    row.level = adf_test(s, lags, opt.adf_kind);
    if (row.level.stationary_at_5pct) {
        return {row, s};
    }
    auto diffed = difference(s, 1);
    row.was_differenced = true;
    row.differenced = adf_test(diffed, opt.adf_max_lags.value_or(default_adf_lags(diffed.size())), opt.adf_kind);
    return {row, diffed};
}

} // namespace

GrangerTable granger_table(const SignalSet& signals, const DailySeries& target, const GrangerTableOptions& options) {
    GrangerTable table;
    table.effect = target.name();
    auto [target_row, effect] = make_stationary(target, options);
    table.stationarity.push_back(target_row);

    for (const auto& predictor : signals) {
        if (predictor.name() == target.name()) continue;
        std::optional<DailySeries> cause;
        std::string failure;
        try {
            auto [row, s] = make_stationary(predictor, options);
            table.stationarity.push_back(row);
            cause = s;
        } catch (const Error& err) {
            failure = err.what();
            StationarityRow row;
            row.series = predictor.name();
            row.error = failure;
            table.stationarity.push_back(row);
        }
        for (int L : options.lags) {
            GrangerRow cell{predictor.name(), L, std::nullopt, failure};
            if (cause) {
                try {
                    cell.result = granger_test(*cause, effect, L, options.form);
                } catch (const Error& err) {
                    cell.error = err.what();
                }
            }
            table.rows.push_back(std::move(cell));
        }
    }
    return table;
}

} // namespace crudecast::econo
