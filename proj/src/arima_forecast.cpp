#include "arima_internal.hpp"

#include <crudecast/arima.hpp>
#include <crudecast/error.hpp>

#include <cmath>

namespace crudecast::arima {

namespace {

std::optional<double> lookup(const SignalSet& primary, const SignalSet& fallback, const std::string& name, Date date) {
    for (const SignalSet* set : {&primary, &fallback}) {
        if (const auto* s = set->find(name)) {
            if (auto idx = s->index_of(date)) return (*s)[*idx];
        }
    }
    return std::nullopt;
}

// Regressor value entering the differenced equation at `date`.
double regressor_at(const ExogTerm& term, int d, Date date, const TradingCalendar& cal, const SignalSet& future,
                    const SignalSet& history) {
    const Date source = cal.advance(date, -term.lag);
    auto value_at = [&](Date day) {
        auto v = lookup(future, history, term.name, day);
        if (!v) {
            throw Error(ErrorCode::MissingFutureExog,
                        "no value of '" + term.name + "' for " + format_date(day));
        }
        return *v;
    };
    if (!term.difference_like_target || d == 0) return value_at(source);
    double acc = 0.0;
    double binom = 1.0;
    Date day = source;
    for (int j = 0; j <= d; ++j) {
        if (j > 0) {
            binom = binom * static_cast<double>(d - j + 1) / static_cast<double>(j);
            day = cal.prev(day);
        }
        acc += ((j % 2 == 0) ? 1.0 : -1.0) * binom * value_at(day);
    }
    return acc;
}

std::vector<double> residuals_for(const Design& design, const ArimaParams& params) {
    std::span<const double> z(design.z.data(), static_cast<std::size_t>(design.z.size()));
    return css_residuals(z, design.X, params);
}

} // namespace

DailySeries forecast(const FitResult& fit, int horizon, const SignalSet& future_exog) {
    if (horizon < 1) {
        throw Error(ErrorCode::InvalidArgument, "forecast horizon must be at least 1");
    }
    const auto& spec = fit.spec;
    const auto& params = fit.params;
    const int d = spec.base.d;
    const Design design = detail::slice_design(build_design(fit.target, fit.exog, spec), fit.sample_offset);
    const auto e_hist = residuals_for(design, params);
    std::span<const double> z(design.z.data(), static_cast<std::size_t>(design.z.size()));
    auto w = detail::adjusted_target(z, design.X, params);
    const std::size_t n = w.size();
    const std::size_t p = params.phi.size();
    std::vector<double> levels(design.levels.values().begin(), design.levels.values().end());
    const auto& cal = fit.target.calendar();

    auto residual_at = [&](std::size_t t) { return (t >= p && t < n) ? e_hist[t - p] : 0.0; };

    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(horizon));
    Date date = design.dates.back();
    const Date first = cal.next(date);
    for (int h = 1; h <= horizon; ++h) {
        date = cal.next(date);
        const std::size_t t = n + static_cast<std::size_t>(h - 1);
        double wh = 0.0;
        for (std::size_t i = 1; i <= p; ++i) wh += params.phi[i - 1] * w[t - i];
        for (std::size_t j = 1; j <= params.theta.size(); ++j) {
            if (t >= j) wh += params.theta[j - 1] * residual_at(t - j);
        }
        w.push_back(wh);
        double zh = wh + params.constant;
        for (std::size_t b = 0; b < spec.exog.size(); ++b) {
            zh += params.beta[b] * regressor_at(spec.exog[b], d, date, cal, future_exog, fit.exog);
        }
        const double level = d == 0 ? zh : detail::integrate_step(zh, levels, d);
        levels.push_back(level);
        out.push_back(level);
    }
    return DailySeries(fit.target.name() + "_forecast", fit.target.calendar_ptr(), first, std::move(out),
                       describe(spec.base, !spec.exog.empty()));
}

DailySeries one_step_ahead(const FitResult& fit, const DailySeries& y_full, const SignalSet& exog_full, Date first) {
    if (y_full.start_date() != fit.target.start_date()) {
        throw Error(ErrorCode::InvalidArgument, "full series must start where the estimation sample starts");
    }
    const Design design = detail::slice_design(build_design(y_full, exog_full, fit.spec), fit.sample_offset);
    const auto e = residuals_for(design, fit.params);
    const std::size_t p = fit.params.phi.size();
    const auto d = static_cast<std::size_t>(fit.spec.base.d);
    std::vector<double> predictions;
    std::optional<Date> start;
    for (std::size_t t = p; t < design.dates.size(); ++t) {
        if (design.dates[t] < first) continue;
        if (!start) start = design.dates[t];
        predictions.push_back(design.levels[t + d] - e[t - p]);
    }
    if (!start) {
        throw Error(ErrorCode::BoundaryOutOfRange, "no observations on or after " + format_date(first));
    }
    return DailySeries(y_full.name() + "_predicted", y_full.calendar_ptr(), *start, std::move(predictions),
                       "rolling one-step");
}

DailySeries fitted_values(const FitResult& fit) {
    const Design design = detail::slice_design(build_design(fit.target, fit.exog, fit.spec), fit.sample_offset);
    const auto e = residuals_for(design, fit.params);
    const std::size_t p = fit.params.phi.size();
    const auto d = static_cast<std::size_t>(fit.spec.base.d);
    std::vector<double> values(e.size());
    for (std::size_t t = p; t < design.dates.size(); ++t) values[t - p] = design.levels[t + d] - e[t - p];
    return DailySeries(fit.target.name() + "_fitted", fit.target.calendar_ptr(), design.dates[p], std::move(values),
                       "in-sample one-step");
}

} // namespace crudecast::arima
