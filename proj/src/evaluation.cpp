#include "parallel.hpp"

#include <crudecast/econo_tests.hpp>
#include <crudecast/error.hpp>
#include <crudecast/evaluation.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace crudecast::eval {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> p) {
    if (a.size() != p.size()) {
        throw Error(ErrorCode::LengthMismatch, "actual and predicted differ in length");
    }
    if (a.empty()) {
        throw Error(ErrorCode::InvalidArgument, "metrics need at least one point");
    }
}

void check_aligned(const DailySeries& a, const DailySeries& p) {
    if (a.size() != p.size() || a.start_date() != p.start_date()) {
        throw Error(ErrorCode::LengthMismatch, "actual and predicted are not on the same dates");
    }
}

std::string cell(double v) { return fmt::format("{:.17g}", v); }

} // namespace

double rmse(std::span<const double> actual, std::span<const double> predicted) {
    check_lengths(actual, predicted);
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - predicted[i];
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(actual.size()));
}

double mape(std::span<const double> actual, std::span<const double> predicted) {
    check_lengths(actual, predicted);
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) {
            throw Error(ErrorCode::ZeroActual, "MAPE undefined for a zero actual value");
        }
        acc += std::abs(actual[i] - predicted[i]) / std::abs(actual[i]);
    }
    return 100.0 * acc / static_cast<double>(actual.size());
}

double mae(std::span<const double> actual, std::span<const double> predicted) {
    check_lengths(actual, predicted);
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) acc += std::abs(actual[i] - predicted[i]);
    return acc / static_cast<double>(actual.size());
}

double rmse(const DailySeries& actual, const DailySeries& predicted) {
    check_aligned(actual, predicted);
    return rmse(actual.values(), predicted.values());
}

double mape(const DailySeries& actual, const DailySeries& predicted) {
    check_aligned(actual, predicted);
    return mape(actual.values(), predicted.values());
}

namespace {

void check_collinearity(const DailySeries& train, const SignalSet& signals, const arima::ArimaxSpec& spec,
                        double threshold) {
    if (spec.exog.size() < 2) return;
    const auto design = arima::build_design(train, signals, spec);
    for (Eigen::Index a = 0; a < design.X.cols(); ++a) {
        for (Eigen::Index b = a + 1; b < design.X.cols(); ++b) {
            std::span<const double> xa(design.X.col(a).data(), static_cast<std::size_t>(design.X.rows()));
            std::span<const double> xb(design.X.col(b).data(), static_cast<std::size_t>(design.X.rows()));
            double r = 0.0;
            try {
                r = econo::pearson(xa, xb).r;
            } catch (const Error&) {
                continue;
            }
            if (std::abs(r) > threshold) {
                throw Error(ErrorCode::CollinearRegressors,
                            fmt::format("'{}' and '{}' correlate at r = {:.3f}", spec.exog[static_cast<std::size_t>(a)].name,
                                        spec.exog[static_cast<std::size_t>(b)].name, r));
            }
        }
    }
}

ForecastReport run_model(const DailySeries& target, const SignalSet& signals, const ModelDefinition& model,
                         Date boundary, const BatteryOptions& options) {
    ForecastReport rep;
    rep.model_name = model.name;
    rep.spec = model.spec;
    try {
        const auto parts = split(target, boundary);
        check_collinearity(parts.train, signals, model.spec, options.collinearity_threshold);
        auto fitted = arima::fit(parts.train, signals, model.spec, options.fit);
        rep.loglik = fitted.loglik;
        rep.aic = fitted.aic;
        rep.bic = fitted.bic;
        rep.n_effective = fitted.n_effective;
        rep.converged = fitted.converged;
        rep.coefficient_rows = fitted.coefficients();
        DailySeries predicted = options.mode == ForecastMode::Rolling
                                    ? arima::one_step_ahead(fitted, target, signals, parts.test.start_date())
                                    : arima::forecast(fitted, static_cast<int>(parts.test.size()), signals);
        rep.rmse = rmse(parts.test, predicted);
        rep.mape_percent = mape(parts.test, predicted);
        rep.actuals = parts.test;
        rep.predictions = std::move(predicted);
        rep.fit = std::move(fitted);
    } catch (const Error& err) {
        rep.error = err.what();
    }
    return rep;
}

} // namespace

std::vector<ForecastReport> model_battery(const DailySeries& target, const SignalSet& signals,
                                          std::span<const ModelDefinition> models, Date boundary,
                                          const BatteryOptions& options) {
    if (models.empty()) {
        throw Error(ErrorCode::InvalidArgument, "model battery needs at least one model");
    }
    std::vector<ModelDefinition> list(models.begin(), models.end());
    const bool has_baseline =
        std::any_of(list.begin(), list.end(), [](const ModelDefinition& m) { return m.spec.exog.empty(); });
    if (!has_baseline) {
        list.insert(list.begin(), ModelDefinition{"ARIMA", arima::ArimaxSpec{list.front().spec.base, {}}});
    }
    std::vector<ForecastReport> reports(list.size());
    crudecast::detail::parallel_for(list.size(), [&](std::size_t i) {
        reports[i] = run_model(target, signals, list[i], boundary, options);
    });
    return reports;
}

void write_battery_csv(std::ostream& out, std::span<const ForecastReport> reports) {
    out << "model,kind,p,d,q,include_constant,exog,n_effective,loglik,aic,bic,rmse,mape_percent,converged,error\n";
    for (const auto& r : reports) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::string exog;
        for (const auto& t : r.spec.exog) exog += (exog.empty() ? "" : ";") + t.name + "(t-" + std::to_string(t.lag) + ")";
        const auto& b = r.spec.base;
        out << r.model_name << ',' << (r.spec.exog.empty() ? "ARIMA" : "ARIMAX") << ',' << b.p << ',' << b.d << ','
            << b.q << ',' << (b.include_constant ? "true" : "false") << ',' << exog << ',' << r.n_effective << ','
            << cell(r.loglik) << ',' << cell(r.aic) << ',' << cell(r.bic) << ',' << cell(r.rmse) << ','
            << cell(r.mape_percent) << ',' << (r.converged ? "true" : "false") << ',' << err << '\n';
    }
}

void write_battery_table(std::ostream& out, std::span<const ForecastReport> reports) {
    // Rows: every exogenous variable in first-seen order.
    std::vector<std::string> variables;
    for (const auto& r : reports) {
        for (const auto& row : r.coefficient_rows) {
            if (row.lag == 0) continue;
            if (std::find(variables.begin(), variables.end(), row.name) == variables.end()) variables.push_back(row.name);
        }
    }
    std::size_t label_width = std::string_view("Number of Observations").size();
    for (const auto& v : variables) label_width = std::max(label_width, v.size());
    std::size_t col_width = 12;
    for (const auto& r : reports) {
        col_width = std::max({col_width, r.model_name.size() + 2,
                              arima::describe(r.spec.base, !r.spec.exog.empty()).size() + 2});
    }

    out << fmt::format("{:<{}}", "Variable", label_width);
    for (const auto& r : reports) out << fmt::format("{:>{}}", r.model_name, col_width);
    out << '\n';
    out << fmt::format("{:<{}}", "", label_width);
    for (const auto& r : reports) {
        out << fmt::format("{:>{}}", arima::describe(r.spec.base, !r.spec.exog.empty()), col_width);
    }
    out << '\n';
    for (const auto& v : variables) {
        out << fmt::format("{:<{}}", v, label_width);
        for (const auto& r : reports) {
            std::string text;
            for (const auto& row : r.coefficient_rows) {
                if (row.name == v) text = fmt::format("{:.3g}{}", row.estimate, row.significant ? "*" : "");
            }
            out << fmt::format("{:>{}}", text, col_width);
        }
        out << '\n';
    }
    auto metric_row = [&](std::string_view label, auto getter) {
        out << fmt::format("{:<{}}", label, label_width);
        for (const auto& r : reports) out << fmt::format("{:>{}}", r.ok() ? getter(r) : std::string("failed"), col_width);
        out << '\n';
    };
    metric_row("Number of Observations", [](const ForecastReport& r) { return std::to_string(r.n_effective); });
    metric_row("AIC (in-sample)", [](const ForecastReport& r) { return fmt::format("{:.2f}", r.aic); });
    metric_row("BIC (in-sample)", [](const ForecastReport& r) { return fmt::format("{:.2f}", r.bic); });
    metric_row("RMSE (out-of-sample)", [](const ForecastReport& r) { return fmt::format("{:.3f}", r.rmse); });
    metric_row("MAPE (out-of-sample)", [](const ForecastReport& r) { return fmt::format("{:.3f}", r.mape_percent); });
    out << "*p<0.05; (t-k) k-business-day lag\n";
    for (const auto& r : reports) {
        if (!r.ok()) out << r.model_name << ": " << r.error << '\n';
        else if (!r.converged) out << r.model_name << ": optimizer did not converge (best-so-far reported)\n";
    }
}

void write_forecast_csv(std::ostream& out, const ForecastReport& report) {
    out << "date,actual,predicted\n";
    if (!report.predictions || !report.actuals) return;
    const auto& a = *report.actuals;
    const auto& p = *report.predictions;
    for (std::size_t i = 0; i < p.size(); ++i) {
        out << format_date(p.date(i)) << ',' << format_number(a[i]) << ',' << format_number(p[i]) << '\n';
    }
}

} // namespace crudecast::eval
