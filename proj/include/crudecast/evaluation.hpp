#ifndef CRUDECAST_EVALUATION_HPP
#define CRUDECAST_EVALUATION_HPP

#include <crudecast/arima.hpp>
#include <crudecast/series.hpp>

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crudecast::eval {

double rmse(std::span<const double> actual, std::span<const double> predicted);
/// Percent scale: 100 * mean(|a - p| / |a|).
double mape(std::span<const double> actual, std::span<const double> predicted);
double mae(std::span<const double> actual, std::span<const double> predicted);

/// Series versions require identical date grids.
double rmse(const DailySeries& actual, const DailySeries& predicted);
double mape(const DailySeries& actual, const DailySeries& predicted);

enum class ForecastMode { Rolling, Trajectory };

struct ModelDefinition {
    std::string name;
    arima::ArimaxSpec spec;
};

struct ForecastReport {
    std::string model_name;
    arima::ArimaxSpec spec;
    std::optional<DailySeries> predictions;
    std::optional<DailySeries> actuals;
    double rmse = 0.0;
    double mape_percent = 0.0;
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    std::size_t n_effective = 0;
    bool converged = false;
    std::vector<arima::CoefficientRow> coefficient_rows;
    std::optional<arima::FitResult> fit;
    std::string error; ///< non-empty when the model could not be evaluated

    bool ok() const noexcept { return error.empty(); }
};

struct BatteryOptions {
    arima::FitOptions fit;
    ForecastMode mode = ForecastMode::Rolling;
    double collinearity_threshold = 0.95;
};

/// Fits every model on dates <= boundary and scores its out-of-sample
/// forecasts on the rest. A pure-ARIMA baseline row is prepended when the list
/// has none. Per-model failures are recorded, not thrown.
std::vector<ForecastReport> model_battery(const DailySeries& target, const SignalSet& signals,
                                          std::span<const ModelDefinition> models, Date boundary,
                                          const BatteryOptions& options = {});

/// model,kind,p,d,q,include_constant,exog,n_effective,loglik,aic,bic,rmse,
/// mape_percent,converged,error rows.
void write_battery_csv(std::ostream& out, std::span<const ForecastReport> reports);
/// Variables as rows, models as columns, `*` marking |coef| > 1.96 se.
void write_battery_table(std::ostream& out, std::span<const ForecastReport> reports);
/// date,actual,predicted
void write_forecast_csv(std::ostream& out, const ForecastReport& report);

} // namespace crudecast::eval

#endif
