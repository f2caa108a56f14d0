#ifndef CRUDECAST_ARIMA_HPP
#define CRUDECAST_ARIMA_HPP

#include <crudecast/series.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace crudecast::arima {

/// Upper bound on p, d and q.
inline constexpr int kMaxOrder = 6;

struct ArimaSpec {
    int p = 0;
    int d = 0;
    int q = 0;
    bool include_constant = false;
};

struct ExogTerm {
    std::string name;
    int lag = 1;
    bool difference_like_target = true;
};

struct ArimaxSpec {
    ArimaSpec base;
    std::vector<ExogTerm> exog;
};

/// Throws Error(InvalidArgument) for orders outside 0..kMaxOrder, lags outside
/// 1..3, duplicate exogenous names or a model with nothing to estimate.
void validate(const ArimaxSpec& spec);
/// "ARIMA(2,1,4)" or "ARIMAX(2,1,4)".
std::string describe(const ArimaSpec& base, bool has_exog = false);

struct ArimaParams {
    std::vector<double> phi;   ///< AR coefficients, size p
    std::vector<double> theta; ///< MA coefficients, size q
    std::vector<double> beta;  ///< one per ExogTerm
    double constant = 0.0;     ///< mean of the differenced, regressor-adjusted target
    double sigma2 = 1.0;
};

/// Roots of 1 - sum phi_i z^i outside the unit circle.
bool is_stationary(std::span<const double> phi);
/// Roots of 1 + sum theta_j z^j outside the unit circle.
bool is_invertible(std::span<const double> theta);

/// Throws NonStationaryParams / InvalidArgument when params don't fit spec or
/// violate stationarity, invertibility or sigma2 > 0.
void validate(const ArimaParams& params, const ArimaxSpec& spec);

// Partial-autocorrelation parameterisation: any r in (-1,1)^p maps to a
// stationary coefficient vector and back.
std::vector<double> pacf_to_coefficients(std::span<const double> partial);
std::vector<double> coefficients_to_pacf(std::span<const double> coefficients);

struct CoefficientRow {
    std::string name;
    int lag = 0; ///< exogenous lag, 0 for AR/MA/constant rows
    double estimate = 0.0;
    double se = 0.0;
    bool significant = false; ///< |estimate| > 1.96 se
};

/// Target and regressors after lagging, joining and differencing.
struct Design {
    std::vector<Date> dates;   ///< dates of z
    Eigen::VectorXd z;         ///< differenced target
    Eigen::MatrixXd X;         ///< one column per ExogTerm
    DailySeries levels;        ///< undifferenced target, d points longer than z
};

Design build_design(const DailySeries& y, const SignalSet& exog, const ArimaxSpec& spec);

struct FitResult {
    ArimaxSpec spec;
    ArimaParams params;
    /// Ordered phi, theta, constant (when included), beta.
    std::vector<double> standard_errors;
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    int k = 0; ///< estimated parameters including sigma2
    std::size_t n_effective = 0;
    DailySeries residuals;
    bool converged = false;
    int iterations = 0;
    DailySeries target; ///< estimation sample, kept for forecasting
    SignalSet exog;
    std::size_t sample_offset = 0; ///< leading differenced points excluded from estimation

    std::vector<CoefficientRow> coefficients() const;
};

struct FitOptions {
    std::uint64_t seed = 0;
    int starts = 5;
    int max_iterations = 2000;
    double tolerance = 1e-9;
    /// Drop this many leading differenced observations before estimating.
    std::size_t skip_leading = 0;
};

FitResult fit(const DailySeries& y, const SignalSet& exog, const ArimaxSpec& spec, const FitOptions& options = {});

/// Evaluates a model at fixed parameters (no estimation; standard errors NaN).
FitResult evaluate(const DailySeries& y, const SignalSet& exog, const ArimaxSpec& spec, const ArimaParams& params);

/// CSS residuals e_t, t = p..n-1, with pre-sample residuals zero.
std::vector<double> css_residuals(std::span<const double> z, const Eigen::MatrixXd& X, const ArimaParams& params);

/// -(n/2)(ln 2pi + ln s2) - n/2 with s2 = sum e^2 / n over the CSS residuals.
double loglikelihood(std::span<const double> z, const Eigen::MatrixXd& X, const ArimaParams& params);

/// Multi-step forecast from the end of the estimation sample. Future shocks are
/// zero. Regressor values come from future_exog first, then from fit.exog.
DailySeries forecast(const FitResult& fit, int horizon, const SignalSet& future_exog = {});

/// Rolling one-step-ahead predictions with frozen parameters for every date of
/// y_full on or after `first`. y_full must extend the estimation sample.
DailySeries one_step_ahead(const FitResult& fit, const DailySeries& y_full, const SignalSet& exog_full, Date first);

/// In-sample one-step predictions in levels for the residual dates.
DailySeries fitted_values(const FitResult& fit);

struct SimulationOptions {
    Date start = Date{std::chrono::year{2000} / 1 / 3};
    CalendarPtr calendar;
    std::string name = "simulated";
    std::size_t burn_in = 200;
};

/// Gaussian ARIMAX draw of length n. With exogenous terms the output sits on
/// the first n dates where every regressor is defined.
DailySeries simulate(const ArimaxSpec& spec, const ArimaParams& params, const SignalSet& exog, std::size_t n,
                     std::uint64_t seed, const SimulationOptions& options = {});

std::vector<double> acf(std::span<const double> x, int max_lag);
std::vector<double> pacf(std::span<const double> x, int max_lag);

struct OrderCandidate {
    ArimaSpec spec;
    double aic = 0.0;
    double bic = 0.0;
    bool converged = false;
    std::string error;
};

struct OrderSelection {
    ArimaSpec best;
    std::vector<OrderCandidate> candidates;
    std::vector<double> acf;  ///< lags 1..20 of the differenced series
    std::vector<double> pacf;
    bool skipped_any = false;
};

/// Minimum-AIC (p, d, q) over the grid; ties go to smaller p + q, then smaller q.
/// All candidates are estimated on a common sample.
OrderSelection select_order(const DailySeries& y, int p_max, int q_max, int d, const FitOptions& options = {});

} // namespace crudecast::arima

#endif
