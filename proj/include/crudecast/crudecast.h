/* C interface to the crudecast library. All functions are thread-safe with
 * respect to distinct handles; cc_last_error() is per thread. */
#ifndef CRUDECAST_H
#define CRUDECAST_H

#include <stddef.h>
#include <stdint.h>

#if defined(CRUDECAST_BUILDING_LIBRARY)
#define CC_API __attribute__((visibility("default")))
#else
#define CC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cc_status {
    CC_OK = 0,
    CC_INVALID_ARGUMENT = 1,
    CC_IO = 2,
    CC_VALIDATION = 3,
    CC_STAGE_FAILURE = 4,
    CC_EMPTY_AFTER_ALIGNMENT = 10,
    CC_DUPLICATE_DATE = 11,
    CC_LAG_TOO_LARGE = 12,
    CC_LAG_EXCEEDS_LENGTH = 13,
    CC_ORDER_EXCEEDS_LENGTH = 14,
    CC_BOUNDARY_OUT_OF_RANGE = 15,
    CC_EMPTY_INTERSECTION = 16,
    CC_CALENDAR_MISMATCH = 17,
    CC_OUT_OF_RANGE = 20,
    CC_EMPTY_CORPUS = 21,
    CC_OVERLAPPING_LEXICON = 22,
    CC_LENGTH_MISMATCH = 30,
    CC_ZERO_VARIANCE = 31,
    CC_SERIES_TOO_SHORT = 32,
    CC_SINGULAR_REGRESSION = 33,
    CC_NON_CONVERGENCE = 40,
    CC_TOO_FEW_OBSERVATIONS = 41,
    CC_EXOG_MISSING = 42,
    CC_NON_STATIONARY_PARAMS = 43,
    CC_MISSING_FUTURE_EXOG = 44,
    CC_COLLINEAR_REGRESSORS = 45,
    CC_ZERO_ACTUAL = 50,
    CC_MALFORMED_ROW = 60,
    CC_NON_POSITIVE_PRICE = 61,
    CC_VOLUME_OUT_OF_RANGE = 62,
    CC_MALFORMED_RECORD = 63,
    CC_INTERNAL = 99
} cc_status;

typedef struct cc_series cc_series;
typedef struct cc_fit cc_fit;
typedef struct cc_pipeline cc_pipeline;

CC_API const char* cc_version(void);
/* Message of the last failing call on this thread ("" if none). */
CC_API const char* cc_last_error(void);
CC_API const char* cc_status_name(cc_status status);

/* ---- series ---------------------------------------------------------- */

/* Series on the default Monday-Friday calendar. start_date is YYYY-MM-DD. */
CC_API cc_status cc_series_create(const char* name, const char* start_date, const double* values, size_t n,
                                  cc_series** out);
/* Reads a `date,value` CSV and aligns it; holidays_file may be NULL. */
CC_API cc_status cc_series_from_csv(const char* path, const char* name, const char* holidays_file, cc_series** out);
CC_API size_t cc_series_length(const cc_series* s);
/* Copies min(n, length) values. */
CC_API cc_status cc_series_values(const cc_series* s, double* out, size_t n);
/* Writes the i-th date as YYYY-MM-DD (buffer of at least 11 bytes). */
CC_API cc_status cc_series_date(const cc_series* s, size_t i, char* buf, size_t buf_size);
CC_API cc_status cc_series_lag(const cc_series* s, int k, cc_series** out);
CC_API cc_status cc_series_difference(const cc_series* s, int order, cc_series** out);
CC_API void cc_series_free(cc_series* s);

/* ---- statistics ------------------------------------------------------ */

CC_API cc_status cc_rmse(const double* actual, const double* predicted, size_t n, double* out);
/* Percent scale. */
CC_API cc_status cc_mape(const double* actual, const double* predicted, size_t n, double* out);
CC_API cc_status cc_pearson(const double* x, const double* y, size_t n, double* r, double* p_value);

typedef enum cc_regression { CC_REG_NONE = 0, CC_REG_CONSTANT = 1, CC_REG_CONSTANT_TREND = 2 } cc_regression;

typedef struct cc_adf_result {
    double statistic;
    int lags_used;
    double critical_1pct;
    double critical_5pct;
    double critical_10pct;
    size_t nobs;
    int stationary_at_5pct;
} cc_adf_result;

/* max_lags < 0 selects the default lag bound. */
CC_API cc_status cc_adf(const double* x, size_t n, int max_lags, cc_regression kind, cc_adf_result* out);

typedef struct cc_granger_result {
    double statistic;
    double p_value;
    size_t nobs;
    int significant_at_5pct;
} cc_granger_result;

/* use_f != 0 selects the F form instead of the Wald chi-square. */
CC_API cc_status cc_granger(const double* cause, const double* effect, size_t n, int lag_order, int use_f,
                            cc_granger_result* out);

/* ---- ARIMA / ARIMAX ---------------------------------------------------- */

typedef struct cc_arima_order {
    int p;
    int d;
    int q;
    int include_constant;
} cc_arima_order;

typedef struct cc_exog_term {
    const cc_series* series; /* the term is named after the series */
    int lag;
} cc_exog_term;

typedef struct cc_fit_summary {
    double loglik;
    double aic;
    double bic;
    double sigma2;
    size_t n_effective;
    int k;
    int converged;
    size_t n_coefficients;
} cc_fit_summary;

CC_API cc_status cc_arima_fit(const cc_series* y, const cc_exog_term* exog, size_t n_exog, cc_arima_order order,
                              uint64_t seed, cc_fit** out);
CC_API cc_status cc_fit_summary_get(const cc_fit* fit, cc_fit_summary* out);
/* Coefficients in the order AR, MA, constant, exogenous. */
CC_API cc_status cc_fit_coefficient(const cc_fit* fit, size_t i, char* name_buf, size_t name_size, double* estimate,
                                    double* se, int* significant);
/* Level forecasts for horizons 1..horizon; regressor values must be available
 * from the series passed to cc_arima_fit. */
CC_API cc_status cc_fit_forecast(const cc_fit* fit, int horizon, double* out);
CC_API void cc_fit_free(cc_fit* fit);

/* ---- pipeline -------------------------------------------------------- */

/* Loads and validates a config; CRUDECAST_OUT_DIR / CRUDECAST_SEED apply. */
CC_API cc_status cc_pipeline_open(const char* config_path, cc_pipeline** out);
CC_API cc_status cc_pipeline_set_seed(cc_pipeline* p, uint64_t seed);
CC_API cc_status cc_pipeline_set_output_dir(cc_pipeline* p, const char* dir);
/* stage: ingest, features, correlate, granger, fit, report, or run (all). */
CC_API cc_status cc_pipeline_run_stage(cc_pipeline* p, const char* stage);
CC_API void cc_pipeline_free(cc_pipeline* p);

/* Writes the synthetic study dataset into dir. */
CC_API cc_status cc_generate_fixture(const char* dir, uint64_t seed, int max_attempts);

#ifdef __cplusplus
}
#endif

#endif
