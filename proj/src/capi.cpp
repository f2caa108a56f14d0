#include <crudecast/arima.hpp>
#include <crudecast/crudecast.h>
#include <crudecast/econo_tests.hpp>
#include <crudecast/error.hpp>
#include <crudecast/evaluation.hpp>
#include <crudecast/pipeline.hpp>
#include <crudecast/synthetic.hpp>

#include <cstring>
#include <optional>
#include <string>

using namespace crudecast;

struct cc_series {
    DailySeries series;
};

struct cc_fit {
    arima::FitResult result;
};

struct cc_pipeline {
    pipeline::PipelineConfig config;
};

namespace {

thread_local std::string g_last_error;

cc_status fail(cc_status status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

template <class F>
cc_status guarded(F&& body) {
    try {
        g_last_error.clear();
        body();
        return CC_OK;
    } catch (const Error& e) {
        return fail(static_cast<cc_status>(static_cast<int>(e.code())), e.what());
    } catch (const std::bad_alloc&) {
        return fail(CC_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CC_INTERNAL, e.what());
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

std::span<const double> view(const double* p, std::size_t n) { return {p, n}; }

} // namespace

extern "C" {

const char* cc_version(void) { return CRUDECAST_VERSION; }

const char* cc_last_error(void) { return g_last_error.c_str(); }

const char* cc_status_name(cc_status status) {
    if (status == CC_OK) return "Ok";
    if (status == CC_INTERNAL) return "Internal";
    return to_string(static_cast<ErrorCode>(status)).data();
}

cc_status cc_series_create(const char* name, const char* start_date, const double* values, size_t n, cc_series** out) {
    return guarded([&] {
        require(name && start_date && out && (values || n == 0), "null argument");
        *out = new cc_series{DailySeries(name, default_calendar(), parse_date(start_date),
                                         std::vector<double>(values, values + n))};
    });
}

cc_status cc_series_from_csv(const char* path, const char* name, const char* holidays_file, cc_series** out) {
    return guarded([&] {
        require(path && name && out, "null argument");
        CalendarPtr cal = holidays_file
                              ? std::make_shared<const TradingCalendar>(TradingCalendar::from_holiday_file(holidays_file))
                              : default_calendar();
        *out = new cc_series{read_series_csv(path, cal, name)};
    });
}

size_t cc_series_length(const cc_series* s) { return s ? s->series.size() : 0; }

cc_status cc_series_values(const cc_series* s, double* out, size_t n) {
    return guarded([&] {
        require(s && (out || n == 0), "null argument");
        const auto v = s->series.values();
        std::copy_n(v.begin(), std::min(n, v.size()), out);
    });
}

cc_status cc_series_date(const cc_series* s, size_t i, char* buf, size_t buf_size) {
    return guarded([&] {
        require(s && buf, "null argument");
        if (i >= s->series.size()) throw Error(ErrorCode::OutOfRange, "date index out of range");
        const auto text = format_date(s->series.date(i));
        require(buf_size > text.size(), "buffer too small");
        std::memcpy(buf, text.c_str(), text.size() + 1);
    });
}

cc_status cc_series_lag(const cc_series* s, int k, cc_series** out) {
    return guarded([&] {
        require(s && out, "null argument");
        *out = new cc_series{lag(s->series, k)};
    });
}

cc_status cc_series_difference(const cc_series* s, int order, cc_series** out) {
    return guarded([&] {
        require(s && out, "null argument");
        *out = new cc_series{difference(s->series, order)};
    });
}

void cc_series_free(cc_series* s) { delete s; }

cc_status cc_rmse(const double* actual, const double* predicted, size_t n, double* out) {
    return guarded([&] {
        require(actual && predicted && out, "null argument");
        *out = eval::rmse(view(actual, n), view(predicted, n));
    });
}

cc_status cc_mape(const double* actual, const double* predicted, size_t n, double* out) {
    return guarded([&] {
        require(actual && predicted && out, "null argument");
        *out = eval::mape(view(actual, n), view(predicted, n));
    });
}

cc_status cc_pearson(const double* x, const double* y, size_t n, double* r, double* p_value) {
    return guarded([&] {
        require(x && y && r, "null argument");
        const auto e = econo::pearson(view(x, n), view(y, n));
        *r = e.r;
        if (p_value) *p_value = e.p_value;
    });
}

cc_status cc_adf(const double* x, size_t n, int max_lags, cc_regression kind, cc_adf_result* out) {
    return guarded([&] {
        require(x && out, "null argument");
        require(kind >= CC_REG_NONE && kind <= CC_REG_CONSTANT_TREND, "unknown regression kind");
        const int lags = max_lags < 0 ? econo::default_adf_lags(n) : max_lags;
        const auto r = econo::adf_test(view(x, n), lags, static_cast<econo::RegressionKind>(kind));
        *out = {r.statistic,
                r.lags_used,
                r.critical_values.one_pct,
                r.critical_values.five_pct,
                r.critical_values.ten_pct,
                r.nobs,
                r.stationary_at_5pct ? 1 : 0};
    });
}

cc_status cc_granger(const double* cause, const double* effect, size_t n, int lag_order, int use_f,
                     cc_granger_result* out) {
    return guarded([&] {
        require(cause && effect && out, "null argument");
        const auto r = econo::granger_test(view(cause, n), view(effect, n), lag_order,
                                           use_f ? econo::GrangerForm::F : econo::GrangerForm::WaldChi2);
        *out = {r.statistic, r.p_value, r.nobs, r.significant_at_5pct ? 1 : 0};
    });
}

cc_status cc_arima_fit(const cc_series* y, const cc_exog_term* exog, size_t n_exog, cc_arima_order order,
                       uint64_t seed, cc_fit** out) {
    return guarded([&] {
        require(y && out && (exog || n_exog == 0), "null argument");
        arima::ArimaxSpec spec{{order.p, order.d, order.q, order.include_constant != 0}, {}};
        std::vector<DailySeries> parts;
        for (size_t i = 0; i < n_exog; ++i) {
            require(exog[i].series != nullptr, "null exogenous series");
            spec.exog.push_back({exog[i].series->series.name(), exog[i].lag, true});
            parts.push_back(exog[i].series->series);
        }
        arima::FitOptions opts;
        opts.seed = seed;
        *out = new cc_fit{arima::fit(y->series, SignalSet(std::move(parts)), spec, opts)};
    });
}

cc_status cc_fit_summary_get(const cc_fit* fit, cc_fit_summary* out) {
    return guarded([&] {
        require(fit && out, "null argument");
        const auto& r = fit->result;
        *out = {r.loglik, r.aic, r.bic, r.params.sigma2, r.n_effective, r.k, r.converged ? 1 : 0, r.coefficients().size()};
    });
}

cc_status cc_fit_coefficient(const cc_fit* fit, size_t i, char* name_buf, size_t name_size, double* estimate, double* se,
                             int* significant) {
    return guarded([&] {
        require(fit != nullptr, "null argument");
        const auto rows = fit->result.coefficients();
        if (i >= rows.size()) throw Error(ErrorCode::OutOfRange, "coefficient index out of range");
        const auto& row = rows[i];
        if (name_buf) {
            require(name_size > row.name.size(), "buffer too small");
            std::memcpy(name_buf, row.name.c_str(), row.name.size() + 1);
        }
        if (estimate) *estimate = row.estimate;
        if (se) *se = row.se;
        if (significant) *significant = row.significant ? 1 : 0;
    });
}

cc_status cc_fit_forecast(const cc_fit* fit, int horizon, double* out) {
    return guarded([&] {
        require(fit && out, "null argument");
        const auto f = arima::forecast(fit->result, horizon);
        std::copy(f.values().begin(), f.values().end(), out);
    });
}

void cc_fit_free(cc_fit* fit) { delete fit; }

cc_status cc_pipeline_open(const char* config_path, cc_pipeline** out) {
    return guarded([&] {
        require(config_path && out, "null argument");
        auto cfg = pipeline::load_config(config_path);
        pipeline::apply_environment(cfg);
        pipeline::validate(cfg);
        *out = new cc_pipeline{std::move(cfg)};
    });
}

cc_status cc_pipeline_set_seed(cc_pipeline* p, uint64_t seed) {
    return guarded([&] {
        require(p != nullptr, "null argument");
        p->config.seed = seed;
    });
}

cc_status cc_pipeline_set_output_dir(cc_pipeline* p, const char* dir) {
    return guarded([&] {
        require(p && dir && *dir, "null or empty argument");
        p->config.output_dir = dir;
    });
}

cc_status cc_pipeline_run_stage(cc_pipeline* p, const char* stage) {
    return guarded([&] {
        require(p && stage, "null argument");
        pipeline::Pipeline pipe(p->config);
        if (std::string_view(stage) == "run") {
            pipe.run_all();
            return;
        }
        const auto s = pipeline::stage_from_string(stage);
        if (!s) throw Error(ErrorCode::InvalidArgument, std::string("unknown stage '") + stage + "'");
        pipe.run_stage(*s);
    });
}

void cc_pipeline_free(cc_pipeline* p) { delete p; }

cc_status cc_generate_fixture(const char* dir, uint64_t seed, int max_attempts) {
    return guarded([&] {
        require(dir && *dir, "null or empty argument");
        synthetic::FixtureOptions opts;
        opts.seed = seed;
        if (max_attempts > 0) opts.max_attempts = max_attempts;
        synthetic::generate_fixture(dir, opts);
    });
}

} // extern "C"
