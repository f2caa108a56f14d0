#include "arima_internal.hpp"

#include <crudecast/arima.hpp>
#include <crudecast/error.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace crudecast::arima {

void validate(const ArimaxSpec& spec) {
    const auto& b = spec.base;
    for (int order : {b.p, b.d, b.q}) {
        if (order < 0 || order > kMaxOrder) {
            throw Error(ErrorCode::InvalidArgument, "ARIMA orders must lie in 0.." + std::to_string(kMaxOrder));
        }
    }
    if (b.p + b.q == 0 && !b.include_constant && spec.exog.empty() && b.d == 0) {
        throw Error(ErrorCode::InvalidArgument, "model has nothing to estimate");
    }
    std::set<std::string> names;
    for (const auto& term : spec.exog) {
        if (term.lag < 1 || term.lag > kMaxLag) {
            throw Error(ErrorCode::InvalidArgument, "exogenous lag for '" + term.name + "' must lie in 1..3");
        }
        if (!names.insert(term.name).second) {
            throw Error(ErrorCode::InvalidArgument, "duplicate exogenous term '" + term.name + "'");
        }
    }
}

std::string describe(const ArimaSpec& base, bool has_exog) {
    return std::string(has_exog ? "ARIMAX(" : "ARIMA(") + std::to_string(base.p) + "," + std::to_string(base.d) +
           "," + std::to_string(base.q) + ")";
}

std::vector<double> pacf_to_coefficients(std::span<const double> partial) {
    std::vector<double> a;
    a.reserve(partial.size());
    std::vector<double> next;
    for (std::size_t k = 0; k < partial.size(); ++k) {
        const double r = partial[k];
        next.assign(a.begin(), a.end());
        for (std::size_t j = 0; j < k; ++j) next[j] = a[j] - r * a[k - 1 - j];
        next.push_back(r);
        a.swap(next);
    }
    return a;
}

std::vector<double> coefficients_to_pacf(std::span<const double> coefficients) {
    std::vector<double> a(coefficients.begin(), coefficients.end());
    std::vector<double> partial(a.size());
    std::vector<double> prev;
    for (std::size_t k = a.size(); k > 0; --k) {
        const double r = a[k - 1];
        partial[k - 1] = r;
        if (!(std::abs(r) < 1.0)) {
            std::fill(partial.begin(), partial.end(), std::nan(""));
            return partial;
        }
        prev.resize(k - 1);
        const double denom = 1.0 - r * r;
        for (std::size_t j = 0; j + 1 < k; ++j) prev[j] = (a[j] + r * a[k - 2 - j]) / denom;
        a.swap(prev);
    }
    return partial;
}

bool is_stationary(std::span<const double> phi) {
    const auto partial = coefficients_to_pacf(phi);
    return std::all_of(partial.begin(), partial.end(), [](double r) { return std::abs(r) < 1.0; });
}

bool is_invertible(std::span<const double> theta) {
    std::vector<double> neg(theta.begin(), theta.end());
    for (auto& v : neg) v = -v;
    return is_stationary(neg);
}

void validate(const ArimaParams& params, const ArimaxSpec& spec) {
    if (params.phi.size() != static_cast<std::size_t>(spec.base.p) ||
        params.theta.size() != static_cast<std::size_t>(spec.base.q) || params.beta.size() != spec.exog.size()) {
        throw Error(ErrorCode::InvalidArgument, "parameter vector sizes do not match the model orders");
    }
    if (!(params.sigma2 > 0.0) || !std::isfinite(params.sigma2)) {
        throw Error(ErrorCode::InvalidArgument, "sigma2 must be positive");
    }
    if (!is_stationary(params.phi)) {
        throw Error(ErrorCode::NonStationaryParams, "AR polynomial has a root on or inside the unit circle");
    }
    if (!is_invertible(params.theta)) {
        throw Error(ErrorCode::NonStationaryParams, "MA polynomial has a root on or inside the unit circle");
    }
}

std::vector<CoefficientRow> FitResult::coefficients() const {
    std::vector<CoefficientRow> rows;
    std::size_t idx = 0;
    auto push = [&](std::string name, int lag, double est) {
        const double se = idx < standard_errors.size() ? standard_errors[idx] : std::nan("");
        rows.push_back({std::move(name), lag, est, se, std::isfinite(se) && std::abs(est) > 1.96 * se});
        ++idx;
    };
    for (std::size_t i = 0; i < params.phi.size(); ++i) push("AR(" + std::to_string(i + 1) + ")", 0, params.phi[i]);
    for (std::size_t j = 0; j < params.theta.size(); ++j) push("MA(" + std::to_string(j + 1) + ")", 0, params.theta[j]);
    if (spec.base.include_constant) push("constant", 0, params.constant);
    for (std::size_t b = 0; b < params.beta.size(); ++b) {
        const auto& term = spec.exog[b];
        push(term.name + " (t-" + std::to_string(term.lag) + ")", term.lag, params.beta[b]);
    }
    return rows;
}

namespace detail {

void arma_filter(std::span<const double> w, std::span<const double> phi, std::span<const double> theta,
                 std::span<double> e) {
    const std::size_t p = phi.size();
    const std::size_t q = theta.size();
    const std::size_t n = w.size();
    for (std::size_t t = p; t < n; ++t) {
        double v = w[t];
        for (std::size_t i = 1; i <= p; ++i) v -= phi[i - 1] * w[t - i];
        const std::size_t r = t - p;
        const std::size_t qmax = std::min(q, r);
        for (std::size_t j = 1; j <= qmax; ++j) v -= theta[j - 1] * e[r - j];
        e[r] = v;
    }
}

std::vector<double> adjusted_target(std::span<const double> z, const Eigen::MatrixXd& X, const ArimaParams& params) {
    if (static_cast<std::size_t>(X.cols()) != params.beta.size() ||
        (X.cols() > 0 && static_cast<std::size_t>(X.rows()) != z.size())) {
        throw Error(ErrorCode::InvalidArgument, "regressor matrix does not match beta / target length");
    }
    std::vector<double> w(z.begin(), z.end());
    for (std::size_t t = 0; t < w.size(); ++t) {
        double v = w[t] - params.constant;
        for (std::size_t b = 0; b < params.beta.size(); ++b) {
            v -= params.beta[b] * X(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(b));
        }
        w[t] = v;
    }
    return w;
}

double integrate_step(double dz, std::span<const double> previous_levels, int d) {
    // previous_levels holds at least d values, the most recent last.
    double level = dz;
    double binom = 1.0;
    const std::size_t m = previous_levels.size();
    for (int j = 1; j <= d; ++j) {
        binom = binom * static_cast<double>(d - j + 1) / static_cast<double>(j);
        const double sign = (j % 2 == 1) ? 1.0 : -1.0;
        level += sign * binom * previous_levels[m - static_cast<std::size_t>(j)];
    }
    return level;
}

Design slice_design(const Design& design, std::size_t offset) {
    if (offset == 0) return design;
    const auto n = static_cast<std::size_t>(design.z.size());
    if (offset >= n) {
        throw Error(ErrorCode::TooFewObservations, "sample offset leaves no observations");
    }
    const auto rows = static_cast<Eigen::Index>(n - offset);
    const auto off = static_cast<Eigen::Index>(offset);
    return Design{std::vector<Date>(design.dates.begin() + off, design.dates.end()), design.z.tail(rows),
                  design.X.bottomRows(rows), design.levels.slice(offset, design.levels.size() - offset)};
}

} // namespace detail

Design build_design(const DailySeries& y, const SignalSet& exog, const ArimaxSpec& spec) {
    validate(spec);
    const int d = spec.base.d;
    std::vector<DailySeries> parts{y};
    for (const auto& term : spec.exog) {
        const auto* s = exog.find(term.name);
        if (!s) {
            throw Error(ErrorCode::ExogMissing, "exogenous series '" + term.name + "' not supplied");
        }
        parts.push_back(lag(*s, term.lag));
    }
    const auto joined = inner_join(parts);
    const auto& levels = joined.series()[0];
    if (levels.size() <= static_cast<std::size_t>(d)) {
        throw Error(ErrorCode::TooFewObservations, "series too short for differencing order");
    }
    const auto z = difference(levels, d);
    Design out{z.dates(), Eigen::VectorXd(static_cast<Eigen::Index>(z.size())),
               Eigen::MatrixXd(static_cast<Eigen::Index>(z.size()), static_cast<Eigen::Index>(spec.exog.size())),
               levels};
    for (std::size_t t = 0; t < z.size(); ++t) out.z(static_cast<Eigen::Index>(t)) = z[t];
    for (std::size_t b = 0; b < spec.exog.size(); ++b) {
        const auto& x = joined.series()[b + 1];
        const auto col = spec.exog[b].difference_like_target ? difference(x, d) : x.slice(static_cast<std::size_t>(d), x.size() - static_cast<std::size_t>(d));
        for (std::size_t t = 0; t < col.size(); ++t) {
            out.X(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(b)) = col[t];
        }
    }
    return out;
}

std::vector<double> css_residuals(std::span<const double> z, const Eigen::MatrixXd& X, const ArimaParams& params) {
    const auto w = detail::adjusted_target(z, X, params);
    if (w.size() <= params.phi.size()) {
        throw Error(ErrorCode::TooFewObservations, "series shorter than the AR order");
    }
    std::vector<double> e(w.size() - params.phi.size());
    detail::arma_filter(w, params.phi, params.theta, e);
    return e;
}

double loglikelihood(std::span<const double> z, const Eigen::MatrixXd& X, const ArimaParams& params) {
    if (!is_stationary(params.phi) || !is_invertible(params.theta)) {
        throw Error(ErrorCode::NonStationaryParams, "parameters violate stationarity or invertibility");
    }
    const auto e = css_residuals(z, X, params);
    double sse = 0.0;
    for (double v : e) sse += v * v;
    const double n = static_cast<double>(e.size());
    return -0.5 * n * (std::log(2.0 * M_PI) + std::log(sse / n)) - 0.5 * n;
}

DailySeries simulate(const ArimaxSpec& spec, const ArimaParams& params, const SignalSet& exog, std::size_t n,
                     std::uint64_t seed, const SimulationOptions& options) {
    validate(spec);
    validate(params, spec);
    if (n == 0) {
        throw Error(ErrorCode::InvalidArgument, "simulation length must be positive");
    }
    const int d = spec.base.d;
    CalendarPtr calendar = options.calendar ? options.calendar : default_calendar();

    std::vector<Date> dates;
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.exog.size()));
    if (!spec.exog.empty()) {
        // Use the exogenous design on its own grid; the target placeholder is the first regressor.
        std::vector<DailySeries> parts;
        for (const auto& term : spec.exog) {
            const auto* s = exog.find(term.name);
            if (!s) throw Error(ErrorCode::ExogMissing, "exogenous series '" + term.name + "' not supplied");
            parts.push_back(lag(*s, term.lag));
        }
        const auto joined = inner_join(parts);
        calendar = joined.series()[0].calendar_ptr();
        for (std::size_t b = 0; b < spec.exog.size(); ++b) {
            const auto& x = joined.series()[b];
            const auto col = spec.exog[b].difference_like_target ? difference(x, d)
                                                                 : x.slice(static_cast<std::size_t>(d), x.size() - static_cast<std::size_t>(d));
            if (col.size() < n) {
                throw Error(ErrorCode::TooFewObservations, "exogenous data shorter than the requested simulation");
            }
            if (b == 0) dates.assign(col.dates().begin(), col.dates().begin() + static_cast<std::ptrdiff_t>(n));
            for (std::size_t t = 0; t < n; ++t) X(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(b)) = col[t];
        }
    }
    Date start = options.start;
    if (dates.empty()) {
        if (!calendar->is_business_day(start)) start = calendar->next(start);
    } else {
        start = dates.front();
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> shock(0.0, std::sqrt(params.sigma2));
    const std::size_t total = options.burn_in + n;
    const std::size_t p = params.phi.size();
    const std::size_t q = params.theta.size();
    std::vector<double> u(total, 0.0), e(total, 0.0);
    for (std::size_t t = 0; t < total; ++t) {
        e[t] = shock(rng);
        double v = e[t];
        for (std::size_t i = 1; i <= p && i <= t; ++i) v += params.phi[i - 1] * u[t - i];
        for (std::size_t j = 1; j <= q && j <= t; ++j) v += params.theta[j - 1] * e[t - j];
        u[t] = v;
    }
    std::vector<double> levels;
    levels.reserve(n + static_cast<std::size_t>(d));
    levels.assign(static_cast<std::size_t>(d), 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        double z = params.constant + u[options.burn_in + t];
        for (std::size_t b = 0; b < params.beta.size(); ++b) {
            z += params.beta[b] * X(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(b));
        }
        levels.push_back(d == 0 ? z : detail::integrate_step(z, levels, d));
    }
    levels.erase(levels.begin(), levels.begin() + d);
    return DailySeries(options.name, calendar, start, std::move(levels), "simulated");
}

std::vector<double> acf(std::span<const double> x, int max_lag) {
    const std::size_t n = x.size();
    std::vector<double> out(static_cast<std::size_t>(std::max(max_lag, 0)), 0.0);
    if (n == 0) return out;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double c0 = 0.0;
    for (double v : x) c0 += (v - mean) * (v - mean);
    if (c0 == 0.0) return out;
    for (int k = 1; k <= max_lag; ++k) {
        double c = 0.0;
        for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t) c += (x[t] - mean) * (x[t - static_cast<std::size_t>(k)] - mean);
        out[static_cast<std::size_t>(k - 1)] = c / c0;
    }
    return out;
}

std::vector<double> pacf(std::span<const double> x, int max_lag) {
    const auto rho = acf(x, max_lag);
    std::vector<double> out(rho.size(), 0.0);
    std::vector<double> phi, next;
    for (std::size_t k = 0; k < rho.size(); ++k) {
        double num = rho[k];
        double den = 1.0;
        for (std::size_t j = 0; j < k; ++j) {
            num -= phi[j] * rho[k - 1 - j];
            den -= phi[j] * rho[j];
        }
        const double r = den != 0.0 ? num / den : 0.0;
        next.assign(phi.begin(), phi.end());
        for (std::size_t j = 0; j < k; ++j) next[j] = phi[j] - r * phi[k - 1 - j];
        next.push_back(r);
        phi.swap(next);
        out[k] = r;
    }
    return out;
}

} // namespace crudecast::arima
