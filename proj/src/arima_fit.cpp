#include "arima_internal.hpp"
#include "nelder_mead.hpp"
#include "parallel.hpp"

#include <crudecast/arima.hpp>
#include <crudecast/error.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace crudecast::arima {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kLog2Pi = 1.8378770664093453;

double css_loglik(double sse, double n) { return -0.5 * n * (kLog2Pi + std::log(sse / n)) - 0.5 * n; }

int parameter_count(const ArimaxSpec& spec) {
    return spec.base.p + spec.base.q + (spec.base.include_constant ? 1 : 0) + static_cast<int>(spec.exog.size()) + 1;
}

// For fixed (phi, theta) the CSS residuals are linear in (constant, beta):
// e = F(z) - F(1) c - F(X) beta, so those are solved by least squares.
class ConcentratedCss {
public:
    ConcentratedCss(const Design& design, const ArimaxSpec& spec)
        : z_(design.z), p_(static_cast<std::size_t>(spec.base.p)), q_(static_cast<std::size_t>(spec.base.q)) {
        const Index n = design.z.size();
        const Index extra = (spec.base.include_constant ? 1 : 0) + design.X.cols();
        columns_.resize(n, 1 + extra);
        columns_.col(0) = design.z;
        Index c = 1;
        if (spec.base.include_constant) columns_.col(c++).setOnes();
        for (Index b = 0; b < design.X.cols(); ++b) columns_.col(c++) = design.X.col(b);
        const auto rows = static_cast<Index>(static_cast<std::size_t>(n) - p_);
        filtered_.resize(rows, columns_.cols());
    }

    std::size_t n_effective() const { return static_cast<std::size_t>(filtered_.rows()); }

    void coefficients_from(std::span<const double> u, std::vector<double>& phi, std::vector<double>& theta) const {
        std::vector<double> r(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) r[i] = std::tanh(u[i]);
        phi = pacf_to_coefficients(std::span<const double>(r).first(p_));
        theta = pacf_to_coefficients(std::span<const double>(r).subspan(p_, q_));
        for (auto& t : theta) t = -t;
    }

    struct Solution {
        double sse = 0.0;
        VectorXd regression; ///< constant (if any) then beta
        VectorXd regression_se;
    };

    Solution solve(std::span<const double> phi, std::span<const double> theta, bool with_se = false) {
        const Index rows = filtered_.rows();
        for (Index c = 0; c < columns_.cols(); ++c) {
            std::span<const double> w(columns_.col(c).data(), static_cast<std::size_t>(columns_.rows()));
            std::span<double> e(filtered_.col(c).data(), static_cast<std::size_t>(rows));
            detail::arma_filter(w, phi, theta, e);
        }
        Solution s;
        const Index m = filtered_.cols() - 1;
        if (m == 0) {
            s.sse = filtered_.col(0).squaredNorm();
            return s;
        }
        const auto R = filtered_.rightCols(m);
        Eigen::ColPivHouseholderQR<MatrixXd> qr(R);
        s.regression = qr.solve(filtered_.col(0));
        s.sse = (filtered_.col(0) - R * s.regression).squaredNorm();
        if (with_se) {
            const MatrixXd inv = (R.transpose() * R).ldlt().solve(MatrixXd::Identity(m, m));
            const double s2 = s.sse / static_cast<double>(rows);
            s.regression_se = (inv.diagonal() * s2).cwiseSqrt();
        }
        return s;
    }

    double objective(std::span<const double> u) {
        coefficients_from(u, phi_buf_, theta_buf_);
        const auto s = solve(phi_buf_, theta_buf_);
        const double n = static_cast<double>(n_effective());
        if (!(s.sse > 0.0) || !std::isfinite(s.sse)) return std::numeric_limits<double>::infinity();
        return -css_loglik(s.sse, n);
    }

private:
    VectorXd z_;
    std::size_t p_;
    std::size_t q_;
    MatrixXd columns_;
    MatrixXd filtered_;
    std::vector<double> phi_buf_, theta_buf_;
};

// Full (unconcentrated) CSS log-likelihood in natural coordinates, without
// the stationarity check, for finite differencing.
double raw_loglik(const Design& design, const ArimaxSpec& spec, std::span<const double> theta_full) {
    ArimaParams params;
    std::size_t i = 0;
    params.phi.assign(theta_full.begin(), theta_full.begin() + spec.base.p);
    i += static_cast<std::size_t>(spec.base.p);
    params.theta.assign(theta_full.begin() + static_cast<std::ptrdiff_t>(i), theta_full.begin() + static_cast<std::ptrdiff_t>(i) + spec.base.q);
    i += static_cast<std::size_t>(spec.base.q);
    if (spec.base.include_constant) params.constant = theta_full[i++];
    params.beta.assign(theta_full.begin() + static_cast<std::ptrdiff_t>(i), theta_full.end());
    std::span<const double> z(design.z.data(), static_cast<std::size_t>(design.z.size()));
    const auto e = css_residuals(z, design.X, params);
    double sse = 0.0;
    for (double v : e) sse += v * v;
    return css_loglik(sse, static_cast<double>(e.size()));
}

std::vector<double> pack(const ArimaParams& params, const ArimaxSpec& spec) {
    std::vector<double> v(params.phi);
    v.insert(v.end(), params.theta.begin(), params.theta.end());
    if (spec.base.include_constant) v.push_back(params.constant);
    v.insert(v.end(), params.beta.begin(), params.beta.end());
    return v;
}

std::vector<double> hessian_standard_errors(const Design& design, const ArimaxSpec& spec, const ArimaParams& params,
                                            std::span<const double> regression_se) {
    const auto x0 = pack(params, spec);
    const std::size_t m = x0.size();
    std::vector<double> se(m, std::nan(""));
    if (m == 0) return se;
    const std::size_t arma = static_cast<std::size_t>(spec.base.p + spec.base.q);
    std::vector<double> h(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (i < arma) {
            h[i] = 1e-4;
        } else {
            const double s = regression_se.size() > i - arma ? regression_se[i - arma] : 0.0;
            h[i] = (std::isfinite(s) && s > 0.0) ? 1e-3 * s : 1e-4 * std::max(1.0, std::abs(x0[i]));
        }
    }
    auto f = [&](const std::vector<double>& x) { return raw_loglik(design, spec, x); };
    const double f0 = f(x0);
    MatrixXd H(static_cast<Index>(m), static_cast<Index>(m));
    std::vector<double> x = x0;
    for (std::size_t i = 0; i < m; ++i) {
        x[i] = x0[i] + h[i];
        const double fp = f(x);
        x[i] = x0[i] - h[i];
        const double fm = f(x);
        x[i] = x0[i];
        H(static_cast<Index>(i), static_cast<Index>(i)) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for (std::size_t j = 0; j < i; ++j) {
            double acc = 0.0;
            for (int si : {1, -1}) {
                for (int sj : {1, -1}) {
                    x[i] = x0[i] + si * h[i];
                    x[j] = x0[j] + sj * h[j];
                    acc += si * sj * f(x);
                }
            }
            x[i] = x0[i];
            x[j] = x0[j];
            const double v = acc / (4.0 * h[i] * h[j]);
            H(static_cast<Index>(i), static_cast<Index>(j)) = v;
            H(static_cast<Index>(j), static_cast<Index>(i)) = v;
        }
    }
    const MatrixXd info = -H;
    if (!info.allFinite()) return se;
    const MatrixXd cov = info.fullPivLu().inverse();
    for (std::size_t i = 0; i < m; ++i) {
        const double v = cov(static_cast<Index>(i), static_cast<Index>(i));
        if (std::isfinite(v) && v > 0.0) se[i] = std::sqrt(v);
    }
    return se;
}

FitResult assemble(const DailySeries& y, const SignalSet& exog, const ArimaxSpec& spec, const Design& design,
                   std::size_t offset, ArimaParams params) {
    FitResult out{spec,  std::move(params), {}, 0.0, 0.0, 0.0, parameter_count(spec), 0,
                  y,     false,             0,  y, exog};
    std::span<const double> z(design.z.data(), static_cast<std::size_t>(design.z.size()));
    const auto e = css_residuals(z, design.X, out.params);
    double sse = 0.0;
    for (double v : e) sse += v * v;
    const double n = static_cast<double>(e.size());
    out.n_effective = e.size();
    out.params.sigma2 = sse / n;
    out.loglik = css_loglik(sse, n);
    out.aic = 2.0 * out.k - 2.0 * out.loglik;
    out.bic = out.k * std::log(n) - 2.0 * out.loglik;
    const std::size_t p = static_cast<std::size_t>(spec.base.p);
    out.residuals = DailySeries(y.name() + "_residuals", y.calendar_ptr(), design.dates[p], e, "css residuals");
    out.sample_offset = offset;
    return out;
}

} // namespace

FitResult fit(const DailySeries& y, const SignalSet& exog, const ArimaxSpec& spec, const FitOptions& options) {
    const Design design = detail::slice_design(build_design(y, exog, spec), options.skip_leading);
    const std::size_t p = static_cast<std::size_t>(spec.base.p);
    const std::size_t dims = p + static_cast<std::size_t>(spec.base.q);
    const int k = parameter_count(spec);
    const auto n_total = static_cast<std::size_t>(design.z.size());
    if (n_total <= p || n_total - p < static_cast<std::size_t>(10 * k)) {
        throw Error(ErrorCode::TooFewObservations,
                    "need at least " + std::to_string(10 * k) + " effective observations for " +
                        describe(spec.base, !spec.exog.empty()));
    }

    ConcentratedCss css(design, spec);
    crudecast::detail::NelderMeadOptions nm;
    nm.max_iterations = options.max_iterations;
    nm.tolerance = options.tolerance;
    auto objective = [&css](std::span<const double> u) { return css.objective(u); };

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> jitter(0.0, 0.5);
    crudecast::detail::NelderMeadResult best;
    best.value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    const int starts = dims == 0 ? 1 : std::max(1, options.starts);
    for (int s = 0; s < starts; ++s) {
        std::vector<double> u0(dims, 0.0);
        if (s > 0) {
            for (auto& v : u0) v = jitter(rng);
        }
        auto res = crudecast::detail::nelder_mead(objective, u0, nm);
        iterations += res.iterations;
        if (res.value < best.value || best.x.size() != dims) best = std::move(res);
    }

    ArimaParams params;
    css.coefficients_from(best.x, params.phi, params.theta);
    const auto sol = css.solve(params.phi, params.theta, true);
    Eigen::Index c = 0;
    if (spec.base.include_constant) params.constant = sol.regression(c++);
    for (std::size_t b = 0; b < spec.exog.size(); ++b) params.beta.push_back(sol.regression(c++));

    auto out = assemble(y, exog, spec, design, options.skip_leading, std::move(params));
    out.converged = best.converged && std::isfinite(best.value);
    out.iterations = iterations;
    std::vector<double> reg_se(sol.regression_se.data(), sol.regression_se.data() + sol.regression_se.size());
    out.standard_errors = hessian_standard_errors(design, spec, out.params, reg_se);
    return out;
}

FitResult evaluate(const DailySeries& y, const SignalSet& exog, const ArimaxSpec& spec, const ArimaParams& params) {
    validate(params, spec);
    const Design design = build_design(y, exog, spec);
    if (static_cast<std::size_t>(design.z.size()) <= params.phi.size()) {
        throw Error(ErrorCode::TooFewObservations, "series shorter than the AR order");
    }
    auto out = assemble(y, exog, spec, design, 0, params);
    out.converged = true;
    out.standard_errors.assign(pack(out.params, spec).size(), std::nan(""));
    return out;
}

OrderSelection select_order(const DailySeries& y, int p_max, int q_max, int d, const FitOptions& options) {
    if (p_max < 0 || q_max < 0 || d < 0 || p_max > kMaxOrder || q_max > kMaxOrder || d > kMaxOrder) {
        throw Error(ErrorCode::InvalidArgument, "order grid must lie within 0.." + std::to_string(kMaxOrder));
    }
    std::vector<ArimaSpec> grid;
    for (int p = 0; p <= p_max; ++p) {
        for (int q = 0; q <= q_max; ++q) {
            grid.push_back({p, d, q, d == 0});
        }
    }
    OrderSelection sel;
    sel.candidates.resize(grid.size());
    crudecast::detail::parallel_for(grid.size(), [&](std::size_t i) {
        auto& cand = sel.candidates[i];
        cand.spec = grid[i];
        try {
            FitOptions opt = options;
            opt.skip_leading = options.skip_leading + static_cast<std::size_t>(p_max - grid[i].p);
            const auto res = fit(y, SignalSet{}, ArimaxSpec{grid[i], {}}, opt);
            cand.aic = res.aic;
            cand.bic = res.bic;
            cand.converged = res.converged;
            if (!res.converged) cand.error = "NonConvergence";
        } catch (const Error& err) {
            cand.error = err.what();
        }
    });

    const OrderCandidate* best = nullptr;
    for (const auto& cand : sel.candidates) {
        if (!cand.error.empty()) {
            sel.skipped_any = true;
            continue;
        }
        if (!best) {
            best = &cand;
            continue;
        }
        const int size_c = cand.spec.p + cand.spec.q;
        const int size_b = best->spec.p + best->spec.q;
        const bool tie = std::abs(cand.aic - best->aic) <= 1e-9 * std::max(1.0, std::abs(best->aic));
        if ((!tie && cand.aic < best->aic) ||
            (tie && (size_c < size_b || (size_c == size_b && cand.spec.q < best->spec.q)))) {
            best = &cand;
        }
    }
    if (!best) {
        throw Error(ErrorCode::NonConvergence, "no order on the grid could be estimated");
    }
    sel.best = best->spec;
    const auto diffed = difference(y, d);
    sel.acf = acf(diffed.values(), 20);
    sel.pacf = pacf(diffed.values(), 20);
    return sel;
}

} // namespace crudecast::arima
