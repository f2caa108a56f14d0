#include "nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace crudecast::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe(double v) { return std::isfinite(v) ? v : kInf; }

struct Pass {
    std::vector<double> x;
    double value;
    int iterations;
    bool converged;
};

// One simplex descent from x0. Stops when the vertex values agree to near
// machine precision or the simplex has collapsed.
Pass descend(const std::function<double(std::span<const double>)>& f, const std::vector<double>& x0, double step,
             int budget) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
    for (std::size_t i = 0; i <= n; ++i) fv[i] = safe(f(simplex[i]));

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    int it = 0;
    bool converged = false;
    while (it < budget) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        const double spread = fv[worst] - fv[best];
        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[best][j]));
            }
        }
        if ((std::isfinite(spread) && spread <= 1e-13 * std::max(1.0, std::abs(fv[best]))) || diameter < 1e-11) {
            converged = true;
            break;
        }
        ++it;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        }
        for (auto& c : centroid) c /= static_cast<double>(n);

        for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + (centroid[j] - simplex[worst][j]);
        const double fr = safe(f(xr));
        if (fr < fv[best]) {
            for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + 2.0 * (xr[j] - centroid[j]);
            const double fe = safe(f(xe));
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        const bool outside = fr < fv[worst];
        for (std::size_t j = 0; j < n; ++j) {
            xc[j] = outside ? centroid[j] + 0.5 * (xr[j] - centroid[j])
                            : centroid[j] + 0.5 * (simplex[worst][j] - centroid[j]);
        }
        const double fc = safe(f(xc));
        if (fc < (outside ? fr : fv[worst])) {
            simplex[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) {
                simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
            }
            fv[i] = safe(f(simplex[i]));
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    return {simplex[best], fv[best], it, converged};
}

} // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
                             const NelderMeadOptions& options) {
    NelderMeadResult res;
    if (x0.empty()) {
        res.value = safe(f(x0));
        res.converged = true;
        return res;
    }
    res.x = std::move(x0);
    res.value = safe(f(res.x));
    double step = options.initial_step;
    for (int restart = 0; restart <= options.max_restarts; ++restart) {
        const int budget = options.max_iterations - res.iterations;
        if (budget <= 0) {
            res.converged = false;
            return res;
        }
        auto pass = descend(f, res.x, step, budget);
        res.iterations += pass.iterations;
        const double improvement = res.value - pass.value;
        if (pass.value <= res.value) {
            res.x = std::move(pass.x);
            res.value = pass.value;
        }
        if (!pass.converged) {
            res.converged = false;
            return res;
        }
        if (restart > 0 && !(improvement >= options.tolerance)) {
            res.converged = true;
            return res;
        }
        step = std::max(step * 0.5, 1e-3);
    }
    res.converged = true;
    return res;
}

} // namespace crudecast::detail
