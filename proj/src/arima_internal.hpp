#ifndef CRUDECAST_SRC_ARIMA_INTERNAL_HPP
#define CRUDECAST_SRC_ARIMA_INTERNAL_HPP

#include <crudecast/arima.hpp>

#include <span>
#include <vector>

namespace crudecast::arima::detail {

// e_t = w_t - sum phi_i w_{t-i} - sum theta_j e_{t-j} for t = p..n-1, with
// residuals before t = p taken as zero. `e` must hold n - p values.
void arma_filter(std::span<const double> w, std::span<const double> phi, std::span<const double> theta,
                 std::span<double> e);

/// w = z - c - X beta
std::vector<double> adjusted_target(std::span<const double> z, const Eigen::MatrixXd& X, const ArimaParams& params);

/// Binomial-weighted integration: level_t = dz + sum_{j=1..d} (-1)^{j+1} C(d,j) level_{t-j}.
double integrate_step(double dz, std::span<const double> previous_levels, int d);

/// Design restricted to rows [offset, end).
Design slice_design(const Design& design, std::size_t offset);

} // namespace crudecast::arima::detail

#endif
