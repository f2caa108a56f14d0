#ifndef CRUDECAST_SRC_OLS_HPP
#define CRUDECAST_SRC_OLS_HPP

#include <Eigen/Dense>

namespace crudecast::detail {

struct OlsFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd residuals;
    double ssr = 0.0;
    /// (X'X)^{-1}; scale by a variance estimate to get the coefficient covariance.
    Eigen::MatrixXd xtx_inv;
    Eigen::Index n = 0;
    Eigen::Index k = 0;
};

/// Least squares via column-pivoted QR. Throws Error(SingularRegression) on rank deficiency.
OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

} // namespace crudecast::detail

#endif
