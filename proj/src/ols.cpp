#include "ols.hpp"

#include <crudecast/error.hpp>

namespace crudecast::detail {

OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() != y.size() || X.rows() <= X.cols()) {
        throw Error(ErrorCode::SeriesTooShort, "regression needs more rows than columns");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    // Relative threshold scaled to the data so near-collinear designs are caught.
    qr.setThreshold(1e-10);
    if (qr.rank() < X.cols()) {
        throw Error(ErrorCode::SingularRegression, "design matrix is rank deficient");
    }
    OlsFit fit;
    fit.coef = qr.solve(y);
    fit.residuals = y - X * fit.coef;
    fit.ssr = fit.residuals.squaredNorm();
    fit.n = X.rows();
    fit.k = X.cols();
    const Eigen::MatrixXd xtx = X.transpose() * X;
    fit.xtx_inv = xtx.ldlt().solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
    return fit;
}

} // namespace crudecast::detail
