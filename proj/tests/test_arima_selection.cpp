// Monte Carlo checks of AIC order selection. Parameter recovery is covered by
// the acceptance binary.
#include "support.hpp"

#include <crudecast/arima.hpp>

#include <doctest.h>


using namespace crudecast;
using namespace crudecast::arima;

namespace {

ArimaParams make_params(std::vector<double> phi, std::vector<double> theta) {
    ArimaParams p;
    p.phi = std::move(phi);
    p.theta = std::move(theta);
    return p;
}

} // namespace

TEST_CASE("order selection finds AR(2)") {
    int hits = 0;
    for (int s = 0; s < 100; ++s) {
        const auto y = simulate({{2, 0, 0, true}, {}}, make_params({0.5, -0.3}, {}), {}, 1000, 500 + static_cast<std::uint64_t>(s));
        const auto sel = select_order(y, 2, 2, 0);
        hits += sel.best.p == 2 && sel.best.q <= 1;
    }
    MESSAGE("AR(2) selected in " << hits << " of 100");
    CHECK(hits >= 80);
}

// CSS lets ARMA(2,2) place cancelling AR/MA roots at the unit circle and fit
// the largest periodogram peak; this check currently fails for that reason.
TEST_CASE("order selection keeps white noise at (0,0,0)") {
    int hits = 0;
    for (int s = 0; s < 100; ++s) {
        const auto y = testsupport::make_series(testsupport::gaussian_noise(1000, 900 + static_cast<std::uint64_t>(s)),
                                                testsupport::ymd(2000, 1, 3));
        const auto sel = select_order(y, 2, 2, 0);
        hits += sel.best.p == 0 && sel.best.q == 0 && sel.best.include_constant;
    }
    MESSAGE("white noise kept in " << hits << " of 100");
    CHECK(hits >= 80);
}
