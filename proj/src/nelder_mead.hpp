#ifndef CRUDECAST_SRC_NELDER_MEAD_HPP
#define CRUDECAST_SRC_NELDER_MEAD_HPP

#include <functional>
#include <span>
#include <vector>

namespace crudecast::detail {

struct NelderMeadOptions {
    double initial_step = 0.1;
    int max_iterations = 2000;
    /// A restart from the best vertex that improves less than this ends the search.
    double tolerance = 1e-9;
    int max_restarts = 10;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Minimises f; non-finite values are treated as +inf.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
                             const NelderMeadOptions& options = {});

} // namespace crudecast::detail

#endif
