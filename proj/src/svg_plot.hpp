#ifndef CRUDECAST_SRC_SVG_PLOT_HPP
#define CRUDECAST_SRC_SVG_PLOT_HPP

#include <crudecast/series.hpp>

#include <ostream>
#include <string>

namespace crudecast::detail {

/// Static line chart of two aligned series (actual solid, predicted dashed).
/// Output depends only on the inputs.
void write_line_chart(std::ostream& out, const DailySeries& actual, const DailySeries& predicted,
                      const std::string& title);

} // namespace crudecast::detail

#endif
