#include "svg_plot.hpp"

#include <crudecast/error.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace crudecast::detail {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

void write_line_chart(std::ostream& out, const DailySeries& actual, const DailySeries& predicted,
                      const std::string& title) {
    if (actual.size() != predicted.size() || actual.start_date() != predicted.start_date()) {
        throw Error(ErrorCode::LengthMismatch, "chart series are not aligned");
    }
    const std::size_t n = actual.size();
    double lo = actual[0];
    double hi = actual[0];
    for (std::size_t i = 0; i < n; ++i) {
        lo = std::min({lo, actual[i], predicted[i]});
        hi = std::max({hi, actual[i], predicted[i]});
    }
    if (hi - lo < 1e-9) {
        hi += 0.5;
        lo -= 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto x_at = [&](std::size_t i) { return kLeft + (n == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n - 1)) * plot_w; };
    auto y_at = [&](double v) { return kTop + (hi - v) / (hi - lo) * plot_h; };
    auto polyline = [&](const DailySeries& s) {
        std::string pts;
        for (std::size_t i = 0; i < n; ++i) {
            if (i) pts += ' ';
            pts += fmt::format("{:.2f},{:.2f}", x_at(i), y_at(s[i]));
        }
        return pts;
    };

    out << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{:.0f}" height="{:.0f}" viewBox="0 0 {:.0f} {:.0f}">)",
                       kWidth, kHeight, kWidth, kHeight)
        << '\n';
    out << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n';
    out << fmt::format(R"(<text x="{:.0f}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>)",
                       kWidth / 2, escape(title))
        << '\n';
    out << fmt::format(R"(<rect x="{:.0f}" y="{:.0f}" width="{:.0f}" height="{:.0f}" fill="none" stroke="#444"/>)", kLeft,
                       kTop, plot_w, plot_h)
        << '\n';
    for (int k = 0; k <= 4; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        const double y = y_at(v);
        out << fmt::format(R"(<line x1="{:.0f}" y1="{:.2f}" x2="{:.0f}" y2="{:.2f}" stroke="#ddd"/>)", kLeft, y,
                           kLeft + plot_w, y)
            << '\n';
        out << fmt::format(R"(<text x="{:.0f}" y="{:.2f}" font-family="sans-serif" font-size="11" text-anchor="end">{:.2f}</text>)",
                           kLeft - 6, y + 4, v)
            << '\n';
    }
    const std::size_t ticks = std::min<std::size_t>(n, 6);
    for (std::size_t k = 0; k < ticks; ++k) {
        const std::size_t i = ticks == 1 ? 0 : k * (n - 1) / (ticks - 1);
        out << fmt::format(R"(<text x="{:.2f}" y="{:.0f}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>)",
                           x_at(i), kTop + plot_h + 18, format_date(actual.date(i)))
            << '\n';
    }
    out << fmt::format(R"(<polyline fill="none" stroke="#1f4e9c" stroke-width="2" points="{}"/>)", polyline(actual))
        << '\n';
    out << fmt::format(R"(<polyline fill="none" stroke="#c0392b" stroke-width="2" stroke-dasharray="6 4" points="{}"/>)",
                       polyline(predicted))
        << '\n';
    const double ly = kHeight - 18;
    out << fmt::format(R"(<line x1="{:.0f}" y1="{:.0f}" x2="{:.0f}" y2="{:.0f}" stroke="#1f4e9c" stroke-width="2"/>)", kLeft,
                       ly, kLeft + 30, ly)
        << '\n';
    out << fmt::format(R"(<text x="{:.0f}" y="{:.0f}" font-family="sans-serif" font-size="12">{}</text>)", kLeft + 36, ly + 4,
                       escape(actual.name()))
        << '\n';
    out << fmt::format(
               R"(<line x1="{:.0f}" y1="{:.0f}" x2="{:.0f}" y2="{:.0f}" stroke="#c0392b" stroke-width="2" stroke-dasharray="6 4"/>)",
               kLeft + 220, ly, kLeft + 250, ly)
        << '\n';
    out << fmt::format(R"(<text x="{:.0f}" y="{:.0f}" font-family="sans-serif" font-size="12">{}</text>)", kLeft + 256,
                       ly + 4, escape(predicted.name()))
        << '\n';
    out << "</svg>\n";
}

} // namespace crudecast::detail
