#ifndef ALSPIA_SVG_HPP_
#define ALSPIA_SVG_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "alspia/solver.hpp"

namespace alspia::svg {

enum class XAxis { Time, Iteration };

struct Series {
    std::string label;
    std::vector<HistoryEntry> history;
};

struct PlotOptions {
    XAxis x_axis = XAxis::Time;
    std::string title;
};

namespace detail {

inline std::string fmt(double v, const char* spec = "%.2f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return colors[i % 8];
}

}  // namespace detail

/// Convergence plot: one polyline per series, log-scale error axis,
/// deterministic byte output for identical inputs. Entries with
/// non-positive error (a run converged with exactly zero residual) are
/// dropped from the polyline.
inline std::string render_convergence(const std::vector<Series>& series,
                                      const PlotOptions& opt = {}) {
    if (series.empty()) throw std::invalid_argument("render_convergence: no series");

    double xmax = 0.0;
    double ly_min = 0.0, ly_max = -300.0;
    std::size_t usable_points = 0;
    for (const auto& s : series) {
        if (s.history.empty()) throw std::invalid_argument("render_convergence: empty history");
        for (const auto& h : s.history) {
            const double x = opt.x_axis == XAxis::Time ? h.seconds : static_cast<double>(h.iteration);
            xmax = std::max(xmax, x);
            if (h.error > 0.0) {
                const double ly = std::log10(h.error);
                ly_min = std::min(ly_min, ly);
                ly_max = std::max(ly_max, ly);
                ++usable_points;
            }
        }
    }
    if (usable_points == 0)
        throw std::invalid_argument("render_convergence: no positive error values");
    if (xmax <= 0.0) xmax = 1.0;
    double yfloor = std::floor(ly_min);
    double yceil = std::ceil(ly_max);
    if (yceil <= yfloor) yceil = yfloor + 1.0;

    const double width = 720, height = 480;
    const double left = 80, right = 24, top = 46, bottom = 58;
    const double pw = width - left - right, ph = height - top - bottom;
    auto sx = [&](double x) { return left + pw * (x / xmax); };
    auto sy = [&](double ly) { return top + ph * (yceil - ly) / (yceil - yfloor); };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
           "viewBox=\"0 0 720 480\">\n";
    out += "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
    if (!opt.title.empty())
        out += "<text x=\"360\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"16\">" + opt.title + "</text>\n";

    // Axes.
    out += "<line x1=\"" + detail::fmt(left) + "\" y1=\"" + detail::fmt(top) + "\" x2=\"" +
           detail::fmt(left) + "\" y2=\"" + detail::fmt(top + ph) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + detail::fmt(left) + "\" y1=\"" + detail::fmt(top + ph) + "\" x2=\"" +
           detail::fmt(left + pw) + "\" y2=\"" + detail::fmt(top + ph) + "\" stroke=\"black\"/>\n";

    // Decade ticks on the error axis.
    const int decades = static_cast<int>(yceil - yfloor);
    const int step = std::max(1, (decades + 7) / 8);
    for (int d = 0; d <= decades; d += step) {
        const double ly = yfloor + d;
        const double y = sy(ly);
        out += "<line x1=\"" + detail::fmt(left - 5) + "\" y1=\"" + detail::fmt(y) + "\" x2=\"" +
               detail::fmt(left) + "\" y2=\"" + detail::fmt(y) + "\" stroke=\"black\"/>\n";
        char lbl[32];
        std::snprintf(lbl, sizeof(lbl), "1e%+03d", static_cast<int>(ly));
        out += "<text x=\"" + detail::fmt(left - 8) + "\" y=\"" + detail::fmt(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + lbl +
               "</text>\n";
    }
    // Five divisions on the x axis.
    for (int t = 0; t <= 5; ++t) {
        const double x = sx(xmax * t / 5.0);
        out += "<line x1=\"" + detail::fmt(x) + "\" y1=\"" + detail::fmt(top + ph) + "\" x2=\"" +
               detail::fmt(x) + "\" y2=\"" + detail::fmt(top + ph + 5) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + detail::fmt(x) + "\" y=\"" + detail::fmt(top + ph + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               detail::fmt(xmax * t / 5.0, "%.3g") + "</text>\n";
    }

    out += "<text x=\"" + detail::fmt(left + pw / 2) + "\" y=\"" + detail::fmt(height - 12) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
           (opt.x_axis == XAxis::Time ? "seconds" : "iteration") + "</text>\n";
    out += "<text x=\"18\" y=\"" + detail::fmt(top + ph / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 18 " + detail::fmt(top + ph / 2) + ")\">relative fitting error</text>\n";

    // Data polylines.
    for (std::size_t si = 0; si < series.size(); ++si) {
        std::string pts;
        for (const auto& h : series[si].history) {
            if (h.error <= 0.0) continue;
            const double x = opt.x_axis == XAxis::Time ? h.seconds : static_cast<double>(h.iteration);
            pts += detail::fmt(sx(x)) + "," + detail::fmt(sy(std::log10(h.error))) + " ";
        }
        if (!pts.empty()) pts.pop_back();
        out += "<polyline fill=\"none\" stroke=\"";
        out += detail::palette(si);
        out += "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    }

    // Legend.
    for (std::size_t si = 0; si < series.size(); ++si) {
        const double y = top + 14 + 18 * static_cast<double>(si);
        out += "<line x1=\"" + detail::fmt(left + pw - 150) + "\" y1=\"" + detail::fmt(y) +
               "\" x2=\"" + detail::fmt(left + pw - 126) + "\" y2=\"" + detail::fmt(y) +
               "\" stroke=\"";
        out += detail::palette(si);
        out += "\" stroke-width=\"1.5\"/>\n";
        out += "<text x=\"" + detail::fmt(left + pw - 120) + "\" y=\"" + detail::fmt(y + 4) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + series[si].label + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace alspia::svg

#endif  // ALSPIA_SVG_HPP_
