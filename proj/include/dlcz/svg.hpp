#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "dlcz/errors.hpp"

// Minimal deterministic SVG plotting: fixed canvas, fixed formatting, no
// timestamps, so identical inputs produce byte-identical files.
namespace dlcz::plot {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> err_low;  // absolute bounds; empty = no error bars
    std::vector<double> err_high;
    bool line = false;
    bool markers = true;
    std::string color = "#1f77b4";
};

struct Figure {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::string annotation; // emitted as an XML comment, e.g. seed + hash
    std::vector<Series> series;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
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

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

inline void widen(Range& r, double v) {
    if (!std::isfinite(v)) return;
    r.lo = std::min(r.lo, v);
    r.hi = std::max(r.hi, v);
}

inline Range data_range(const Figure& fig, bool vertical) {
    Range r{HUGE_VAL, -HUGE_VAL};
    for (const auto& s : fig.series) {
        const auto& vals = vertical ? s.y : s.x;
        for (double v : vals) widen(r, v);
        if (vertical) {
            for (double v : s.err_low) widen(r, v);
            for (double v : s.err_high) widen(r, v);
        }
    }
    if (!(r.lo <= r.hi)) return {0.0, 1.0};
    if (r.lo == r.hi) {
        const double pad = r.lo == 0.0 ? 1.0 : std::abs(r.lo) * 0.1;
        return {r.lo - pad, r.hi + pad};
    }
    const double pad = (r.hi - r.lo) * 0.05;
    return {r.lo - pad, r.hi + pad};
}

} // namespace detail

inline std::string render_svg(const Figure& fig) {
    constexpr double width = 640.0, height = 480.0;
    constexpr double left = 72.0, right = 616.0, top = 48.0, bottom = 420.0;
    const detail::Range xr = detail::data_range(fig, false);
    const detail::Range yr = detail::data_range(fig, true);
    const auto px = [&](double x) {
        return left + (x - xr.lo) / (xr.hi - xr.lo) * (right - left);
    };
    const auto py = [&](double y) {
        return bottom - (y - yr.lo) / (yr.hi - yr.lo) * (bottom - top);
    };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
           "height=\"480\" viewBox=\"0 0 640 480\">\n";
    if (!fig.annotation.empty())
        out += "<!-- " + detail::xml_escape(fig.annotation) + " -->\n";
    out += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" "
           "fill=\"#ffffff\"/>\n";

    // frame and ticks
    out += "<rect x=\"" + detail::fmt(left) + "\" y=\"" + detail::fmt(top) +
           "\" width=\"" + detail::fmt(right - left) + "\" height=\"" +
           detail::fmt(bottom - top) +
           "\" fill=\"none\" stroke=\"#000000\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
        const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
        const double tx = px(fx), ty = py(fy);
        out += "<line x1=\"" + detail::fmt(tx) + "\" y1=\"" +
               detail::fmt(bottom) + "\" x2=\"" + detail::fmt(tx) +
               "\" y2=\"" + detail::fmt(bottom + 5) +
               "\" stroke=\"#000000\"/>\n";
        out += "<text x=\"" + detail::fmt(tx) + "\" y=\"" +
               detail::fmt(bottom + 18) +
               "\" font-family=\"sans-serif\" font-size=\"11\" "
               "text-anchor=\"middle\">" +
               detail::xml_escape(detail::fmt(fx)) + "</text>\n";
        out += "<line x1=\"" + detail::fmt(left - 5) + "\" y1=\"" +
               detail::fmt(ty) + "\" x2=\"" + detail::fmt(left) +
               "\" y2=\"" + detail::fmt(ty) + "\" stroke=\"#000000\"/>\n";
        out += "<text x=\"" + detail::fmt(left - 8) + "\" y=\"" +
               detail::fmt(ty + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\" "
               "text-anchor=\"end\">" +
               detail::xml_escape(detail::fmt(fy)) + "</text>\n";
    }
    if (!fig.title.empty())
        out += "<text x=\"344\" y=\"28\" font-family=\"sans-serif\" "
               "font-size=\"15\" text-anchor=\"middle\">" +
               detail::xml_escape(fig.title) + "</text>\n";
    if (!fig.x_label.empty())
        out += "<text x=\"344\" y=\"452\" font-family=\"sans-serif\" "
               "font-size=\"12\" text-anchor=\"middle\">" +
               detail::xml_escape(fig.x_label) + "</text>\n";
    if (!fig.y_label.empty())
        out += "<text x=\"18\" y=\"234\" font-family=\"sans-serif\" "
               "font-size=\"12\" text-anchor=\"middle\" "
               "transform=\"rotate(-90 18 234)\">" +
               detail::xml_escape(fig.y_label) + "</text>\n";

    double legend_y = top + 16.0;
    for (const auto& s : fig.series) {
        const size_t n = std::min(s.x.size(), s.y.size());
        if (s.line && n >= 2) {
            std::string pts;
            for (size_t i = 0; i < n; ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                    continue;
                if (!pts.empty()) pts += " ";
                pts += detail::fmt(px(s.x[i])) + "," +
                       detail::fmt(py(s.y[i]));
            }
            out += "<polyline points=\"" + pts +
                   "\" fill=\"none\" stroke=\"" + s.color +
                   "\" stroke-width=\"1.5\"/>\n";
        }
        const bool bars =
            s.err_low.size() == n && s.err_high.size() == n;
        for (size_t i = 0; i < n; ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            const double cx = px(s.x[i]);
            if (bars && std::isfinite(s.err_low[i]) &&
                std::isfinite(s.err_high[i])) {
                const double y1 = py(s.err_low[i]), y2 = py(s.err_high[i]);
                out += "<line x1=\"" + detail::fmt(cx) + "\" y1=\"" +
                       detail::fmt(y1) + "\" x2=\"" + detail::fmt(cx) +
                       "\" y2=\"" + detail::fmt(y2) + "\" stroke=\"" +
                       s.color + "\"/>\n";
                for (double ye : {y1, y2})
                    out += "<line x1=\"" + detail::fmt(cx - 3) +
                           "\" y1=\"" + detail::fmt(ye) + "\" x2=\"" +
                           detail::fmt(cx + 3) + "\" y2=\"" +
                           detail::fmt(ye) + "\" stroke=\"" + s.color +
                           "\"/>\n";
            }
            if (s.markers)
                out += "<circle cx=\"" + detail::fmt(cx) + "\" cy=\"" +
                       detail::fmt(py(s.y[i])) + "\" r=\"3\" fill=\"" +
                       s.color + "\"/>\n";
        }
        if (!s.label.empty()) {
            out += "<line x1=\"" + detail::fmt(right - 140) + "\" y1=\"" +
                   detail::fmt(legend_y - 4) + "\" x2=\"" +
                   detail::fmt(right - 116) + "\" y2=\"" +
                   detail::fmt(legend_y - 4) + "\" stroke=\"" + s.color +
                   "\" stroke-width=\"2\"/>\n";
            out += "<text x=\"" + detail::fmt(right - 110) + "\" y=\"" +
                   detail::fmt(legend_y) +
                   "\" font-family=\"sans-serif\" font-size=\"11\">" +
                   detail::xml_escape(s.label) + "</text>\n";
            legend_y += 16.0;
        }
    }
    out += "</svg>\n";
    return out;
}

inline void write_svg(const std::string& path, const Figure& fig) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << render_svg(fig);
    if (!out) throw IoError("write failed: " + path);
}

} // namespace dlcz::plot
