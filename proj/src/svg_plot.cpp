// Copyright 2026 The QViT Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qvit/svg_plot.hpp"

#include "qvit/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string_view>

namespace qvit::plot {

namespace {

constexpr double kPanelWidth = 420.0;
constexpr double kPanelHeight = 320.0;
constexpr double kLeft = 60.0, kRight = 20.0, kTop = 36.0, kBottom = 48.0;
constexpr std::array<const char *, 8> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(std::string_view s) {
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

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void finish() {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
};

void render_panel(std::string &svg, const Panel &p, double ox) {
    Range xr, yr;
    for (const auto &s : p.series) {
        if (s.x.size() != s.y.size()) {
            throw DimensionError("render_svg: series '" + s.label + "' has " +
                                 std::to_string(s.x.size()) + " x values and " +
                                 std::to_string(s.y.size()) + " y values");
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xr.add(s.x[i]);
            yr.add(s.y[i]);
        }
    }
    xr.finish();
    yr.finish();
    const double w = kPanelWidth - kLeft - kRight;
    const double h = kPanelHeight - kTop - kBottom;
    auto px = [&](double x) { return ox + kLeft + (x - xr.lo) / (xr.hi - xr.lo) * w; };
    auto py = [&](double y) { return kTop + h - (y - yr.lo) / (yr.hi - yr.lo) * h; };

    svg += "<text x=\"" + num(ox + kPanelWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" " +
           "font-size=\"14\">" + escape(p.title) + "</text>\n";
    svg += "<rect x=\"" + num(ox + kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(w) +
           "\" height=\"" + num(h) + "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double xv = xr.lo + (xr.hi - xr.lo) * t / 4.0;
        const double yv = yr.lo + (yr.hi - yr.lo) * t / 4.0;
        svg += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(kTop + h + 16) +
               "\" text-anchor=\"middle\" font-size=\"10\">" + tick_label(xv) + "</text>\n";
        svg += "<text x=\"" + num(ox + kLeft - 6) + "\" y=\"" + num(py(yv) + 3) +
               "\" text-anchor=\"end\" font-size=\"10\">" + tick_label(yv) + "</text>\n";
        svg += "<line x1=\"" + num(ox + kLeft) + "\" y1=\"" + num(py(yv)) + "\" x2=\"" +
               num(ox + kLeft + w) + "\" y2=\"" + num(py(yv)) +
               "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
    }
    svg += "<text x=\"" + num(ox + kLeft + w / 2) + "\" y=\"" + num(kPanelHeight - 10) +
           "\" text-anchor=\"middle\" font-size=\"12\">" + escape(p.x_label) + "</text>\n";
    svg += "<text transform=\"translate(" + num(ox + 16) + "," + num(kTop + h / 2) +
           ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" + escape(p.y_label) +
           "</text>\n";

    for (std::size_t si = 0; si < p.series.size(); ++si) {
        const auto &s = p.series[si];
        const char *color = kColors[si % kColors.size()];
        std::string points;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                points += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
            }
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        const double ly = kTop + 14 + 14.0 * static_cast<double>(si);
        svg += "<line x1=\"" + num(ox + kLeft + 8) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
               num(ox + kLeft + 26) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + num(ox + kLeft + 30) + "\" y=\"" + num(ly) +
               "\" font-size=\"10\">" + escape(s.label) + "</text>\n";
    }
}

} // namespace

std::string render_svg(const std::vector<Panel> &panels) {
    const double width = kPanelWidth * static_cast<double>(std::max<std::size_t>(1, panels.size()));
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
                      "\" height=\"" + num(kPanelHeight) + "\" viewBox=\"0 0 " + num(width) +
                      " " + num(kPanelHeight) + "\" font-family=\"sans-serif\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i) {
        render_panel(svg, panels[i], kPanelWidth * static_cast<double>(i));
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace qvit::plot
