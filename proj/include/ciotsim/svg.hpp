#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ciotsim/csv.hpp"

namespace ciot {

// One plotted series; ylo/yhi, when present, draw a shaded min-max band.
struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> ylo;
    std::vector<double> yhi;
};

struct ChartSpec {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    int width = 960;
    int height = 560;
};

namespace svg_detail {

inline const char* palette(size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return colors[i % 8];
}

inline std::string num(double v) { return format_double_fixed(v, 2); }

// largest "nice" step (1/2/5 times a power of ten) giving <= max_ticks ticks
inline double nice_step(double range, int max_ticks) {
    if (range <= 0) return 1.0;
    double raw = range / max_ticks;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * m >= raw) return mag * m;
    }
    return mag * 10.0;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace svg_detail

// Deterministic multi-series line chart. Equal inputs render to identical
// bytes.
inline std::string render_line_chart(const ChartSpec& spec, const std::vector<Series>& series) {
    using namespace svg_detail;
    if (series.empty()) throw std::invalid_argument("chart: no series");

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const Series& s : series) {
        if (s.x.size() != s.y.size() || (!s.ylo.empty() && s.ylo.size() != s.x.size()) ||
            (!s.yhi.empty() && s.yhi.size() != s.x.size()))
            throw std::invalid_argument("chart: series length mismatch");
        if (s.x.empty()) throw std::invalid_argument("chart: empty series");
        for (size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            double lo = s.ylo.empty() ? s.y[i] : s.ylo[i];
            double hi = s.yhi.empty() ? s.y[i] : s.yhi[i];
            ymin = std::min(ymin, lo);
            ymax = std::max(ymax, hi);
        }
    }
    if (xmax == xmin) { xmin -= 1.0; xmax += 1.0; }
    if (ymax == ymin) { ymin -= 1.0; ymax += 1.0; }
    double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const double ml = 72, mr = 24, mt = 48, mb = 56;
    const double pw = spec.width - ml - mr, ph = spec.height - mt - mb;
    auto px = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return mt + ph - (v - ymin) / (ymax - ymin) * ph; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) +
           "\" height=\"" + std::to_string(spec.height) + "\" viewBox=\"0 0 " +
           std::to_string(spec.width) + " " + std::to_string(spec.height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!spec.title.empty())
        out += "<text x=\"" + num(spec.width / 2.0) +
               "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
               escape(spec.title) + "</text>\n";

    // axes and ticks
    double xstep = nice_step(xmax - xmin, 8);
    double ystep = nice_step(ymax - ymin, 8);
    out += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (double t = std::ceil(xmin / xstep) * xstep; t <= xmax + 1e-9 * xstep; t += xstep) {
        double X = px(t);
        out += "<line x1=\"" + num(X) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(X) + "\" y2=\"" +
               num(mt + ph) + "\" stroke=\"#ddd\"/>\n";
        out += "<text x=\"" + num(X) + "\" y=\"" + num(mt + ph + 16) +
               "\" text-anchor=\"middle\">" + format_double(t) + "</text>\n";
    }
    for (double t = std::ceil(ymin / ystep) * ystep; t <= ymax + 1e-9 * ystep; t += ystep) {
        double Y = py(t);
        out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(Y) + "\" x2=\"" + num(ml + pw) +
               "\" y2=\"" + num(Y) + "\" stroke=\"#ddd\"/>\n";
        out += "<text x=\"" + num(ml - 6) + "\" y=\"" + num(Y + 4) +
               "\" text-anchor=\"end\">" + format_double(t) + "</text>\n";
    }
    out += "</g>\n";
    out += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" + num(pw) +
           "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"#333\"/>\n";
    if (!spec.xlabel.empty())
        out += "<text x=\"" + num(ml + pw / 2) + "\" y=\"" + num(spec.height - 12.0) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
               escape(spec.xlabel) + "</text>\n";
    if (!spec.ylabel.empty())
        out += "<text x=\"16\" y=\"" + num(mt + ph / 2) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
               "transform=\"rotate(-90 16 " + num(mt + ph / 2) + ")\">" +
               escape(spec.ylabel) + "</text>\n";

    // bands first so lines draw on top
    for (size_t si = 0; si < series.size(); ++si) {
        const Series& s = series[si];
        if (s.ylo.empty() || s.yhi.empty() || s.x.size() < 2) continue;
        std::string pts;
        for (size_t i = 0; i < s.x.size(); ++i)
            pts += num(px(s.x[i])) + "," + num(py(s.yhi[i])) + " ";
        for (size_t i = s.x.size(); i-- > 0;)
            pts += num(px(s.x[i])) + "," + num(py(s.ylo[i])) + " ";
        out += "<polygon points=\"" + pts + "\" fill=\"" + palette(si) +
               "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    }
    for (size_t si = 0; si < series.size(); ++si) {
        const Series& s = series[si];
        if (s.x.size() == 1) {
            out += "<circle cx=\"" + num(px(s.x[0])) + "\" cy=\"" + num(py(s.y[0])) +
                   "\" r=\"3.5\" fill=\"" + palette(si) + "\"/>\n";
            continue;
        }
        std::string pts;
        for (size_t i = 0; i < s.x.size(); ++i)
            pts += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
        out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + palette(si) +
               "\" stroke-width=\"1.8\"/>\n";
    }

    // legend
    double lx = ml + pw - 150, ly = mt + 12;
    for (size_t si = 0; si < series.size(); ++si) {
        out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 22) +
               "\" y2=\"" + num(ly) + "\" stroke=\"" + palette(si) + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + num(lx + 28) + "\" y=\"" + num(ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + escape(series[si].label) +
               "</text>\n";
        ly += 18;
    }

    out += "</svg>\n";
    return out;
}

}  // namespace ciot
