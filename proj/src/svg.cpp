#include "biflow/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace biflow {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_text(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

struct Bounds {
    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -std::numeric_limits<double>::infinity();
    double y_lo = std::numeric_limits<double>::infinity();
    double y_hi = -std::numeric_limits<double>::infinity();

    void include(double x, double y) {
        x_lo = std::min(x_lo, x);
        x_hi = std::max(x_hi, x);
        y_lo = std::min(y_lo, y);
        y_hi = std::max(y_hi, y);
    }

    void finish() {
        if (!(x_lo <= x_hi)) throw std::invalid_argument("svg: no points to plot");
        if (x_hi == x_lo) { x_lo -= 1.0; x_hi += 1.0; }
        if (y_hi == y_lo) { y_lo -= 1.0; y_hi += 1.0; }
        const double px = 0.05 * (x_hi - x_lo);
        const double py = 0.05 * (y_hi - y_lo);
        x_lo -= px; x_hi += px;
        y_lo -= py; y_hi += py;
    }
};

struct Frame {
    Bounds b;
    double ml = 56, mr = 16, mt = 16, mb = 44;
    double w, h;

    double sx(double x) const { return ml + (x - b.x_lo) / (b.x_hi - b.x_lo) * (w - ml - mr); }
    double sy(double y) const { return h - mb - (y - b.y_lo) / (b.y_hi - b.y_lo) * (h - mt - mb); }
};

std::string header(int width, int height) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           std::to_string(width) + "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
           std::to_string(width) + " " + std::to_string(height) + "\">\n" +
           "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void append_axes(std::string& out, const Frame& f, const std::string& x_label,
                 const std::string& y_label, bool log_x) {
    const double x0 = f.sx(f.b.x_lo), x1 = f.sx(f.b.x_hi);
    const double y0 = f.sy(f.b.y_lo), y1 = f.sy(f.b.y_hi);
    out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) + "\" y2=\"" +
           num(y0) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) + "\" y2=\"" +
           num(y1) + "\" stroke=\"black\"/>\n";
    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double fr = static_cast<double>(i) / ticks;
        const double xv = f.b.x_lo + fr * (f.b.x_hi - f.b.x_lo);
        const double yv = f.b.y_lo + fr * (f.b.y_hi - f.b.y_lo);
        const double xs = f.sx(xv), ys = f.sy(yv);
        out += "<line x1=\"" + num(xs) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(xs) + "\" y2=\"" +
               num(y0 + 4) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(xs) + "\" y=\"" + num(y0 + 18) +
               "\" font-size=\"11\" text-anchor=\"middle\">" +
               tick_text(log_x ? std::exp2(xv) : xv) + "</text>\n";
        out += "<line x1=\"" + num(x0 - 4) + "\" y1=\"" + num(ys) + "\" x2=\"" + num(x0) +
               "\" y2=\"" + num(ys) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(x0 - 7) + "\" y=\"" + num(ys + 4) +
               "\" font-size=\"11\" text-anchor=\"end\">" + tick_text(yv) + "</text>\n";
    }
    if (!x_label.empty()) {
        out += "<text x=\"" + num(0.5 * (x0 + x1)) + "\" y=\"" + num(y0 + 36) +
               "\" font-size=\"12\" text-anchor=\"middle\">" + x_label + "</text>\n";
    }
    if (!y_label.empty()) {
        out += "<text x=\"" + num(x0 - 42) + "\" y=\"" + num(0.5 * (y0 + y1)) +
               "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 " +
               num(x0 - 42) + " " + num(0.5 * (y0 + y1)) + ")\">" + y_label + "</text>\n";
    }
}

void append_legend(std::string& out, const Frame& f,
                   const std::vector<std::pair<std::string, std::string>>& entries) {
    double y = f.mt + 14;
    for (const auto& [label, color] : entries) {
        if (label.empty()) continue;
        const double x = f.w - f.mr - 130;
        out += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y - 4) + "\" r=\"4\" fill=\"" + color +
               "\"/>\n";
        out += "<text x=\"" + num(x + 9) + "\" y=\"" + num(y) + "\" font-size=\"12\">" + label +
               "</text>\n";
        y += 16;
    }
}

}  // namespace

std::string scatter_svg(const std::vector<ScatterGroup>& groups, int width, int height) {
    Frame f;
    f.w = width;
    f.h = height;
    for (const auto& g : groups) {
        for (const auto& p : g.points) f.b.include(p[0], p[1]);
    }
    f.b.finish();

    std::string out = header(width, height);
    append_axes(out, f, "x0", "x1", false);
    for (const auto& g : groups) {
        for (const auto& p : g.points) {
            out += "<circle cx=\"" + num(f.sx(p[0])) + "\" cy=\"" + num(f.sy(p[1])) + "\" r=\"" +
                   num(g.radius) + "\" fill=\"" + g.color + "\" fill-opacity=\"0.6\"/>\n";
        }
    }
    std::vector<std::pair<std::string, std::string>> entries;
    for (const auto& g : groups) entries.emplace_back(g.label, g.color);
    append_legend(out, f, entries);
    out += "</svg>\n";
    return out;
}

std::string line_chart_svg(const std::vector<LineSeries>& series, const std::string& x_label,
                           const std::string& y_label, int width, int height, bool log_x) {
    Frame f;
    f.w = width;
    f.h = height;
    auto xmap = [log_x](double x) {
        if (!log_x) return x;
        if (!(x > 0.0)) throw std::invalid_argument("svg: log axis needs positive x");
        return std::log2(x);
    };
    for (const auto& s : series) {
        for (const auto& p : s.points) f.b.include(xmap(p[0]), p[1]);
    }
    f.b.finish();

    std::string out = header(width, height);
    append_axes(out, f, x_label, y_label, log_x);
    for (const auto& s : series) {
        if (s.points.empty()) continue;
        std::string pts;
        for (const auto& p : s.points) {
            pts += num(f.sx(xmap(p[0]))) + "," + num(f.sy(p[1])) + " ";
        }
        out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + s.color +
               "\" stroke-width=\"1.5\"/>\n";
        for (const auto& p : s.points) {
            out += "<circle cx=\"" + num(f.sx(xmap(p[0]))) + "\" cy=\"" + num(f.sy(p[1])) +
                   "\" r=\"3\" fill=\"" + s.color + "\"/>\n";
        }
    }
    std::vector<std::pair<std::string, std::string>> entries;
    for (const auto& s : series) entries.emplace_back(s.label, s.color);
    append_legend(out, f, entries);
    out += "</svg>\n";
    return out;
}

}  // namespace biflow
