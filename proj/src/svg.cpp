#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>

#include "emlab/artifacts.hpp"

// Self-contained SVG with fixed geometry and %.2f coordinates; no timestamps
// or randomness, so identical inputs give byte-identical plots.

namespace emlab {

namespace {

constexpr double kW = 640.0, kH = 480.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 42.0, kBottom = 52.0;

void appendf(std::string& s, const char* fmt, ...) __attribute__((format(printf, 2, 3)));

void appendf(std::string& s, const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    s += buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

struct Axis {
    double lo = 0.0, hi = 1.0;  // data range (already in log10 for log axes)
    double pix0 = 0.0, pix1 = 1.0;

    double at(double v) const { return pix0 + (v - lo) / (hi - lo) * (pix1 - pix0); }
};

void pad(double& lo, double& hi) {
    if (hi - lo < 1e-9) {
        lo -= 0.5;
        hi += 0.5;
    } else {
        double m = 0.06 * (hi - lo);
        lo -= m;
        hi += m;
    }
}

std::string svg_open(const std::string& title) {
    std::string s;
    appendf(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
               "viewBox=\"0 0 %.0f %.0f\">\n", kW, kH, kW, kH);
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    appendf(s, "<text x=\"%.2f\" y=\"24\" font-family=\"monospace\" font-size=\"15\" "
               "text-anchor=\"middle\">%s</text>\n", kW / 2, xml_escape(title).c_str());
    return s;
}

void frame(std::string& s) {
    appendf(s, "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" "
               "stroke=\"black\"/>\n", kLeft, kTop, kW - kLeft - kRight, kH - kTop - kBottom);
}

void decade_grid(std::string& s, const Axis& ax, bool vertical, const Axis& other) {
    int p0 = int(std::ceil(ax.lo - 1e-9));
    int p1 = int(std::floor(ax.hi + 1e-9));
    for (int p = p0; p <= p1; ++p) {
        double px = ax.at(double(p));
        if (vertical) {
            appendf(s, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                       "stroke=\"#cccccc\"/>\n", px, other.pix1, px, other.pix0);
            appendf(s, "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" font-size=\"12\" "
                       "text-anchor=\"middle\">1e%d</text>\n", px, kH - kBottom + 18.0, p);
        } else {
            appendf(s, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                       "stroke=\"#cccccc\"/>\n", other.pix0, px, other.pix1, px);
            appendf(s, "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" font-size=\"12\" "
                       "text-anchor=\"end\">1e%d</text>\n", kLeft - 6.0, px + 4.0, p);
        }
    }
}

}  // namespace

std::string svg_loglog_curve(const EmergenceCurve& curve, const std::string& title) {
    Axis x, y;
    x.pix0 = kLeft;
    x.pix1 = kW - kRight;
    y.pix0 = kH - kBottom;  // svg y grows downward
    y.pix1 = kTop;

    bool first = true;
    for (const auto& pt : curve.points) {
        double lx = std::log10(1.0 / pt.epsilon);
        double ly = std::log10(double(std::max(pt.N, 1)));
        if (first) {
            x.lo = x.hi = lx;
            y.lo = y.hi = ly;
            first = false;
        } else {
            x.lo = std::min(x.lo, lx);
            x.hi = std::max(x.hi, lx);
            y.lo = std::min(y.lo, ly);
            y.hi = std::max(y.hi, ly);
        }
    }
    if (first) {
        x.lo = 0.0;
        x.hi = 1.0;
        y.lo = 0.0;
        y.hi = 1.0;
    }
    pad(x.lo, x.hi);
    pad(y.lo, y.hi);

    std::string s = svg_open(title);
    decade_grid(s, x, true, y);
    decade_grid(s, y, false, x);
    frame(s);

    std::string pts;
    for (const auto& pt : curve.points) {
        double px = x.at(std::log10(1.0 / pt.epsilon));
        double py = y.at(std::log10(double(std::max(pt.N, 1))));
        appendf(pts, "%.2f,%.2f ", px, py);
        appendf(s, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"#205090\"/>\n", px, py);
    }
    if (!pts.empty()) pts.pop_back();
    appendf(s, "<polyline points=\"%s\" fill=\"none\" stroke=\"#205090\" "
               "stroke-width=\"1.5\"/>\n", pts.c_str());

    appendf(s, "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" font-size=\"13\">"
               "fitted slope %.3f, class %s</text>\n", kLeft + 10.0, kTop + 18.0,
            curve.fit.slope, scaling_name(curve.scaling));
    appendf(s, "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" font-size=\"12\" "
               "text-anchor=\"middle\">1/epsilon</text>\n", (kLeft + kW - kRight) / 2,
            kH - 14.0);
    appendf(s, "<text x=\"16\" y=\"%.2f\" font-family=\"monospace\" font-size=\"12\" "
               "transform=\"rotate(-90 16 %.2f)\" text-anchor=\"middle\">N(epsilon)</text>\n",
            (kTop + kH - kBottom) / 2, (kTop + kH - kBottom) / 2);
    s += "</svg>\n";
    return s;
}

std::string svg_orbit_scatter(const Trajectory& traj, const Box& box, const std::string& title) {
    Axis x, y;
    x.pix0 = kLeft;
    x.pix1 = kW - kRight;
    y.pix0 = kH - kBottom;
    y.pix1 = kTop;
    x.lo = box.lo[0];
    x.hi = box.hi[0];
    y.lo = box.dim > 1 ? box.lo[1] : -1.0;
    y.hi = box.dim > 1 ? box.hi[1] : 1.0;

    std::string s = svg_open(title);
    frame(s);

    std::size_t n = traj.points.size();
    std::size_t stride = n > 4000 ? (n + 3999) / 4000 : 1;
    for (std::size_t i = 0; i < n; i += stride) {
        const auto& z = traj.points[i];
        if (z.escaped) continue;
        double py = box.dim > 1 ? z.y() : 0.0;
        appendf(s, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.5\" fill=\"#903020\"/>\n",
                x.at(z.x()), y.at(py));
    }
    appendf(s, "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" font-size=\"12\" "
               "text-anchor=\"middle\">x</text>\n", (kLeft + kW - kRight) / 2, kH - 14.0);
    appendf(s, "<text x=\"16\" y=\"%.2f\" font-family=\"monospace\" font-size=\"12\" "
               "transform=\"rotate(-90 16 %.2f)\" text-anchor=\"middle\">y</text>\n",
            (kTop + kH - kBottom) / 2, (kTop + kH - kBottom) / 2);
    s += "</svg>\n";
    return s;
}

}  // namespace emlab
