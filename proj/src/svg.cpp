#include "curirl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <cstdio>

namespace curirl {

namespace {

constexpr double width = 640, height = 400, margin = 50;

// Plot coordinates only need a few decimals.
std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

} // namespace

void write_line_chart_svg(std::ostream& out, const std::string& title, std::span<const Series> series) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::size_t n = 0;
    for (const auto& s : series) {
        n = std::max(n, s.values.size());
        for (double v : s.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!(lo <= hi)) lo = 0, hi = 1;
    if (hi - lo < 1e-12) hi = lo + 1.0;
    const double plot_w = width - 2 * margin, plot_h = height - 2 * margin;
    auto px = [&](std::size_t i) { return margin + (n > 1 ? plot_w * static_cast<double>(i) / (n - 1) : 0.0); };
    auto py = [&](double v) { return height - margin - plot_h * (v - lo) / (hi - lo); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\">"
        << escape(title) << "</text>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << margin - 4 << "\" y=\"" << margin + 4 << "\" text-anchor=\"end\" font-size=\"10\">"
        << fmt(hi) << "</text>\n";
    out << "<text x=\"" << margin - 4 << "\" y=\"" << height - margin << "\" text-anchor=\"end\" font-size=\"10\">"
        << fmt(lo) << "</text>\n";
    out << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 16
        << "\" text-anchor=\"end\" font-size=\"10\">" << n << "</text>\n";

    double legend_y = margin;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.values.size(); ++i) out << (i ? " " : "") << fmt(px(i)) << ',' << fmt(py(s.values[i]));
        out << "\"/>\n";
        out << "<text x=\"" << width - margin - 80 << "\" y=\"" << legend_y << "\" font-size=\"11\" fill=\"" << s.color
            << "\">" << escape(s.label) << "</text>\n";
        legend_y += 14;
    }
    out << "</svg>\n";
}

void write_room_svg(std::ostream& out, double room_size, Position2 goal, double goal_radius,
                    std::span<const PathOverlay> paths) {
    const double side = height - 2 * margin;
    const double k = side / room_size;
    auto sx = [&](double x) { return margin + x * k; };
    auto sz = [&](double z) { return height - margin - z * k; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << height << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << side << "\" height=\"" << side
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<circle cx=\"" << fmt(sx(goal.x)) << "\" cy=\"" << fmt(sz(goal.z)) << "\" r=\""
        << fmt(std::max(2.0, goal_radius * k)) << "\" fill=\"gold\" stroke=\"orange\"/>\n";
    for (const auto& p : paths) {
        if (p.points.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << (p.highlighted ? "seagreen" : "steelblue")
            << "\" stroke-width=\"1\" points=\"";
        for (std::size_t i = 0; i < p.points.size(); ++i)
            out << (i ? " " : "") << fmt(sx(p.points[i].x)) << ',' << fmt(sz(p.points[i].z));
        out << "\"/>\n";
        out << "<circle cx=\"" << fmt(sx(p.points.front().x)) << "\" cy=\"" << fmt(sz(p.points.front().z))
            << "\" r=\"1.5\" fill=\"gray\"/>\n";
    }
    out << "</svg>\n";
}

} // namespace curirl
