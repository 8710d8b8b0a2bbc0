#include "veil/layout/svg.hpp"

#include <cmath>
#include <unordered_map>

#include <fmt/format.h>

namespace veil::layout {
namespace {

constexpr double kMargin = 20.0;

std::string num(double v) {
    if (std::abs(v) < 0.005) return "0";
    std::string s = fmt::format("{:.2f}", v);
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return s;
}

std::string escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
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

/// Moves `from` (inside the box of `n`) along from->to onto the box border.
Point clip_to_box(const LayoutNode& n, Point from, Point to) {
    const double hw = n.size.width / 2;
    const double hh = n.size.height / 2;
    if (hw <= 0.0 && hh <= 0.0) return from;
    const double dx = to.x - from.x;
    const double dy = to.y - from.y;
    double t = 1.0;
    if (dx != 0.0) t = std::min(t, std::abs((n.center.x + (dx > 0 ? hw : -hw) - from.x) / dx));
    if (dy != 0.0) t = std::min(t, std::abs((n.center.y + (dy > 0 ? hh : -hh) - from.y) / dy));
    return {from.x + t * dx, from.y + t * dy};
}

} // namespace

std::string render_svg(const Layout& layout) {
    const BBox& b = layout.bbox;
    std::string out;
    out += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"{}\" "
        "height=\"{}\">\n",
        num(b.min_x - kMargin), num(b.min_y - kMargin), num(b.width() + 2 * kMargin),
        num(b.height() + 2 * kMargin), num(b.width() + 2 * kMargin),
        num(b.height() + 2 * kMargin));
    out += "<defs>\n"
           "<marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"8\" "
           "markerHeight=\"8\" orient=\"auto-start-reverse\"><path d=\"M0,0 L10,5 L0,10 z\"/>"
           "</marker>\n"
           "<style>\n"
           ".node rect{fill:#f4f4f4;stroke:#333;stroke-width:1}\n"
           ".node text{font:12px sans-serif;text-anchor:middle;dominant-baseline:central}\n"
           ".edge{fill:none;stroke:#444;stroke-width:1.2}\n"
           ".edge.back{stroke:#b2302c;stroke-dasharray:6 4}\n"
           "</style>\n"
           "</defs>\n";

    std::unordered_map<std::string, const LayoutNode*> by_id;
    for (const auto& n : layout.nodes) by_id.emplace(n.id, &n);

    out += "<g class=\"edges\">\n";
    for (const auto& e : layout.edges) {
        if (e.points.size() < 2) continue;
        std::vector<Point> pts = e.points;
        if (auto it = by_id.find(e.src); it != by_id.end() && it->second->center == pts.front()) {
            pts.front() = clip_to_box(*it->second, pts[0], pts[1]);
        }
        if (auto it = by_id.find(e.dst); it != by_id.end() && it->second->center == pts.back()) {
            const std::size_t k = pts.size();
            pts.back() = clip_to_box(*it->second, pts[k - 1], pts[k - 2]);
        }
        std::string coords;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) coords += ' ';
            coords += num(pts[i].x) + "," + num(pts[i].y);
        }
        out += fmt::format(
            "<polyline class=\"edge {}\" data-src=\"{}\" data-dst=\"{}\" points=\"{}\" "
            "marker-end=\"url(#arrow)\"/>\n",
            cfg::to_string(e.kind), escape(e.src), escape(e.dst), coords);
    }
    out += "</g>\n<g class=\"nodes\">\n";
    for (const auto& n : layout.nodes) {
        if (n.is_virtual) continue;
        out += fmt::format(
            "<g class=\"node\" data-id=\"{}\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" "
            "rx=\"6\" ry=\"6\"/><text x=\"{}\" y=\"{}\">{}</text></g>\n",
            escape(n.id), num(n.center.x - n.size.width / 2), num(n.center.y - n.size.height / 2),
            num(n.size.width), num(n.size.height), num(n.center.x), num(n.center.y),
            escape(n.label.value_or(n.id)));
    }
    out += "</g>\n</svg>\n";
    return out;
}

} // namespace veil::layout
