#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "veil/cfg/analysis.hpp"
#include "veil/cfg/graph.hpp"

namespace veil::layout {

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

struct BBox {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
    bool operator==(const BBox&) const = default;
};

enum class Mode : std::uint8_t {
    Grouped, // back-edge columns left of x = 0
    Indent,  // x follows in-rank position; loops indent the body
    Imported // coordinates from a foreign tool
};

const char* to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

struct LayoutConfig {
    double dx = 120.0;
    double dy = 90.0;
    Mode mode = Mode::Grouped;
    cfg::Size default_node_size{100.0, 50.0};

    bool operator==(const LayoutConfig&) const = default;
};

struct LayoutNode {
    std::string id;
    std::optional<std::string> label;
    Point center;
    cfg::Size size;
    std::optional<int> rank;
    std::optional<int> ord;
    bool is_virtual = false;

    bool operator==(const LayoutNode&) const = default;
};

struct LayoutEdge {
    std::string src;
    std::string dst;
    cfg::EdgeKind kind = cfg::EdgeKind::Tree;
    std::vector<Point> points;

    bool operator==(const LayoutEdge&) const = default;
};

/// Final drawing: node centers and sizes, edge polylines with their DFS kind.
/// Polylines start and end at the endpoint node centers. A virtual sink, when
/// present, is kept as a zero-sized node flagged `is_virtual`; its synthetic
/// edges are not part of the drawing.
struct Layout {
    LayoutConfig config;
    BBox bbox;
    std::vector<LayoutNode> nodes;
    std::vector<LayoutEdge> edges;

    bool operator==(const Layout&) const = default;
};

/// Bounding box over non-virtual node boxes and all polyline points.
BBox compute_bbox(const std::vector<LayoutNode>& nodes, const std::vector<LayoutEdge>& edges);

} // namespace veil::layout
