#include <algorithm>
#include <cmath>
#include <limits>

#include "veil/errors.hpp"
#include "veil/layout/pipeline.hpp"

namespace veil::layout {

const char* to_string(Mode mode) {
    switch (mode) {
    case Mode::Grouped: return "grouped";
    case Mode::Indent: return "indent";
    case Mode::Imported: return "imported";
    }
    return "grouped";
}

std::optional<Mode> parse_mode(std::string_view text) {
    if (text == "grouped") return Mode::Grouped;
    if (text == "indent") return Mode::Indent;
    if (text == "imported") return Mode::Imported;
    return std::nullopt;
}

BBox compute_bbox(const std::vector<LayoutNode>& nodes, const std::vector<LayoutEdge>& edges) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    BBox box{inf, inf, -inf, -inf};
    auto take = [&](double x, double y) {
        box.min_x = std::min(box.min_x, x);
        box.min_y = std::min(box.min_y, y);
        box.max_x = std::max(box.max_x, x);
        box.max_y = std::max(box.max_y, y);
    };
    for (const auto& n : nodes) {
        if (n.is_virtual) continue;
        take(n.center.x - n.size.width / 2, n.center.y - n.size.height / 2);
        take(n.center.x + n.size.width / 2, n.center.y + n.size.height / 2);
    }
    for (const auto& e : edges) {
        for (const auto& p : e.points) take(p.x, p.y);
    }
    if (box.min_x == inf) return BBox{};
    return box;
}

std::vector<double> initial_x(const LayeredGraph& lg, double dx, Mode mode) {
    std::vector<double> x(lg.slots.size(), 0.0);
    for (std::size_t l = 0; l < lg.layers.size(); ++l) {
        const double offset = mode == Mode::Grouped ? lg.back_dummies(l) : 0.0;
        for (SlotIndex s : lg.layers[l]) x[s] = dx * (static_cast<double>(lg.ord[s]) - offset);
    }
    return x;
}

void straighten_edges(const LayeredGraph& lg, const EdgeClassification& cls,
                      std::vector<double>& slot_x) {
    for (std::uint32_t e = 0; e < lg.chains.size(); ++e) {
        const auto& chain = lg.chains[e];
        if (chain.size() < 2) continue;
        const bool back = cls.is_back(EdgeId{e});
        double common = slot_x[chain.front()];
        for (SlotIndex s : chain) {
            common = back ? std::min(common, slot_x[s]) : std::max(common, slot_x[s]);
        }
        for (SlotIndex s : chain) slot_x[s] = common;
    }
}

std::vector<Point> elide_collinear(std::vector<Point> points, double epsilon) {
    if (points.size() < 3) return points;
    std::vector<Point> out;
    out.reserve(points.size());
    out.push_back(points.front());
    for (std::size_t i = 1; i + 1 < points.size(); ++i) {
        const Point& a = out.back();
        const Point& p = points[i];
        const Point& b = points[i + 1];
        const double vx = b.x - a.x;
        const double vy = b.y - a.y;
        const double len = std::hypot(vx, vy);
        bool redundant = false;
        if (len == 0.0) {
            redundant = std::hypot(p.x - a.x, p.y - a.y) <= epsilon;
        } else {
            const double distance = std::abs(vx * (p.y - a.y) - vy * (p.x - a.x)) / len;
            const double along = (vx * (p.x - a.x) + vy * (p.y - a.y)) / len;
            redundant = distance <= epsilon && along >= -epsilon && along <= len + epsilon;
        }
        if (!redundant) out.push_back(p);
    }
    out.push_back(points.back());
    return out;
}

void check_spacing(const CfgGraph& g, const LayoutConfig& config) {
    if (!(config.dx > 0.0) || !(config.dy > 0.0)) {
        throw PreconditionError("spacing dx and dy must be positive");
    }
    for (const auto& n : g.nodes()) {
        if (n.is_virtual) continue;
        const cfg::Size s = n.size.value_or(config.default_node_size);
        if (!(config.dx > s.width)) {
            throw PreconditionError("dx " + std::to_string(config.dx) +
                                    " must exceed the width of node '" + n.name + "' (" +
                                    std::to_string(s.width) + ")");
        }
        if (!(config.dy > s.height)) {
            throw PreconditionError("dy " + std::to_string(config.dy) +
                                    " must exceed the height of node '" + n.name + "' (" +
                                    std::to_string(s.height) + ")");
        }
    }
}

Layout assign_coordinates(const CfgGraph& g, const EdgeClassification& cls,
                          const LayeredGraph& lg, const LayoutConfig& config) {
    check_spacing(g, config);
    auto slot_x = initial_x(lg, config.dx, config.mode);
    straighten_edges(lg, cls, slot_x);

    Layout out;
    out.config = config;
    out.nodes.reserve(g.node_count());
    double min_real_x = std::numeric_limits<double>::infinity();
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
        const auto& n = g.node(NodeId{i});
        const SlotIndex s = lg.slot_of_node[i];
        LayoutNode ln;
        ln.id = n.name;
        ln.label = n.label;
        ln.center = {slot_x[s], config.dy * lg.slots[s].rank};
        ln.size = n.is_virtual ? cfg::Size{0.0, 0.0} : n.size.value_or(config.default_node_size);
        ln.rank = lg.slots[s].rank;
        ln.ord = static_cast<int>(lg.ord[s]);
        ln.is_virtual = n.is_virtual;
        if (!n.is_virtual) min_real_x = std::min(min_real_x, ln.center.x);
        out.nodes.push_back(std::move(ln));
    }

    const bool left_side = config.mode != Mode::Indent;
    for (std::uint32_t i = 0; i < g.edge_count(); ++i) {
        const auto& edge = g.edge(EdgeId{i});
        if (g.node(edge.src).is_virtual || g.node(edge.dst).is_virtual) continue;
        const auto& src = out.nodes[edge.src.value];
        const auto& dst = out.nodes[edge.dst.value];
        LayoutEdge le;
        le.src = src.id;
        le.dst = dst.id;
        le.kind = cls.kind(EdgeId{i});

        if (edge.src == edge.dst) {
            // Lobe out of the side, over the top and back in, on the left in
            // grouped mode. It re-enters off-center so it never runs along a
            // vertical edge attached to the node.
            const double side = left_side ? -1.0 : 1.0;
            const double xo = src.center.x + side * config.dx / 2;
            const double yo = src.center.y - src.size.height / 2 - (config.dy - src.size.height) / 4;
            const double xi = src.center.x + side * src.size.width / 4;
            le.points = {src.center, {xo, src.center.y}, {xo, yo}, {xi, yo}, src.center};
        } else if (lg.chains[i].empty() && le.kind == cfg::EdgeKind::Back) {
            // Adjacent ranks: leave the left side above center, come back into
            // the left side below center, so two such edges sharing a node do
            // not overlap.
            double lane = std::min(src.center.x, dst.center.x);
            if (config.mode == Mode::Grouped) lane = std::min(lane, min_real_x);
            lane -= config.dx / 2;
            const double y_out = src.center.y - src.size.height / 4;
            const double y_in = dst.center.y + dst.size.height / 4;
            le.points = {src.center,
                         {src.center.x - src.size.width / 2, y_out},
                         {lane, y_out},
                         {lane, y_in},
                         {dst.center.x - dst.size.width / 2, y_in},
                         dst.center};
        } else {
            std::vector<Point> pts{src.center};
            const auto& chain = lg.chains[i];
            if (le.kind == cfg::EdgeKind::Back) {
                for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
                    pts.push_back({slot_x[*it], config.dy * lg.slots[*it].rank});
                }
            } else {
                for (SlotIndex s : chain) pts.push_back({slot_x[s], config.dy * lg.slots[s].rank});
            }
            pts.push_back(dst.center);
            le.points = elide_collinear(std::move(pts));
        }
        out.edges.push_back(std::move(le));
    }
    out.bbox = compute_bbox(out.nodes, out.edges);
    return out;
}

PipelineResult run_pipeline(const CfgGraph& input, const LayoutConfig& config) {
    check_spacing(input, config);
    auto g = cfg::ensure_single_sink(input);
    auto classes = cfg::classify_edges(g);
    auto dominators = cfg::compute_dominators(g);
    RankingTrace trace;
    auto ranks = assign_layers(g, classes, dominators, &trace);
    CrossingStats stats;
    auto layered = minimize_crossings(normalize_edges(g, classes, ranks), &stats);
    auto result = assign_coordinates(g, classes, layered, config);
    return PipelineResult{std::move(g),      std::move(classes), std::move(dominators),
                          std::move(trace),  std::move(ranks),   std::move(layered),
                          stats,             std::move(result)};
}

Layout layout(const CfgGraph& g, const LayoutConfig& config) {
    return run_pipeline(g, config).layout;
}

} // namespace veil::layout
