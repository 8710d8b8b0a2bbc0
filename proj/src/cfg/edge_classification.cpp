#include <limits>

#include "veil/cfg/analysis.hpp"

namespace veil::cfg {

const char* to_string(EdgeKind kind) {
    switch (kind) {
    case EdgeKind::Tree: return "tree";
    case EdgeKind::Back: return "back";
    case EdgeKind::Forward: return "forward";
    case EdgeKind::Cross: return "cross";
    }
    return "tree";
}

EdgeClassification classify_edges(const CfgGraph& g) {
    constexpr auto kUnseen = std::numeric_limits<std::uint32_t>::max();
    const std::size_t n = g.node_count();

    EdgeClassification result;
    result.class_of.assign(g.edge_count(), EdgeKind::Tree);
    result.dfs_order.assign(n, kUnseen);
    result.reachable_mask.assign(n, false);

    enum class Color : std::uint8_t { White, Grey, Black };
    std::vector<Color> color(n, Color::White);
    std::uint32_t counter = 0;

    struct Frame {
        NodeId node;
        std::size_t next_edge;
    };
    std::vector<Frame> stack;

    auto run_from = [&](NodeId root) {
        color[root.value] = Color::Grey;
        result.dfs_order[root.value] = counter++;
        stack.push_back({root, 0});
        while (!stack.empty()) {
            Frame& top = stack.back();
            const auto out = g.out_edges(top.node);
            if (top.next_edge == out.size()) {
                color[top.node.value] = Color::Black;
                stack.pop_back();
                continue;
            }
            const EdgeId e = out[top.next_edge++];
            const NodeId v = g.edge(e).dst;
            switch (color[v.value]) {
            case Color::White:
                result.class_of[e.value] = EdgeKind::Tree;
                color[v.value] = Color::Grey;
                result.dfs_order[v.value] = counter++;
                stack.push_back({v, 0});
                break;
            case Color::Grey:
                result.class_of[e.value] = EdgeKind::Back;
                break;
            case Color::Black:
                result.class_of[e.value] =
                    result.dfs_order[top.node.value] < result.dfs_order[v.value]
                        ? EdgeKind::Forward
                        : EdgeKind::Cross;
                break;
            }
        }
    };

    if (n == 0) return result;
    run_from(g.entry());
    for (std::uint32_t i = 0; i < n; ++i) {
        result.reachable_mask[i] = color[i] != Color::White;
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        if (!result.reachable_mask[i]) result.unreachable.push_back(NodeId{i});
    }
    for (NodeId root : result.unreachable) {
        if (color[root.value] == Color::White) run_from(root);
    }
    return result;
}

} // namespace veil::cfg
