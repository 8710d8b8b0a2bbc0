#include <limits>

#include "veil/cfg/analysis.hpp"
#include "veil/errors.hpp"

namespace veil::cfg {
namespace {

constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();

} // namespace

bool DominatorTree::dominates(NodeId a, NodeId b) const {
    if (!contains(a) || !contains(b)) return false;
    return pre_[a.value] <= pre_[b.value] && post_[b.value] <= post_[a.value];
}

DominatorTree DominatorTree::build(const CfgGraph& g, NodeId root, bool forward) {
    const std::size_t n = g.node_count();
    auto succs = [&](NodeId v) { return forward ? g.out_edges(v) : g.in_edges(v); };
    auto preds = [&](NodeId v) { return forward ? g.in_edges(v) : g.out_edges(v); };
    auto far_end = [&](EdgeId e, bool along) {
        const Edge& edge = g.edge(e);
        return along == forward ? edge.dst : edge.src;
    };

    // One iterative DFS gives the preorder numbering and DFS-tree parents that
    // Lengauer-Tarjan needs, plus the postorder used to order tree children.
    // Successor order follows the edge list.
    std::vector<NodeId> preorder;
    std::vector<NodeId> postorder;
    preorder.reserve(n);
    postorder.reserve(n);
    std::vector<std::uint32_t> num(n, kNone);
    std::vector<std::uint32_t> parent;
    parent.reserve(n);
    struct Frame {
        NodeId node;
        std::size_t next;
    };
    std::vector<Frame> stack{{root, 0}};
    num[root.value] = 0;
    preorder.push_back(root);
    parent.push_back(0);
    while (!stack.empty()) {
        Frame& top = stack.back();
        const auto out = succs(top.node);
        if (top.next == out.size()) {
            postorder.push_back(top.node);
            stack.pop_back();
            continue;
        }
        const NodeId v = far_end(out[top.next++], true);
        if (num[v.value] == kNone) {
            num[v.value] = static_cast<std::uint32_t>(preorder.size());
            parent.push_back(num[top.node.value]);
            preorder.push_back(v);
            stack.push_back({v, 0});
        }
    }

    // Lengauer-Tarjan with path compression, all indices in preorder numbers.
    const auto count = static_cast<std::uint32_t>(preorder.size());
    std::vector<std::uint32_t> semi(count), label(count), ancestor(count, kNone), dom(count, 0);
    std::vector<std::vector<std::uint32_t>> bucket(count);
    for (std::uint32_t i = 0; i < count; ++i) semi[i] = label[i] = i;
    std::vector<std::uint32_t> path;
    auto eval = [&](std::uint32_t v) {
        if (ancestor[v] == kNone) return v;
        path.clear();
        for (std::uint32_t x = v; ancestor[ancestor[x]] != kNone; x = ancestor[x]) path.push_back(x);
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
            const std::uint32_t x = *it;
            const std::uint32_t a = ancestor[x];
            if (semi[label[a]] < semi[label[x]]) label[x] = label[a];
            ancestor[x] = ancestor[a];
        }
        return label[v];
    };
    for (std::uint32_t w = count; w-- > 1;) {
        for (EdgeId e : preds(preorder[w])) {
            const std::uint32_t v = num[far_end(e, false).value];
            if (v == kNone) continue;
            const std::uint32_t u = eval(v);
            if (semi[u] < semi[w]) semi[w] = semi[u];
        }
        bucket[semi[w]].push_back(w);
        const std::uint32_t p = parent[w];
        ancestor[w] = p;
        for (std::uint32_t v : bucket[p]) {
            const std::uint32_t u = eval(v);
            dom[v] = semi[u] < semi[v] ? u : p;
        }
        bucket[p].clear();
    }
    for (std::uint32_t w = 1; w < count; ++w) {
        if (dom[w] != semi[w]) dom[w] = dom[dom[w]];
    }
    std::vector<std::uint32_t> idom(n, kNone);
    for (std::uint32_t w = 0; w < count; ++w) idom[preorder[w].value] = preorder[dom[w]].value;

    DominatorTree tree;
    tree.root_ = root;
    tree.idom_.assign(n, std::nullopt);
    tree.size_.assign(n, 0);
    tree.depth_.assign(n, 0);
    tree.pre_.assign(n, kNone);
    tree.post_.assign(n, kNone);

    std::vector<std::vector<NodeId>> children(n);
    for (auto it = postorder.rbegin(); it != postorder.rend(); ++it) {
        const NodeId v = *it;
        tree.idom_[v.value] = NodeId{idom[v.value]};
        if (v != root) children[idom[v.value]].push_back(v);
    }

    // Euler intervals give O(1) ancestry queries.
    std::uint32_t clock = 0;
    std::vector<Frame> walk{{root, 0}};
    tree.pre_[root.value] = clock++;
    while (!walk.empty()) {
        Frame& top = walk.back();
        const auto& kids = children[top.node.value];
        if (top.next == kids.size()) {
            tree.post_[top.node.value] = clock++;
            std::uint32_t size = 1;
            for (NodeId c : kids) size += tree.size_[c.value];
            tree.size_[top.node.value] = size;
            walk.pop_back();
            continue;
        }
        const NodeId c = kids[top.next++];
        tree.pre_[c.value] = clock++;
        tree.depth_[c.value] = tree.depth_[top.node.value] + 1;
        walk.push_back({c, 0});
    }
    return tree;
}

DominatorTree dominator_tree(const CfgGraph& g) {
    if (g.node_count() == 0) throw PreconditionError("graph has no nodes");
    return DominatorTree::build(g, g.entry(), true);
}

DominatorTree post_dominator_tree(const CfgGraph& g) {
    if (g.node_count() == 0) throw PreconditionError("graph has no nodes");
    auto sinks = g.sinks();
    if (sinks.size() != 1) {
        throw PreconditionError("post-dominators need exactly one sink, graph has " +
                                std::to_string(sinks.size()) +
                                "; run ensure_single_sink first");
    }
    return DominatorTree::build(g, sinks.front(), false);
}

DominatorInfo compute_dominators(const CfgGraph& g) {
    return DominatorInfo{dominator_tree(g), post_dominator_tree(g)};
}

} // namespace veil::cfg
