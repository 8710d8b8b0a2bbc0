#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "veil/cfg/graph.hpp"

namespace veil::cfg {

enum class EdgeKind : std::uint8_t { Tree, Back, Forward, Cross };

const char* to_string(EdgeKind kind);

/// DFS edge typing. Successors are explored in edge-list order starting at the
/// entry; nodes the entry cannot reach are covered by further DFS runs rooted
/// at each still-unvisited node in id order.
struct EdgeClassification {
    std::vector<EdgeKind> class_of;          // indexed by EdgeId
    std::vector<std::uint32_t> dfs_order;    // discovery index, indexed by NodeId
    std::vector<NodeId> unreachable;         // not reachable from the entry, id order
    std::vector<bool> reachable_mask;        // indexed by NodeId

    EdgeKind kind(EdgeId e) const { return class_of[e.value]; }
    bool is_back(EdgeId e) const { return class_of[e.value] == EdgeKind::Back; }
    bool reachable(NodeId n) const { return reachable_mask[n.value]; }

    bool operator==(const EdgeClassification&) const = default;
};

EdgeClassification classify_edges(const CfgGraph& g);

/// Immediate-dominator tree over one direction of the graph.
///
/// Nodes not reachable from the root have no parent and are excluded from all
/// queries (dominates() is false for them, subtree_size() is 0).
class DominatorTree {
public:
    DominatorTree() = default;

    NodeId root() const { return root_; }
    bool contains(NodeId n) const { return idom_[n.value].has_value(); }

    /// Immediate dominator; the root maps to itself. nullopt for excluded nodes.
    std::optional<NodeId> idom(NodeId n) const { return idom_[n.value]; }

    /// Reflexive: a node dominates itself.
    bool dominates(NodeId a, NodeId b) const;

    /// Number of nodes in the subtree rooted at n, n included.
    std::uint32_t subtree_size(NodeId n) const { return size_[n.value]; }

    /// Distance from the root (root = 0).
    std::uint32_t depth(NodeId n) const { return depth_[n.value]; }

    const std::vector<std::optional<NodeId>>& idoms() const { return idom_; }

    /// Lengauer-Tarjan over `forward` (true: successor edges from root, false:
    /// predecessor edges from root).
    static DominatorTree build(const CfgGraph& g, NodeId root, bool forward);

private:
    NodeId root_{};
    std::vector<std::optional<NodeId>> idom_;
    std::vector<std::uint32_t> size_;
    std::vector<std::uint32_t> depth_;
    std::vector<std::uint32_t> pre_;
    std::vector<std::uint32_t> post_;
};

struct DominatorInfo {
    DominatorTree dom;
    DominatorTree postdom;

    bool dominates(NodeId a, NodeId b) const { return dom.dominates(a, b); }
    bool post_dominates(NodeId a, NodeId b) const { return postdom.dominates(a, b); }
    std::optional<NodeId> idom(NodeId n) const { return dom.idom(n); }
    std::optional<NodeId> ipdom(NodeId n) const { return postdom.idom(n); }
    std::uint32_t dom_subtree_size(NodeId n) const { return dom.subtree_size(n); }
};

DominatorTree dominator_tree(const CfgGraph& g);

/// Requires exactly one sink (run ensure_single_sink first); throws
/// PreconditionError otherwise.
DominatorTree post_dominator_tree(const CfgGraph& g);

DominatorInfo compute_dominators(const CfgGraph& g);

} // namespace veil::cfg
